"""Periodic grid, spectral differentiation and quadrature for one-particle fields.

The whole line is replaced by the periodic box ``[-L, L)`` sampled at
``n_points`` equispaced nodes.  All test data decays fast enough that the
truncation is invisible at the tolerances used in this package.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_DERIVATIVE_ORDER = 12


class GridMismatchError(ValueError):
    """Two fields living on different grids were combined."""


@dataclass(frozen=True)
class GridSpec:
    n_points: int
    half_length: float

    def __post_init__(self):
        n = self.n_points
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError(f"n_points must be an integer, got {n!r}")
        if n < 16 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")
        if not np.isfinite(self.half_length) or self.half_length <= 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        """Sample points ``-L + m*dx``."""
        x = -self.half_length + self.dx * np.arange(self.n_points)
        x.flags.writeable = False
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular frequencies ``pi*m/L`` in FFT order."""
        m = np.fft.fftfreq(self.n_points, d=1.0 / self.n_points)
        xi = np.pi * m / self.half_length
        xi.flags.writeable = False
        return xi


def make_grid(n_points: int, half_length: float) -> GridSpec:
    return GridSpec(n_points, half_length)


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex samples of a one-particle wavefunction on ``grid``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("WaveField values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> WaveField:
        return cls(grid, func(grid.x))

    def _other(self, other):
        if isinstance(other, WaveField):
            if other.grid != self.grid:
                raise GridMismatchError(f"{self.grid} != {other.grid}")
            return other.values
        return other

    def __add__(self, other):
        return WaveField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return WaveField(self.grid, self.values - self._other(other))

    def __mul__(self, other):
        return WaveField(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return WaveField(self.grid, self.values / self._other(other))

    def __neg__(self):
        return WaveField(self.grid, -self.values)

    def conj(self) -> WaveField:
        return WaveField(self.grid, np.conj(self.values))

    def abs2(self) -> np.ndarray:
        return self.values.real ** 2 + self.values.imag ** 2

    def __repr__(self):
        return f"WaveField(grid={self.grid}, norm={np.sqrt(inner(self, self).real):.6g})"


def _check_order(order):
    if order < 0 or int(order) != order:
        raise ValueError(f"derivative order must be a non-negative integer, got {order}")
    if order > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order {order} exceeds cap {MAX_DERIVATIVE_ORDER}")


def spectral_derivative(values: np.ndarray, grid: GridSpec, order: int = 1, axis: int = -1) -> np.ndarray:
    """Array-level spectral derivative along ``axis``; no wrapping."""
    _check_order(order)
    if order == 0:
        return np.array(values, dtype=np.complex128, copy=True)
    symbol = (1j * grid.wavenumbers) ** order
    shape = [1] * np.ndim(values)
    shape[axis] = -1
    spec = np.fft.fft(values, axis=axis)
    return np.fft.ifft(spec * symbol.reshape(shape), axis=axis)


def derivative(f: WaveField, order: int = 1) -> WaveField:
    """``d^order f / dx^order`` by multiplying the spectrum with ``(i xi)^order``."""
    return WaveField(f.grid, spectral_derivative(f.values, f.grid, order))


def quadrature(f: WaveField) -> complex:
    """Periodic Riemann sum ``dx * sum(f)``."""
    return complex(f.grid.dx * np.sum(f.values))


def inner(f: WaveField, g: WaveField) -> complex:
    """``integral f * conj(g)``; linear in the first slot."""
    if f.grid != g.grid:
        raise GridMismatchError(f"{f.grid} != {g.grid}")
    return complex(f.grid.dx * np.sum(f.values * np.conj(g.values)))


def sobolev_norm(f: WaveField, s: float) -> float:
    """``H^s`` norm with weight ``(1 + xi^2)^s``; ``s = 0`` is the L2 norm."""
    if s < 0:
        raise ValueError("s must be non-negative")
    g = f.grid
    spec = np.fft.fft(f.values)
    weight = (1.0 + g.wavenumbers ** 2) ** s
    total = np.sum(weight * (spec.real ** 2 + spec.imag ** 2))
    return float(np.sqrt(2.0 * g.half_length / g.n_points ** 2 * total))


def l2_norm(f: WaveField) -> float:
    return float(np.sqrt(inner(f, f).real))


def normalize(f: WaveField) -> WaveField:
    norm = l2_norm(f)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero field")
    return WaveField(f.grid, f.values / norm)
