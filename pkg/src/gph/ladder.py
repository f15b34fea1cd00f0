"""Zakharov-Shabat densities ``w_n`` and the conserved integrals ``I_n`` of the cubic NLS."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .spectral import WaveField, quadrature, spectral_derivative

N_MAX = 8

# (n_lo, n_hi, relative drift tolerance)
DRIFT_TOLERANCES = ((1, 3, 1e-7), (4, 6, 1e-5), (7, 8, 1e-3))


def drift_tolerance(n: int, policy=DRIFT_TOLERANCES) -> float:
    for lo, hi, tol in policy:
        if lo <= n <= hi:
            return tol
    raise ValueError(f"no drift tolerance for n={n}")


def _check_n(n, name="n_max"):
    if int(n) != n or not 1 <= n <= N_MAX:
        raise ValueError(f"{name} must be in 1..{N_MAX}, got {n}")


def w_arrays(values: np.ndarray, grid, n_max: int, kappa: int) -> list[np.ndarray]:
    _check_n(n_max)
    phibar = np.conj(values)
    w = [np.asarray(values, dtype=np.complex128)]
    for n in range(1, n_max):
        # w[n] is w_{n+1} = -i d w_n + kappa conj(phi) sum_{k=1}^{n-1} w_k w_{n-k}
        nxt = -1j * spectral_derivative(w[n - 1], grid, 1)
        if n >= 2:
            acc = np.zeros_like(nxt)
            for k in range(1, n):
                acc += w[k - 1] * w[n - k - 1]
            nxt = nxt + kappa * phibar * acc
        w.append(nxt)
    return w


def w_sequence(phi: WaveField, n_max: int, kappa: int) -> list[WaveField]:
    """``[w_1, ..., w_{n_max}]`` for the field ``phi``."""
    return [WaveField(phi.grid, w) for w in w_arrays(phi.values, phi.grid, n_max, kappa)]


def conserved_integral(phi: WaveField, n: int, kappa: int) -> complex:
    """``I_n(phi) = integral w_n conj(phi)``."""
    _check_n(n, "n")
    w = w_arrays(phi.values, phi.grid, n, kappa)[-1]
    return quadrature(WaveField(phi.grid, w * np.conj(phi.values)))


def conserved_integrals(phi: WaveField, n_max: int, kappa: int) -> np.ndarray:
    """``[I_1, ..., I_{n_max}]`` sharing one recursion."""
    phibar = np.conj(phi.values)
    dx = phi.grid.dx
    return np.array([dx * np.sum(w * phibar) for w in w_arrays(phi.values, phi.grid, n_max, kappa)])


@dataclass(frozen=True, eq=False)
class LadderReport:
    times: np.ndarray
    values: np.ndarray  # shape (n_snapshots, n_max), complex

    @property
    def n_max(self) -> int:
        return self.values.shape[1]

    @property
    def drift(self) -> np.ndarray:
        """Per n: ``max_t |I_n(t) - I_n(0)| / max(1, |I_n(0)|)``."""
        ref = self.values[0]
        dev = np.abs(self.values - ref[None, :]).max(axis=0)
        return dev / np.maximum(1.0, np.abs(ref))

    def check(self, policy=DRIFT_TOLERANCES) -> list[tuple[int, float, float, bool]]:
        """``(n, drift, tolerance, passed)`` per level."""
        return [(n, float(d), drift_tolerance(n, policy), bool(d < drift_tolerance(n, policy)))
                for n, d in enumerate(self.drift, start=1)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        header = ["t"]
        for n in range(1, self.n_max + 1):
            header += [f"re_I{n}", f"im_I{n}"]
        writer.writerow(header)
        for t, row in zip(self.times, self.values):
            line = [repr(float(t))]
            for z in row:
                line += [repr(float(z.real)), repr(float(z.imag))]
            writer.writerow(line)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "values": [[[float(z.real), float(z.imag)] for z in row] for row in self.values],
            "drift": [float(d) for d in self.drift],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def ladder_report(trajectory, n_max: int, kappa: int) -> LadderReport:
    """Evaluate ``I_1..I_{n_max}`` at every snapshot of ``[(t, phi), ...]``."""
    if not trajectory:
        raise ValueError("empty trajectory")
    _check_n(n_max)
    times = np.array([t for t, _ in trajectory], dtype=float)
    values = np.array([conserved_integrals(phi, n_max, kappa) for _, phi in trajectory])
    return LadderReport(times, values)


def structural_check(phi: WaveField, n: int, kappa: int) -> tuple[float, float]:
    """Split ``Re I_n`` (odd n) into ``integral |d^m phi|^2``, ``m = (n-1)/2``, and the rest.

    The leading piece is evaluated spectrally (Parseval), independently of
    the ``w_n`` recursion.
    """
    if n % 2 == 0:
        raise ValueError("structural split is only defined for odd n")
    if not 1 <= n <= 7:
        raise ValueError("n must be odd and <= 7")
    m = (n - 1) // 2
    g = phi.grid
    spec = np.fft.fft(phi.values)
    leading = float(g.dx / g.n_points * np.sum(g.wavenumbers ** (2 * m) * np.abs(spec) ** 2))
    total = conserved_integral(phi, n, kappa).real
    return leading, total - leading
