"""Brute-force density-matrix tensors for checking the separable evaluator.

A :class:`DenseKernel` holds ``gamma(x_1..x_k; x'_1..x'_k)`` as an array with
the unprimed axes first, in ``live_labels`` order.  On the grid a delta is
``Kronecker / dx``, so a partial trace is ``dx * sum`` over the diagonal
and a collision (two deltas, two integrals) is a plain diagonal restriction.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .operators import Collision, Deriv, OperatorExpr, PTrace
from .separable import SeparableSum, apply_expr
from .spectral import GridSpec

MAX_ELEMENTS = 2 ** 24


class MemoryGuardError(MemoryError):
    pass


def check_size(n_points: int, k: int):
    size = n_points ** (2 * k)
    if size > MAX_ELEMENTS:
        raise MemoryGuardError(f"dense kernel with k={k} on {n_points} points needs {size} > {MAX_ELEMENTS} entries")


@dataclass(frozen=True, eq=False)
class DenseKernel:
    grid: GridSpec
    live_labels: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        k = len(self.live_labels)
        check_size(self.grid.n_points, k)
        if self.values.shape != (self.grid.n_points,) * (2 * k):
            raise ValueError(f"tensor shape {self.values.shape} does not match k={k}")

    @property
    def k(self) -> int:
        return len(self.live_labels)

    def axis(self, label: int, primed: bool = False) -> int:
        if label not in self.live_labels:
            raise KeyError(f"slot {label} is not alive (alive: {list(self.live_labels)})")
        return self.live_labels.index(label) + (self.k if primed else 0)


def densify(s: SeparableSum) -> DenseKernel:
    k = len(s.labels)
    check_size(s.grid.n_points, k)
    total = np.zeros((s.grid.n_points,) * (2 * k), dtype=np.complex128)
    for ker in s.kernels:
        factors = [ker.slots[a][0] for a in s.labels] + [np.conj(ker.slots[a][1]) for a in s.labels]
        total += ker.weight * reduce(np.multiply.outer, factors, np.ones(()))
    return DenseKernel(s.grid, s.labels, total)


def _letters(k):
    return list(string.ascii_letters[:2 * k])


def apply_primitive_dense(p, d: DenseKernel) -> DenseKernel:
    labels = list(d.live_labels)
    if isinstance(p, Deriv):
        ax = d.axis(p.slot)
        xi = d.grid.wavenumbers
        shape = [1] * d.values.ndim
        shape[ax] = -1
        out = np.fft.ifft(np.fft.fft(d.values, axis=ax) * (1j * xi).reshape(shape), axis=ax)
        return DenseKernel(d.grid, d.live_labels, out)
    sub = _letters(d.k)
    if isinstance(p, PTrace):
        a, ap = d.axis(p.slot), d.axis(p.slot, True)
        sub[ap] = sub[a]
        keep = [i for i in range(2 * d.k) if i not in (a, ap)]
        spec = "".join(sub) + "->" + "".join(sub[i] for i in keep)
        labels.remove(p.slot)
        return DenseKernel(d.grid, tuple(labels), d.grid.dx * np.einsum(spec, d.values))
    if isinstance(p, Collision):
        a = d.axis(p.target)
        b, bp = d.axis(p.source), d.axis(p.source, True)
        sub[b] = sub[a]
        sub[bp] = sub[a]
        keep = [i for i in range(2 * d.k) if i not in (b, bp)]
        spec = "".join(sub) + "->" + "".join(sub[i] for i in keep)
        labels.remove(p.source)
        return DenseKernel(d.grid, tuple(labels), np.einsum(spec, d.values))
    raise TypeError(f"not a primitive: {p!r}")


def apply_term_dense(term, d: DenseKernel, kappa: int) -> DenseKernel:
    for p in term.pipeline:
        d = apply_primitive_dense(p, d)
    return DenseKernel(d.grid, d.live_labels, term.coeff.evaluate(kappa) * d.values)


def apply_expr_dense(e: OperatorExpr, d: DenseKernel, kappa: int) -> DenseKernel:
    parts = [apply_term_dense(t, d, kappa) for t in e.terms]
    total = reduce(np.add, (q.values for q in parts))
    return DenseKernel(d.grid, parts[0].live_labels, total)


def trace_dense(d: DenseKernel) -> complex:
    for a in d.live_labels:
        d = apply_primitive_dense(PTrace(a), d)
    return complex(d.values)


def oracle_check(e: OperatorExpr, s: SeparableSum, kappa: int, dense_s: DenseKernel | None = None) -> float:
    """Max entrywise gap between ``densify(e(s))`` and ``e(densify(s))``."""
    check_size(s.grid.n_points, len(s.labels))
    via_separable = densify(apply_expr(e, s, kappa))
    via_dense = apply_expr_dense(e, dense_s if dense_s is not None else densify(s), kappa)
    if via_separable.live_labels != via_dense.live_labels:
        raise AssertionError("surviving labels differ between routes")
    return float(np.max(np.abs(via_separable.values - via_dense.values), initial=0.0))


def oracle_check_terms(e: OperatorExpr, s: SeparableSum, kappa: int) -> list[float]:
    """:func:`oracle_check` for every term of ``e`` separately."""
    d = densify(s)
    return [oracle_check(OperatorExpr(e.slots, (t,)), s, kappa, d) for t in e.terms]
