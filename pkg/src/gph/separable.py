"""Density matrices as weighted sums of rank-one product kernels.

A :class:`RankOneKernel` stores ``weight * prod_l u_l(x_l) conj(v_l(x'_l))``.
Hierarchy operators act on such kernels in closed form: derivatives touch
one unprimed factor, a ``B+`` collision multiplies the target's unprimed
factor by ``u_b conj(v_b)`` on the diagonal, and a partial trace turns a
slot into the scalar ``<u_l, v_l>``.  Nothing is ever densified here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .operators import Collision, Deriv, OperatorExpr, PTrace, build_w
from .spectral import GridMismatchError, GridSpec, WaveField, l2_norm, spectral_derivative


class SlotError(KeyError):
    """A primitive referenced a slot that is not alive."""


@dataclass(frozen=True, eq=False)
class RankOneKernel:
    weight: complex
    slots: dict = field(default_factory=dict)  # label -> (unprimed, primed) arrays; never mutated

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.slots))


@dataclass(frozen=True, eq=False)
class SeparableSum:
    grid: GridSpec
    labels: tuple[int, ...]
    kernels: tuple[RankOneKernel, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted(self.labels)))
        for k in self.kernels:
            if k.labels != self.labels:
                raise ValueError(f"kernel labels {k.labels} != {self.labels}")

    @property
    def rank(self) -> int:
        return len(self.kernels)

    def __add__(self, other: SeparableSum) -> SeparableSum:
        if other.grid != self.grid:
            raise GridMismatchError(f"{self.grid} != {other.grid}")
        if other.labels != self.labels:
            raise ValueError(f"label sets differ: {self.labels} vs {other.labels}")
        return SeparableSum(self.grid, self.labels, self.kernels + other.kernels)

    def scale(self, c: complex) -> SeparableSum:
        return SeparableSum(self.grid, self.labels,
                            tuple(RankOneKernel(c * k.weight, k.slots) for k in self.kernels))

    def field(self, kernel: int, label: int, primed: bool = False) -> WaveField:
        return WaveField(self.grid, self.kernels[kernel].slots[label][1 if primed else 0])


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Discrete de Finetti measure ``sum_i p_i delta_{phi_i}`` on the unit sphere."""

    components: tuple[tuple[float, WaveField], ...]

    def __post_init__(self):
        comps = tuple((float(p), phi) for p, phi in self.components)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        grid = comps[0][1].grid
        for p, phi in comps:
            if not p > 0:
                raise ValueError(f"component weights must be positive, got {p}")
            if phi.grid != grid:
                raise GridMismatchError("ensemble components live on different grids")
            norm = l2_norm(phi)
            if abs(norm - 1.0) > 1e-10:
                raise ValueError(f"ensemble component has L2 norm {norm!r}, expected 1")
        total = sum(p for p, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"ensemble weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", comps)

    @property
    def grid(self) -> GridSpec:
        return self.components[0][1].grid

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.components)

    def with_fields(self, fields) -> Ensemble:
        return Ensemble(tuple((p, f) for (p, _), f in zip(self.components, fields)))


def _product_kernel(weight, phi: WaveField, labels) -> RankOneKernel:
    v = phi.values
    return RankOneKernel(complex(weight), {a: (v, v) for a in labels})


def product_state(phi: WaveField, k: int, first_label: int = 1) -> SeparableSum:
    """``|phi><phi|^{(x)k}`` on labels ``first_label..first_label+k-1``."""
    if k < 1:
        raise ValueError("k must be positive")
    norm = l2_norm(phi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"product_state needs a unit-norm field, got norm {norm!r}")
    labels = tuple(range(first_label, first_label + k))
    return SeparableSum(phi.grid, labels, (_product_kernel(1.0, phi, labels),))


def ensemble_state(ens: Ensemble, k: int) -> SeparableSum:
    """``gamma^(k) = sum_i p_i |phi_i><phi_i|^{(x)k}``."""
    labels = tuple(range(1, k + 1))
    return SeparableSum(ens.grid, labels, tuple(_product_kernel(p, phi, labels) for p, phi in ens.components))


def _inner(grid, u, v) -> complex:
    return complex(grid.dx * np.sum(u * np.conj(v)))


def _require(s: SeparableSum, *labels):
    for a in labels:
        if a not in s.labels:
            raise SlotError(f"slot {a} is not alive (alive: {list(s.labels)})")


def marginal(s: SeparableSum, slot: int) -> SeparableSum:
    """Partial trace over ``slot``."""
    return apply_primitive(PTrace(slot), s)


def _apply_kernel(p, k: RankOneKernel, grid, kernels) -> RankOneKernel:
    slots = dict(k.slots)
    if isinstance(p, Deriv):
        u, v = slots[p.slot]
        slots[p.slot] = (spectral_derivative(u, grid, 1), v)
        return RankOneKernel(k.weight, slots)
    if isinstance(p, Collision):
        ua, va = slots[p.target]
        ub, vb = slots.pop(p.source)
        slots[p.target] = (kernels.collision_product(ua, ub, vb), va)
        return RankOneKernel(k.weight, slots)
    if isinstance(p, PTrace):
        u, v = slots.pop(p.slot)
        return RankOneKernel(k.weight * _inner(grid, u, v), slots)
    raise TypeError(f"not a primitive: {p!r}")


def _after(p, labels):
    if isinstance(p, PTrace):
        return tuple(a for a in labels if a != p.slot)
    if isinstance(p, Collision):
        return tuple(a for a in labels if a != p.source)
    return labels


def apply_primitive(p, s: SeparableSum) -> SeparableSum:
    """Apply one primitive to every kernel (coefficients are the term's business)."""
    _require(s, *p.labels)
    kern = _backend.kernels
    return SeparableSum(s.grid, _after(p, s.labels), tuple(_apply_kernel(p, k, s.grid, kern) for k in s.kernels))


def apply_expr(e: OperatorExpr, s: SeparableSum, kappa: int) -> SeparableSum:
    """``e(s)`` with kappa substituted; labels of ``s`` outside ``e`` pass through."""
    _require(s, *e.slots)
    if not e.terms:
        raise ValueError("cannot apply the empty operator")
    kern = _backend.kernels
    out = []
    labels = s.labels
    for term in e.terms:
        c = term.coeff.evaluate(kappa)
        for k in s.kernels:
            cur = k
            for p in term.pipeline:
                cur = _apply_kernel(p, cur, s.grid, kern)
            out.append(RankOneKernel(c * cur.weight, cur.slots))
    for p in e.terms[0].pipeline:
        labels = _after(p, labels)
    return SeparableSum(s.grid, labels, tuple(out))


def trace(s: SeparableSum) -> complex:
    """Full trace; summed in kernel order, then label order."""
    total = 0j
    for k in s.kernels:
        w = k.weight
        for a in sorted(k.slots):
            u, v = k.slots[a]
            w *= _inner(s.grid, u, v)
        total += w
    return total


def collapse(s: SeparableSum, label: int | None = None) -> SeparableSum:
    """Merge kernels that agree everywhere except the unprimed factor at ``label``."""
    if label is None:
        if len(s.labels) != 1:
            raise ValueError("label required when more than one slot is alive")
        label = s.labels[0]
    _require(s, label)
    groups: dict = {}
    order = []
    for k in s.kernels:
        key = tuple((a, k.slots[a][1].tobytes()) + (() if a == label else (k.slots[a][0].tobytes(),))
                    for a in s.labels)
        if key not in groups:
            groups[key] = [k, np.zeros(s.grid.n_points, dtype=np.complex128)]
            order.append(key)
        groups[key][1] = groups[key][1] + k.weight * k.slots[label][0]
    out = []
    for key in order:
        first, acc = groups[key]
        slots = dict(first.slots)
        slots[label] = (acc, first.slots[label][1])
        out.append(RankOneKernel(1.0 + 0j, slots))
    return SeparableSum(s.grid, s.labels, tuple(out))


def slot_matrix(s: SeparableSum, label: int) -> np.ndarray:
    """``K(x, x')`` of the ``label`` factor of a rank-one sum (after :func:`collapse`)."""
    c = collapse(s, label)
    if c.rank != 1:
        raise ValueError(f"sum does not collapse to rank one on slot {label} (rank {c.rank})")
    k = c.kernels[0]
    u, v = k.slots[label]
    return k.weight * np.outer(u, np.conj(v))


def tr_w_ensemble(n: int, j: int, k: int, ens: Ensemble, kappa: int) -> complex:
    """``Tr W_n^j gamma^(k)`` for the ensemble state, via operator application."""
    if k < j + n - 1:
        raise ValueError(f"k={k} too small for W_{n}^{j} (need k >= {j + n - 1})")
    return trace(apply_expr(build_w(n, j), ensemble_state(ens, k), kappa))


def tr_expr_ensemble(e: OperatorExpr, k: int, ens: Ensemble, kappa: int) -> complex:
    return trace(apply_expr(e, ensemble_state(ens, k), kappa))
