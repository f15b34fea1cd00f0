"""Symbolic hierarchy operators ``W_n^j`` as sums of primitive pipelines.

A term is ``coeff * pipeline`` where the pipeline is a tuple of primitives
applied to a density-matrix kernel **left to right** (first element acts
first).  Slots are named by positive integer labels; a trace or a collision
kills a label without renumbering the survivors.

Primitives acting on disjoint slot sets commute.  The canonical pipeline is
the lexicographically smallest ordering reachable by such swaps, under the
primitive order ``D < B < Tr`` then labels.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

N_MAX = 10


class OperatorError(ValueError):
    """Base class for malformed operator expressions."""


class SlotLifetimeError(OperatorError):
    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(msg + where)


# -- coefficients -----------------------------------------------------------

_UNIT = {0: (1, 0), 1: (0, -1), 2: (-1, 0), 3: (0, 1)}  # (-i)^p as (re, im)


@dataclass(frozen=True)
class Coefficient:
    """Polynomial in kappa with Gaussian-integer coefficients.

    ``terms`` holds sorted ``(kappa_power, re, im)`` triples with nonzero
    ``(re, im)``.  Operators produced by :func:`build_w` only ever carry a
    single monomial ``(-i)^p kappa^m``.
    """

    terms: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def monomial(cls, unit_power: int = 0, kappa_power: int = 0, scale: int = 1) -> Coefficient:
        re, im = _UNIT[unit_power % 4]
        return cls._make({kappa_power: (scale * re, scale * im)})

    @classmethod
    def _make(cls, table: dict) -> Coefficient:
        return cls(tuple(sorted((m, re, im) for m, (re, im) in table.items() if re or im)))

    def _table(self):
        return {m: (re, im) for m, re, im in self.terms}

    def __add__(self, other: Coefficient) -> Coefficient:
        table = self._table()
        for m, re, im in other.terms:
            a, b = table.get(m, (0, 0))
            table[m] = (a + re, b + im)
        return Coefficient._make(table)

    def __mul__(self, other: Coefficient) -> Coefficient:
        table = {}
        for m1, a, b in self.terms:
            for m2, c, d in other.terms:
                x, y = table.get(m1 + m2, (0, 0))
                table[m1 + m2] = (x + a * c - b * d, y + a * d + b * c)
        return Coefficient._make(table)

    def __neg__(self) -> Coefficient:
        return Coefficient(tuple((m, -re, -im) for m, re, im in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, kappa) -> complex:
        return sum(complex(re, im) * kappa ** m for m, re, im in self.terms)

    def as_monomial(self):
        """``(unit_power, kappa_power)`` if this is exactly ``(-i)^p kappa^m``, else None."""
        if len(self.terms) != 1:
            return None
        m, re, im = self.terms[0]
        for p, unit in _UNIT.items():
            if unit == (re, im):
                return p, m
        return None


ONE = Coefficient.monomial()
MINUS_I = Coefficient.monomial(1)
KAPPA = Coefficient.monomial(0, 1)


# -- primitives -------------------------------------------------------------

@dataclass(frozen=True)
class Deriv:
    slot: int

    @property
    def labels(self):
        return (self.slot,)


@dataclass(frozen=True)
class Collision:
    """``B+``: fold slot ``source`` onto the diagonal of slot ``target``."""

    target: int
    source: int

    def __post_init__(self):
        if self.target == self.source:
            raise OperatorError(f"collision target and source coincide ({self.target})")

    @property
    def labels(self):
        return (self.target, self.source)


@dataclass(frozen=True)
class PTrace:
    slot: int

    @property
    def labels(self):
        return (self.slot,)


Primitive = Union[Deriv, Collision, PTrace]
_RANK = {Deriv: 0, Collision: 1, PTrace: 2}


def primitive_key(p: Primitive) -> tuple:
    return (_RANK[type(p)],) + p.labels


def check_pipeline(pipeline, slots) -> tuple[int, ...]:
    """Validate label lifetimes; return the surviving labels."""
    alive = set(slots)
    for pos, p in enumerate(pipeline):
        for a in p.labels:
            if a not in alive:
                raise SlotLifetimeError(f"primitive #{pos} {p} uses dead or unknown slot {a}")
        if isinstance(p, PTrace):
            alive.discard(p.slot)
        elif isinstance(p, Collision):
            alive.discard(p.source)
    return tuple(sorted(alive))


def canonical_pipeline(pipeline) -> tuple:
    """Lexicographically least reordering under commutation of disjoint primitives."""
    rest = list(pipeline)
    out = []
    while rest:
        best = None
        seen: set = set()
        for idx, p in enumerate(rest):
            labels = set(p.labels)
            if not labels & seen and (best is None or primitive_key(p) < primitive_key(rest[best])):
                best = idx
            seen |= labels
        out.append(rest.pop(best))
    return tuple(out)


# -- terms and expressions --------------------------------------------------

@dataclass(frozen=True)
class OperatorTerm:
    coeff: Coefficient
    pipeline: tuple

    @property
    def n_collisions(self) -> int:
        return sum(isinstance(p, Collision) for p in self.pipeline)

    @property
    def n_derivs(self) -> int:
        return sum(isinstance(p, Deriv) for p in self.pipeline)

    def sort_key(self):
        return (self.n_collisions, tuple(primitive_key(p) for p in self.pipeline))


@dataclass(frozen=True)
class OperatorExpr:
    """Sum of terms acting on the input labels ``slots``."""

    slots: tuple[int, ...]
    terms: tuple[OperatorTerm, ...]

    @property
    def order(self) -> int:
        return len(self.slots)

    @property
    def base(self) -> int:
        return min(self.slots) if self.slots else 0

    @property
    def term_count(self) -> int:
        return len(self.terms)

    @property
    def outputs(self) -> tuple[int, ...]:
        if not self.terms:
            return ()
        return check_pipeline(self.terms[0].pipeline, self.slots)

    def __add__(self, other: OperatorExpr) -> OperatorExpr:
        slots = tuple(sorted(set(self.slots) | set(other.slots)))
        return make_expr(slots, self.terms + other.terms)

    def scale(self, c: Coefficient) -> OperatorExpr:
        return normalize(OperatorExpr(self.slots, tuple(OperatorTerm(c * t.coeff, t.pipeline) for t in self.terms)))

    def __neg__(self) -> OperatorExpr:
        return self.scale(-ONE)

    def __sub__(self, other: OperatorExpr) -> OperatorExpr:
        return self + (-other)

    def __str__(self):
        from .syntax import pretty_print
        return pretty_print(self)


def make_expr(slots, terms) -> OperatorExpr:
    """Validate and normalize."""
    slots = tuple(sorted(set(slots)))
    if any(int(a) != a or a < 1 for a in slots):
        raise OperatorError(f"slot labels must be positive integers: {slots}")
    outputs = None
    for t in terms:
        out = check_pipeline(t.pipeline, slots)
        if outputs is None:
            outputs = out
        elif out != outputs:
            raise SlotLifetimeError(f"terms leave different surviving slots: {outputs} vs {out}")
    return normalize(OperatorExpr(slots, tuple(terms)))


def normalize(e: OperatorExpr) -> OperatorExpr:
    """Canonical pipelines, like terms merged, zeros dropped, terms sorted."""
    merged: dict = {}
    for t in e.terms:
        pipe = canonical_pipeline(t.pipeline)
        merged[pipe] = merged[pipe] + t.coeff if pipe in merged else t.coeff
    terms = [OperatorTerm(c, p) for p, c in merged.items() if not c.is_zero()]
    terms.sort(key=OperatorTerm.sort_key)
    return OperatorExpr(tuple(sorted(e.slots)), tuple(terms))


def relabel(e: OperatorExpr, shift: int) -> OperatorExpr:
    """Add ``shift`` to every slot label."""

    def move(p):
        if isinstance(p, Collision):
            return Collision(p.target + shift, p.source + shift)
        return type(p)(p.slot + shift)

    terms = tuple(OperatorTerm(t.coeff, tuple(move(p) for p in t.pipeline)) for t in e.terms)
    return normalize(OperatorExpr(tuple(a + shift for a in e.slots), terms))


def identity(slots) -> OperatorExpr:
    return OperatorExpr(tuple(sorted(slots)), (OperatorTerm(ONE, ()),))


def tensor(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """``a (x) b`` on disjoint slot sets."""
    overlap = set(a.slots) & set(b.slots)
    if overlap:
        raise OperatorError(f"tensor factors share slots {sorted(overlap)}")
    terms = [OperatorTerm(s.coeff * t.coeff, s.pipeline + t.pipeline) for s in a.terms for t in b.terms]
    return normalize(OperatorExpr(tuple(sorted(a.slots + b.slots)), tuple(terms)))


def _check_n(n):
    if int(n) != n or not 1 <= n <= N_MAX:
        raise OperatorError(f"order n must be in 1..{N_MAX}, got {n}")


@lru_cache(maxsize=None)
def build_w(n: int, j: int = 1) -> OperatorExpr:
    """``W_n^j`` on slots ``j..j+n-1``, output on slot ``j``.

    ``W_{n+1} = -i D_j W_n Tr_{j+n} + kappa sum_k B_{j,j+k} (W_k^j (x) W_{n-k}^{j+k}) Tr_{j+n}``,
    one factor of kappa per collision.
    """
    _check_n(n)
    if int(j) != j or j < 1:
        raise OperatorError(f"base slot j must be a positive integer, got {j}")
    if n == 1:
        return identity((j,))
    m = n - 1
    trace = (PTrace(j + m),)
    terms = [OperatorTerm(MINUS_I * t.coeff, trace + t.pipeline + (Deriv(j),)) for t in build_w(m, j).terms]
    for k in range(1, m):
        left, right = build_w(k, j), build_w(m - k, j + k)
        for a in left.terms:
            for b in right.terms:
                terms.append(OperatorTerm(KAPPA * a.coeff * b.coeff,
                                          trace + a.pipeline + b.pipeline + (Collision(j, j + k),)))
    expr = make_expr(range(j, j + n), terms)
    for t in expr.terms:
        if t.coeff.as_monomial() != (t.n_derivs % 4, t.n_collisions):
            raise AssertionError(f"coefficient closure violated in W_{n}^{j}: {t}")
    return expr


def motzkin_counts(n_max: int) -> list[int]:
    """``T_1 = 1, T_{n+1} = T_n + sum_{k=1}^{n-1} T_k T_{n-k}``."""
    t = [None, 1]
    for n in range(1, n_max):
        t.append(t[n] + sum(t[k] * t[n - k] for k in range(1, n)))
    return t[1:n_max + 1]
