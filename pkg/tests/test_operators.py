import pytest
from hypothesis import given
from hypothesis import strategies as st

from gph.operators import (
    KAPPA, MINUS_I, N_MAX, ONE, Coefficient, Collision, Deriv, OperatorError, OperatorExpr, OperatorTerm, PTrace,
    SlotLifetimeError, build_w, canonical_pipeline, check_pipeline, identity, make_expr, motzkin_counts,
    normalize, relabel, tensor,
)


def motzkin_by_recurrence(n_max):
    t = [None, 1]
    for n in range(1, n_max):
        t.append(t[n] + sum(t[k] * t[n - k] for k in range(1, n)))
    return t[1:]


class TestCoefficient:
    def test_units(self):
        assert MINUS_I * MINUS_I == Coefficient.monomial(2)
        assert Coefficient.monomial(2) == -ONE
        assert Coefficient.monomial(4) == ONE
        assert MINUS_I.evaluate(-1) == -1j
        assert (KAPPA * KAPPA).evaluate(-1) == 1

    def test_cancellation(self):
        assert (KAPPA + -KAPPA).is_zero()

    def test_as_monomial(self):
        assert (MINUS_I * KAPPA).as_monomial() == (1, 1)
        assert (ONE + KAPPA).as_monomial() is None
        assert Coefficient.monomial(scale=2).as_monomial() is None

    @given(st.integers(0, 7), st.integers(0, 5), st.integers(0, 7), st.integers(0, 5), st.sampled_from([-1, 1]))
    def test_product_evaluates(self, p, m, q, r, kappa):
        a, b = Coefficient.monomial(p, m), Coefficient.monomial(q, r)
        assert (a * b).evaluate(kappa) == pytest.approx(a.evaluate(kappa) * b.evaluate(kappa))
        assert (a * b).as_monomial() == ((p + q) % 4, m + r)


class TestPrimitives:
    def test_self_collision(self):
        with pytest.raises(OperatorError):
            Collision(2, 2)

    def test_lifetimes(self):
        assert check_pipeline((Deriv(1), Collision(1, 2), PTrace(3)), (1, 2, 3)) == (1,)
        with pytest.raises(SlotLifetimeError):
            check_pipeline((PTrace(2), Deriv(2)), (1, 2))
        with pytest.raises(SlotLifetimeError):
            check_pipeline((Collision(1, 2), Collision(3, 2)), (1, 2, 3))
        with pytest.raises(SlotLifetimeError):
            check_pipeline((Deriv(4),), (1, 2))

    def test_canonical_order(self):
        assert canonical_pipeline((PTrace(3), PTrace(2))) == (PTrace(2), PTrace(3))
        assert canonical_pipeline((PTrace(2), Deriv(1))) == (Deriv(1), PTrace(2))
        # dependent primitives keep their order
        assert canonical_pipeline((Collision(1, 2), Deriv(1))) == (Collision(1, 2), Deriv(1))


class TestBuild:
    def test_identity(self):
        assert build_w(1, 3) == identity((3,))

    def test_w2(self):
        assert build_w(2, 1).terms == (OperatorTerm(MINUS_I, (Deriv(1), PTrace(2))),)

    def test_w3(self):
        e = build_w(3, 1)
        assert e.terms == (
            OperatorTerm(-ONE, (Deriv(1), Deriv(1), PTrace(2), PTrace(3))),
            OperatorTerm(KAPPA, (Collision(1, 2), PTrace(3))),
        )

    def test_motzkin(self):
        expected = motzkin_by_recurrence(N_MAX)
        assert expected[:6] == [1, 1, 2, 4, 9, 21]
        assert motzkin_counts(N_MAX) == expected
        assert [build_w(n, 1).term_count for n in range(1, N_MAX + 1)] == expected

    @pytest.mark.parametrize("n", [0, N_MAX + 1])
    def test_range(self, n):
        with pytest.raises(OperatorError):
            build_w(n, 1)

    def test_bad_base(self):
        with pytest.raises(OperatorError):
            build_w(2, 0)

    @given(st.integers(1, 8), st.integers(1, 6), st.integers(0, 5))
    def test_base_shift(self, n, j, shift):
        assert build_w(n, j + shift) == relabel(build_w(n, j), shift)

    @pytest.mark.parametrize("n", range(1, N_MAX + 1))
    def test_leading_symbol(self, n):
        e = build_w(n, 2)
        free = [t for t in e.terms if t.n_collisions == 0]
        assert len(free) == 1
        assert free[0].n_derivs == n - 1
        assert free[0].coeff == Coefficient.monomial(n - 1)
        assert all(t.n_collisions >= 1 for t in e.terms if t is not free[0])

    @pytest.mark.parametrize("n", range(1, N_MAX + 1))
    def test_closure_and_output(self, n):
        e = build_w(n, 1)
        assert e.slots == tuple(range(1, n + 1))
        assert e.outputs == (1,)
        for t in e.terms:
            assert t.coeff.as_monomial() == (t.n_derivs % 4, t.n_collisions)
            assert 2 * t.n_collisions + t.n_derivs == n - 1

    def test_w5_traces_follow_recursion(self):
        lead = build_w(5, 1).terms[0]
        assert lead.pipeline == (Deriv(1),) * 4 + tuple(PTrace(a) for a in (2, 3, 4, 5))

    def test_canonical(self):
        e = build_w(6, 1)
        assert normalize(e) == e
        assert len({t.pipeline for t in e.terms}) == e.term_count
        assert list(e.terms) == sorted(e.terms, key=OperatorTerm.sort_key)


class TestAlgebra:
    def test_normalize_idempotent(self):
        e = OperatorExpr((1, 2, 3), (OperatorTerm(KAPPA, (PTrace(3), Collision(1, 2))),
                                     OperatorTerm(ONE, (PTrace(3), PTrace(2), Deriv(1)))))
        assert normalize(normalize(e)) == normalize(e)

    def test_trace_order(self):
        a = make_expr((1, 2, 3), [OperatorTerm(ONE, (PTrace(3), PTrace(2)))])
        b = make_expr((1, 2, 3), [OperatorTerm(ONE, (PTrace(2), PTrace(3)))])
        assert a == b
        assert a.terms[0].pipeline == (PTrace(2), PTrace(3))

    def test_like_terms_merge(self):
        t = OperatorTerm(KAPPA, (Collision(1, 2),))
        assert make_expr((1, 2), [t, t]).terms == (OperatorTerm(KAPPA + KAPPA, (Collision(1, 2),)),)

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_cancel(self, n):
        e = build_w(n, 1)
        assert (e - e).terms == ()
        assert (e + e.scale(-ONE)).terms == ()

    def test_mismatched_survivors(self):
        with pytest.raises(SlotLifetimeError):
            make_expr((1, 2), [OperatorTerm(ONE, (PTrace(2),)), OperatorTerm(ONE, ())])

    def test_tensor_identity(self):
        assert tensor(build_w(1, 1), build_w(1, 2)) == identity((1, 2))

    def test_tensor_count(self):
        assert tensor(build_w(3, 1), build_w(3, 4)).term_count == 4

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 3))
    def test_tensor_counts_multiply(self, a, b, c):
        e = tensor(tensor(build_w(a, 1), build_w(b, 1 + a)), build_w(c, 1 + a + b))
        f = tensor(build_w(a, 1), tensor(build_w(b, 1 + a), build_w(c, 1 + a + b)))
        assert e == f
        assert e.term_count == build_w(a).term_count * build_w(b).term_count * build_w(c).term_count
        assert e.outputs == (1, 1 + a, 1 + a + b)

    def test_tensor_overlap(self):
        with pytest.raises(OperatorError):
            tensor(build_w(2, 1), build_w(2, 2))
