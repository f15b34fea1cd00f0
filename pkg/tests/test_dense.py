import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gph.dense import (
    MAX_ELEMENTS, DenseKernel, MemoryGuardError, apply_primitive_dense, check_size, densify, oracle_check,
    oracle_check_terms, trace_dense,
)
from gph.operators import Collision, Deriv, PTrace, build_w, tensor
from gph.propagator import gaussian_ic, random_packet
from gph.separable import Ensemble, apply_primitive, ensemble_state, product_state, trace
from gph.spectral import make_grid

from conftest import unit_soliton

G32 = make_grid(32, 6.0)
G16 = make_grid(16, 6.0)


def gauss(grid, **kw):
    return gaussian_ic(grid, center=0.2, velocity=0.7, **kw)


def states(grid, k, seed=0):
    rnd = random_packet(grid, np.random.default_rng(seed))
    mix = Ensemble(((0.4, gauss(grid)), (0.6, rnd)))
    return [product_state(gauss(grid), k), product_state(unit_soliton(grid, 1.0, 0.5, 0.3), k),
            product_state(rnd, k), ensemble_state(mix, k)]


class TestDensify:
    def test_rank_one(self):
        phi = gauss(G32).values
        d = densify(product_state(gauss(G32), 1))
        assert np.max(np.abs(d.values - np.outer(phi, np.conj(phi)))) < 1e-16

    def test_shape(self):
        assert densify(product_state(gauss(G32), 2)).values.shape == (32,) * 4

    def test_linear(self):
        a, b = states(G16, 2)[:2]
        lhs = densify(a + b.scale(2j)).values
        rhs = densify(a).values + 2j * densify(b).values
        assert np.max(np.abs(lhs - rhs)) < 1e-15

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_hermitian(self, k):
        v = densify(states(G16, k)[3]).values
        perm = list(range(k, 2 * k)) + list(range(k))
        assert np.max(np.abs(v - np.conj(v.transpose(perm)))) < 1e-16


class TestGuard:
    def test_limit(self):
        check_size(16, 3)
        check_size(64, 2)
        with pytest.raises(MemoryGuardError):
            check_size(64, 3)
        with pytest.raises(MemoryGuardError):
            densify(product_state(gauss(make_grid(128, 6.0)), 2))
        assert 16 ** 6 <= MAX_ELEMENTS < 64 ** 6

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            DenseKernel(G16, (1, 2), np.zeros((16, 16)))

    def test_dead_label(self):
        d = densify(product_state(gauss(G16), 1))
        with pytest.raises(KeyError):
            apply_primitive_dense(PTrace(2), d)


class TestPrimitives:
    def test_trace_is_mass(self):
        f = gauss(G32, amplitude=1.3)
        d = DenseKernel(G32, (1,), np.outer(f.values, np.conj(f.values)))
        out = apply_primitive_dense(PTrace(1), d)
        assert out.live_labels == ()
        assert complex(out.values) == pytest.approx(G32.dx * np.sum(np.abs(f.values) ** 2), rel=1e-14)

    def test_collision_matches_loops(self):
        # delta = Kronecker / dx, two integrals: gamma(x, x; x', x)
        rng = np.random.default_rng(1)
        v = rng.normal(size=(16,) * 4) + 1j * rng.normal(size=(16,) * 4)
        out = apply_primitive_dense(Collision(1, 2), DenseKernel(G16, (1, 2), v)).values
        want = np.empty((16, 16), dtype=complex)
        for a in range(16):
            for ap in range(16):
                want[a, ap] = v[a, a, ap, a]
        assert np.array_equal(out, want)

    def test_collision_source_first(self):
        rng = np.random.default_rng(2)
        v = rng.normal(size=(16,) * 4) + 0j
        out = apply_primitive_dense(Collision(2, 1), DenseKernel(G16, (1, 2), v))
        assert out.live_labels == (2,)
        assert out.values[3, 5] == v[3, 3, 3, 5]

    @pytest.mark.parametrize("p", [Collision(1, 2), Collision(2, 1), Deriv(1), Deriv(2), PTrace(1)])
    def test_commutes_with_densify(self, p):
        for s in states(G32, 2):
            via_sep = densify(apply_primitive(p, s)).values
            via_dense = apply_primitive_dense(p, densify(s)).values
            assert np.max(np.abs(via_sep - via_dense)) < 1e-10

    @pytest.mark.parametrize("k", [1, 2])
    def test_trace_agreement(self, k):
        for s in states(G32, k):
            assert abs(trace_dense(densify(s)) - trace(s)) < 1e-10


class TestOracle:
    def test_identity(self):
        assert oracle_check(build_w(1, 1), states(G32, 1)[0], -1) == 0.0

    def test_w2_gaussian(self):
        assert oracle_check(build_w(2, 1), states(G32, 2)[0], -1) < 1e-10

    def test_w3_soliton(self):
        assert oracle_check(build_w(3, 1), states(G16, 3)[1], -1) < 1e-8

    @pytest.mark.parametrize("kappa", [-1, 1])
    def test_every_term(self, kappa):
        for n, grid in ((1, G32), (2, G32), (3, G16)):
            for s in states(G16 if n == 3 else grid, n):
                gaps = oracle_check_terms(build_w(n, 1), s, kappa)
                assert len(gaps) == build_w(n, 1).term_count
                assert max(gaps) < 1e-8

    def test_shifted_base_with_spectator(self):
        for s in states(G32, 2):
            assert oracle_check(build_w(1, 2), s, -1) == 0.0
            assert oracle_check(build_w(2, 1), s, 1) < 1e-10

    def test_tensor_product(self):
        e = tensor(build_w(2, 1), build_w(1, 3))
        for s in states(G16, 3):
            assert oracle_check(e, s, -1) < 1e-8

    @settings(max_examples=3)
    @given(st.integers(0, 10 ** 6))
    def test_random_states(self, seed):
        s = product_state(random_packet(G16, np.random.default_rng(seed)), 3)
        assert max(oracle_check_terms(build_w(3, 1), s, -1)) < 1e-8
