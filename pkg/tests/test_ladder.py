import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gph.ladder import (
    DRIFT_TOLERANCES, LadderReport, conserved_integral, conserved_integrals, drift_tolerance, ladder_report,
    structural_check, w_arrays, w_sequence,
)
from gph.propagator import EvolveParams, evolve, gaussian_ic
from gph.spectral import WaveField, derivative, l2_norm, make_grid, quadrature

from conftest import packet_field, packets


@pytest.fixture(scope="module")
def sech256(grid256):
    return WaveField(grid256, 1 / np.cosh(grid256.x))


@pytest.fixture(scope="module")
def soliton_run():
    g = make_grid(512, 20.0)
    phi = WaveField(g, 1 / np.cosh(g.x))
    return ladder_report(evolve(phi, EvolveParams(-1, 1e-3, 1.0, record_every=100)), 6, -1)


class TestW:
    def test_first_two(self, gauss256):
        w = w_sequence(gauss256, 2, -1)
        assert np.array_equal(w[0].values, gauss256.values)
        assert np.max(np.abs(w[1].values + 1j * derivative(gauss256, 1).values)) < 1e-15

    @pytest.mark.parametrize("kappa", [-1, 1])
    def test_third(self, sech256, kappa):
        phi = sech256.values
        direct = -derivative(sech256, 2).values + kappa * np.abs(phi) ** 2 * phi
        assert np.max(np.abs(w_sequence(sech256, 3, kappa)[2].values - direct)) < 1e-10

    @pytest.mark.parametrize("n", [0, 9])
    def test_range(self, gauss256, n):
        with pytest.raises(ValueError):
            w_sequence(gauss256, n, -1)
        with pytest.raises(ValueError):
            conserved_integral(gauss256, n, -1)


class TestKnownValues:
    def test_mass(self, gauss256):
        assert abs(conserved_integral(gauss256, 1, -1) - 1) < 1e-12

    def test_momentum_real_even(self, gauss256):
        assert abs(conserved_integral(gauss256, 2, -1)) < 1e-10

    def test_energy_sech(self, sech256):
        assert abs(conserved_integral(sech256, 3, -1) - (-2 / 3)) < 1e-8

    def test_vectorized_matches_single(self, sech256):
        many = conserved_integrals(sech256, 8, -1)
        for n in range(1, 9):
            assert many[n - 1] == conserved_integral(sech256, n, -1)

    def test_consistency(self, sech256):
        w = w_sequence(sech256, 5, 1)[4]
        assert conserved_integral(sech256, 5, 1) == quadrature(w * sech256.conj())


@settings(max_examples=25)
@given(packets, st.floats(0, 2 * np.pi), st.sampled_from([-1, 1]))
def test_phase_invariance(params, theta, kappa):
    f = packet_field(make_grid(256, 20.0), params)
    a = conserved_integrals(f, 8, kappa)
    b = conserved_integrals(f * np.exp(1j * theta), 8, kappa)
    # round-off is set by the size of the integrand, not of I_n (which may nearly cancel)
    scale = [f.grid.dx * np.sum(np.abs(w * np.conj(f.values))) for w in w_arrays(f.values, f.grid, 8, kappa)]
    assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1.0, scale))


@settings(max_examples=25)
@given(packets, st.sampled_from([-1, 1]))
def test_low_levels_real(params, kappa):
    vals = conserved_integrals(packet_field(make_grid(256, 20.0), params), 3, kappa)
    assert vals[0].real >= 0 and abs(vals[0].imag) < 1e-10
    assert np.all(np.abs(vals[1:].imag) < 1e-8 * (1 + np.abs(vals[1:])))


class TestReport:
    def test_constant_trajectory(self, gauss256):
        rep = ladder_report([(0.0, gauss256), (0.5, gauss256), (1.0, gauss256)], 6, -1)
        assert np.all(rep.drift == 0)
        assert all(ok for *_, ok in rep.check())

    def test_soliton_drift(self, soliton_run):
        assert np.all(soliton_run.drift[:3] < 1e-7)
        assert np.all(soliton_run.drift < 1e-5)

    def test_empty(self):
        with pytest.raises(ValueError):
            ladder_report([], 3, -1)

    def test_csv(self, soliton_run):
        text = soliton_run.to_csv()
        assert "\r\n" in text
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["t"] + [f"{p}_I{n}" for n in range(1, 7) for p in ("re", "im")]
        assert len(rows) == 1 + len(soliton_run.times)
        assert float(rows[-1][0]) == 1.0
        assert complex(float(rows[1][5]), float(rows[1][6])) == soliton_run.values[0, 2]

    def test_json(self, soliton_run):
        doc = json.loads(soliton_run.to_json())
        assert doc["times"] == list(soliton_run.times)
        assert doc["drift"] == pytest.approx(list(soliton_run.drift), abs=0)
        assert len(doc["values"][0]) == 6

    def test_tolerance_policy(self):
        assert [drift_tolerance(n) for n in range(1, 9)] == [1e-7] * 3 + [1e-5] * 3 + [1e-3] * 2
        assert DRIFT_TOLERANCES[0] == (1, 3, 1e-7)
        with pytest.raises(ValueError):
            drift_tolerance(9)

    def test_check_flags_failures(self):
        rep = LadderReport(np.array([0.0, 1.0]), np.array([[1.0, 0.0], [1.0 + 1e-6, 0.0]], dtype=complex))
        assert [ok for *_, ok in rep.check()] == [False, True]


def test_drift_converges_at_second_order(grid512):
    # a stationary soliton superconverges; generic data shows the Strang rate
    phi = gaussian_ic(grid512, velocity=0.3) * 1.2

    def drift(dt):
        return ladder_report(evolve(phi, EvolveParams(-1, dt, 1.0, record_every=int(round(0.1 / dt)))), 6, -1).drift

    ratio = drift(0.01) / drift(0.005)
    assert np.all((3.5 < ratio[2:]) & (ratio[2:] < 4.5))


class TestStructural:
    def test_mass(self, gauss256):
        lead, rest = structural_check(gauss256, 1, -1)
        assert lead == pytest.approx(l2_norm(gauss256) ** 2, abs=1e-13)
        assert abs(rest) < 1e-13

    def test_sech_energy(self, sech256):
        lead, rest = structural_check(sech256, 3, -1)
        assert lead == pytest.approx(2 / 3, abs=1e-8)
        assert rest == pytest.approx(-4 / 3, abs=1e-8)

    @pytest.mark.parametrize("n", [2, 9, -1])
    def test_rejects(self, gauss256, n):
        with pytest.raises(ValueError):
            structural_check(gauss256, n, -1)

    def test_amplitude_sweep_envelope(self, grid256):
        # |kappa int |phi|^4| <= ||phi||_inf^2 ||phi||^2 <= ||phi||^3 ||phi'||
        base = gaussian_ic(grid256, width=1.3)
        for a in np.linspace(0.1, 2.0, 20):
            f = base * a
            _, rest = structural_check(f, 3, -1)
            bound = l2_norm(f) ** 3 * l2_norm(derivative(f, 1))
            assert abs(rest) <= bound
            assert rest / a ** 4 == pytest.approx(structural_check(base, 3, -1)[1], rel=1e-10)

    def test_degree_five_remainder_polynomial(self, grid256):
        # remainder of I_5 is a polynomial in the amplitude with degrees 4 and 6 only
        base = gaussian_ic(grid256, width=1.3, velocity=0.4)
        amps = np.array([0.3, 0.7, 1.1, 1.6])
        rest = np.array([structural_check(base * a, 5, 1)[1] for a in amps])
        coef, *_ = np.linalg.lstsq(np.stack([amps ** 4, amps ** 6], axis=1), rest, rcond=None)
        fit = coef[0] * amps ** 4 + coef[1] * amps ** 6
        assert np.max(np.abs(fit - rest)) < 1e-10 * np.max(np.abs(rest))
