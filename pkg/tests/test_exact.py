import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qdl import (
    ModelParams,
    SpectralDensity,
    build_partial_fractions,
    laplace_amplitudes,
    normal_mode_trajectories,
    solve_exact_laplace,
    solve_exact_ode,
)
from qdl.errors import PoleError, UnsupportedParametersError
from qdl.exact import uniform_grid

from conftest import random_params


def single_bath_params(gamma=1.0, lam=4.0):
    return ModelParams(0.0, SpectralDensity(gamma, lam), SpectralDensity(0.3, 5.0), 1.0, 0.0)


def damped_amplitude(t, gamma, lam):
    """a(t) for s^2 + lam s + gamma lam / 2 = 0 with a(0) = 1, a'(0) = 0."""
    disc = cmath.sqrt(lam**2 / 4 - gamma * lam / 2)
    p1, p2 = -lam / 2 + disc, -lam / 2 - disc
    return (p1 * np.exp(p2 * t) - p2 * np.exp(p1 * t)) / (p1 - p2)


class TestLaplaceAmplitudes:
    def test_decoupled_ignores_b0(self):
        p1 = ModelParams(0.0, SpectralDensity(1, 2), SpectralDensity(0.3, 5), 0.6, 0.8)
        p2 = ModelParams(0.0, SpectralDensity(1, 2), SpectralDensity(0.3, 5), 0.6, -0.8j)
        s = 0.7 + 0.2j
        a1, _ = laplace_amplitudes(s, p1)
        a2, _ = laplace_amplitudes(s, p2)
        assert a1 == a2 == pytest.approx(0.6 / (s + p1.bath1.laplace(s)))

    def test_swap_symmetry(self):
        b1, b2 = SpectralDensity(1, 2), SpectralDensity(0.3, 5)
        p = ModelParams(0.4, b1, b2, 0.6, 0.8j)
        q = ModelParams(0.4, b2, b1, 0.8j, 0.6)
        s = 1.3 - 0.4j
        a, b = laplace_amplitudes(s, p)
        a2, b2_ = laplace_amplitudes(s, q)
        assert a == pytest.approx(b2_, rel=1e-14) and b == pytest.approx(a2, rel=1e-14)

    def test_initial_value_theorem(self, rng):
        for _ in range(10):
            p = random_params(rng)
            a, b = laplace_amplitudes(1e6, p)
            assert abs(1e6 * a - p.a0) < 1e-4
            assert abs(1e6 * b - p.b0) < 1e-4

    def test_pole_raises(self):
        p = single_bath_params()
        with pytest.raises(PoleError):
            laplace_amplitudes(-2 + math.sqrt(2), p)


class TestPartialFractions:
    def test_single_bath_poles(self):
        pf = build_partial_fractions(single_bath_params())
        for target in (-2 + math.sqrt(2), -2 - math.sqrt(2)):
            k = np.argmin(np.abs(pf.poles - target))
            assert abs(pf.poles[k] - target) < 1e-12
            assert abs(pf.residues_a[k]) > 1e-3

    @pytest.mark.parametrize("gamma,lam,omega", [(1, 10, 0.001), (1, 1, 0.3), (0.5, 0.01, 0.001), (2, 20, 0.5)])
    def test_identical_baths_normal_mode_poles(self, gamma, lam, omega):
        pf = build_partial_fractions(ModelParams.bell(gamma, lam, omega))
        k = gamma * lam / 2
        expected = np.concatenate([np.roots([1, lam + 1j * omega, 1j * omega * lam + k]),
                                   np.roots([1, lam - 1j * omega, -1j * omega * lam + k])])
        for p in expected:
            assert np.min(np.abs(pf.poles - p)) < 1e-9
        for p in pf.poles:
            assert np.min(np.abs(expected - p)) < 1e-9

    def test_residue_sums_and_stability(self, rng):
        for _ in range(30):
            p = random_params(rng)
            pf = build_partial_fractions(p)
            assert abs(pf.residues_a.sum() - p.a0) < 1e-9
            assert abs(pf.residues_b.sum() - p.b0) < 1e-9
            assert np.all(pf.poles.real <= 1e-9)

    def test_decoupled_identical_baths_need_no_perturbation(self):
        p = ModelParams.symmetric(1.0, 1.0, 0.0, 0.6, 0.8)
        grid = uniform_grid(10, 201)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            lap = solve_exact_laplace(p, grid)
        ode = solve_exact_ode(p, grid)
        assert np.max(np.abs(lap.a - ode.a)) < 1e-9
        assert np.max(np.abs(lap.b - ode.b)) < 1e-9

    @pytest.mark.parametrize("omega", [0.0, 1e-12])
    def test_critically_damped_bath_warns(self, omega):
        p = ModelParams(omega, SpectralDensity(0.5, 1.0), SpectralDensity(1.0, 3.0), 0.6, 0.8)
        grid = uniform_grid(10, 201)
        with pytest.warns(RuntimeWarning, match="confluent"):
            lap = solve_exact_laplace(p, grid)
        ode = solve_exact_ode(p, grid)
        assert np.max(np.abs(lap.a - ode.a)) < 1e-5
        assert np.max(np.abs(lap.b - ode.b)) < 1e-5

    def test_confluent_poles_warn_and_stay_accurate(self):
        p = ModelParams(1e-9, SpectralDensity(1.0, 1.0), SpectralDensity(1.0, 1.0), 0.6, 0.8)
        grid = uniform_grid(10, 201)
        with pytest.warns(RuntimeWarning, match="confluent"):
            lap = solve_exact_laplace(p, grid)
        ode = solve_exact_ode(p, grid)
        assert np.max(np.abs(lap.a - ode.a)) < 1e-5
        assert np.max(np.abs(lap.b - ode.b)) < 1e-5

    def test_switched_off_bath_unsupported(self):
        p = ModelParams(0.2, SpectralDensity(0.0, 1.0), SpectralDensity(1.0, 1.0), 1, 0)
        with pytest.raises(UnsupportedParametersError):
            solve_exact_laplace(p, uniform_grid(1, 5))


class TestExactRoutes:
    def test_initial_values(self, rng):
        p = random_params(rng)
        for solve in (solve_exact_laplace, solve_exact_ode):
            traj = solve(p, uniform_grid(3, 31))
            assert abs(traj.a[0] - p.a0) < 1e-9 and abs(traj.b[0] - p.b0) < 1e-9

    def test_dual_route_fig1_regime(self):
        p = ModelParams.bell(1, 10, 0.001)
        grid = uniform_grid(5)
        lap = solve_exact_laplace(p, grid).to_density()
        ode = solve_exact_ode(p, grid).to_density()
        assert np.max(np.abs(lap.population("10") - ode.population("10"))) < 1e-8

    def test_rabi(self, backend):
        om = 0.25
        p = ModelParams(om, SpectralDensity(0, 1), SpectralDensity(0, 1), 1, 0)
        grid = np.linspace(0, math.pi / (2 * om), 101)
        traj = solve_exact_ode(p, grid)
        assert np.max(np.abs(np.abs(traj.a) ** 2 - np.cos(om * grid) ** 2)) < 1e-8
        assert abs(traj.a[-1]) ** 2 < 1e-8

    def test_antisymmetric_channel(self):
        p = ModelParams.bell(1, 1, 0.3)
        traj = solve_exact_ode(p, uniform_grid(20, 401))
        assert np.max(np.abs(traj.a + traj.b)) < 1e-10

    def test_markov_limit(self):
        p = ModelParams.bell(1, 1000, 0.001)
        grid = uniform_grid(5)
        p10 = np.abs(solve_exact_ode(p, grid).a) ** 2
        assert np.max(np.abs(p10 - 0.5 * np.exp(-grid))) < 0.01

    def test_damped_amplitude_closed_form(self):
        grid = uniform_grid(10, 501)
        p = single_bath_params(1.0, 4.0)
        expected = damped_amplitude(grid, 1.0, 4.0)
        assert np.max(np.abs(solve_exact_ode(p, grid).a - expected)) < 1e-8
        assert np.max(np.abs(solve_exact_laplace(p, grid).a - expected)) < 1e-8

    def test_error_estimate_contract(self):
        p = ModelParams(0.3, SpectralDensity(1, 0.5), SpectralDensity(0.4, 3), 0.6, 0.8j)
        grid = uniform_grid(20, 201)
        coarse = solve_exact_ode(p, grid, rtol=1e-6, atol=1e-8)
        fine = solve_exact_ode(p, grid, rtol=5e-7, atol=5e-9)
        change = np.max(np.abs(np.abs(coarse.a) ** 2 - np.abs(fine.a) ** 2))
        assert 0 < change < coarse.error_estimate

    def test_bath_occupation_bounds(self, rng):
        for _ in range(5):
            traj = solve_exact_ode(random_params(rng), uniform_grid(10, 201))
            occ = traj.bath_occupation
            assert occ.min() >= -1e-9 and occ.max() <= 1

    def test_short_time_quadratic_onset(self):
        pf = build_partial_fractions(ModelParams.bell(1, 10, 0.001))
        h = 1e-4
        a, _ = pf.evaluate(np.array([-h, h]))
        slope = (abs(a[1]) ** 2 - abs(a[0]) ** 2) / (2 * h)
        assert abs(slope) < 1e-6

    @pytest.mark.parametrize("phase", [0.0, 1.0, 2.5])
    def test_decoupled_a_independent_of_b0_phase(self, phase):
        base = ModelParams(0.0, SpectralDensity(1, 2), SpectralDensity(0.3, 5), 0.6, 0.8)
        other = ModelParams(0.0, SpectralDensity(1, 2), SpectralDensity(0.3, 5), 0.6, 0.8 * cmath.exp(1j * phase))
        grid = uniform_grid(5, 51)
        assert np.max(np.abs(solve_exact_ode(base, grid).a - solve_exact_ode(other, grid).a)) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(
    st.floats(0.1, 2), st.floats(0.05, 20), st.floats(0.1, 2), st.floats(0.05, 20), st.floats(0, 0.5),
    st.floats(0, 2 * math.pi), st.floats(0, math.pi / 2),
)
def test_dual_route_property(g1, l1, g2, l2, om, phase, mix):
    p = ModelParams(om, SpectralDensity(g1, l1), SpectralDensity(g2, l2), math.cos(mix), math.sin(mix) * cmath.exp(1j * phase))
    grid = uniform_grid(8, 81)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        lap = solve_exact_laplace(p, grid).to_density()
    # perturbed confluent sets are covered separately with their own tolerance
    assume(not caught)
    ode = solve_exact_ode(p, grid).to_density()
    assert np.max(np.abs(lap.population("10") - ode.population("10"))) < 1e-7
    assert np.max(np.abs(lap.population("01") - ode.population("01"))) < 1e-7
    assert np.max(np.abs(lap.coherence() - ode.coherence())) < 1e-7


class TestNormalModes:
    def test_bell(self):
        u, v = normal_mode_trajectories(ModelParams.bell(1, 1, 0.01), uniform_grid(10, 201))
        assert np.max(np.abs(u)) < 1e-12
        assert abs(abs(v[0]) - math.sqrt(2)) < 1e-12

    def test_single_excitation(self):
        p = ModelParams.symmetric(1, 2, 0.3, 1, 0)
        grid = uniform_grid(10, 201)
        u, v = normal_mode_trajectories(p, grid)
        assert u[0] == pytest.approx(1) and v[0] == pytest.approx(1)
        traj = solve_exact_ode(p, grid)
        lhs = np.abs(u) ** 2 + np.abs(v) ** 2
        assert np.allclose(lhs, 2 * (np.abs(traj.a) ** 2 + np.abs(traj.b) ** 2), atol=1e-13)

    def test_requires_identical_baths(self):
        p = ModelParams(0.1, SpectralDensity(1, 2), SpectralDensity(1, 3), 1, 0)
        with pytest.raises(UnsupportedParametersError):
            normal_mode_trajectories(p, uniform_grid(1, 5))
