import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from qdl import (
    ModelParams,
    SpectralDensity,
    amplitudes_to_density,
    correlation_kernel,
    kernel_laplace,
    lorentzian_j,
    population,
)
from qdl.errors import DomainError, HermiticityError, InvalidAmplitudesError, UnsupportedParametersError
from qdl.model import dissipator_super, lowering, unvec, vec

from conftest import fourier_kernel


def laplace_quadrature(s, sd):
    val, _ = integrate.quad(lambda t: sd.kernel(t) * math.exp(-s * t), 0, np.inf, epsabs=1e-13, epsrel=1e-12)
    return val


class TestLorentzian:
    def test_peak(self):
        sd = SpectralDensity(1.0, 1.0)
        assert lorentzian_j(sd.center, sd) == pytest.approx(1 / (2 * math.pi), rel=1e-15)

    def test_half_maximum(self):
        sd = SpectralDensity(1.0, 1.0)
        assert lorentzian_j(sd.center + 1.0, sd) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
        assert lorentzian_j(sd.center - 1.0, sd) == pytest.approx(1 / (4 * math.pi), rel=1e-15)

    def test_total_weight_equals_kernel_at_zero(self):
        sd = SpectralDensity(1.0, 2.0)
        val, _ = integrate.quad(lambda w: lorentzian_j(w, sd), -np.inf, np.inf, epsabs=1e-13)
        assert val == pytest.approx(1.0, abs=1e-9)
        assert val == pytest.approx(correlation_kernel(0.0, sd), abs=1e-9)

    @given(st.floats(-1e3, 1e3), st.floats(0.01, 10), st.floats(0.01, 100))
    def test_nonnegative(self, w, gamma, lam):
        assert lorentzian_j(w, SpectralDensity(gamma, lam)) >= 0

    @pytest.mark.parametrize("gamma,lam", [(-1, 1), (1, 0), (1, -2), (float("nan"), 1)])
    def test_invalid(self, gamma, lam):
        with pytest.raises(DomainError):
            SpectralDensity(gamma, lam)


class TestKernel:
    def test_values(self):
        assert correlation_kernel(0.0, SpectralDensity(1, 1)) == pytest.approx(0.5)
        assert correlation_kernel(0.1, SpectralDensity(1, 10)) == pytest.approx(5 * math.exp(-1), rel=1e-14)
        assert 5 * math.exp(-1) == pytest.approx(1.83940, abs=1e-5)

    def test_matches_fourier_quadrature(self):
        sd = SpectralDensity(1.0, 2.0)
        assert fourier_kernel(0.3, sd) == pytest.approx(correlation_kernel(0.3, sd), abs=1e-8)

    @given(st.floats(-50, 50), st.floats(0.01, 5), st.floats(0.01, 50))
    def test_even_and_bounded(self, tau, gamma, lam):
        sd = SpectralDensity(gamma, lam)
        f = correlation_kernel(tau, sd)
        assert f == correlation_kernel(-tau, sd)
        assert abs(f) <= correlation_kernel(0.0, sd) == pytest.approx(gamma * lam / 2)


class TestKernelLaplace:
    def test_zero_frequency_quadrature(self):
        sd = SpectralDensity(1, 1)
        assert laplace_quadrature(0.0, sd) == pytest.approx(0.5, abs=1e-10)
        assert kernel_laplace(0, sd) == pytest.approx(0.5, abs=1e-15)

    def test_substitution_and_decay(self):
        assert kernel_laplace(4, SpectralDensity(1, 4)) == pytest.approx(0.25)
        assert abs(kernel_laplace(1e6, SpectralDensity(1, 1))) == pytest.approx(5e-7, rel=1e-5)

    @pytest.mark.parametrize("lam", [0.05, 1.0, 20.0])
    @pytest.mark.parametrize("factor", [0.1, 1, 10])
    def test_matches_quadrature(self, lam, factor):
        sd = SpectralDensity(0.7, lam)
        s = factor * lam
        assert kernel_laplace(s, sd) == pytest.approx(laplace_quadrature(s, sd), abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            kernel_laplace(-1.0, SpectralDensity(1, 1))
        with pytest.raises(DomainError):
            kernel_laplace(-2 + 3j, SpectralDensity(1, 1))


class TestHatWeights:
    @pytest.mark.parametrize("lam,h", [(1.0, 0.1), (10.0, 0.005), (0.01, 0.05), (1000.0, 0.01), (3.0, 1e-5)])
    def test_against_quadrature(self, lam, h):
        sd = SpectralDensity(1.3, lam)
        alpha, beta = sd.lag_weights(h, 5)
        for m in range(1, 6):
            qa, _ = integrate.quad(lambda s: sd.kernel(m * h - s) * (1 - s / h), 0, h, epsabs=1e-16, epsrel=1e-13)
            qb, _ = integrate.quad(lambda s: sd.kernel(m * h - s) * (s / h), 0, h, epsabs=1e-16, epsrel=1e-13)
            assert alpha[m] == pytest.approx(qa, rel=1e-10, abs=1e-18)
            assert beta[m] == pytest.approx(qb, rel=1e-10, abs=1e-18)

    def test_series_branch_is_continuous(self):
        sd = SpectralDensity(1.0, 1.0)
        below = sd.interval_weights(0.01 * (1 - 1e-9), 0.0)
        above = sd.interval_weights(0.01 * (1 + 1e-9), 0.0)
        assert np.allclose(below, above, rtol=1e-8)


class TestDensity:
    def test_pure_10(self):
        assert np.array_equal(amplitudes_to_density(1, 0), np.diag([0, 1, 0, 0]).astype(complex))

    def test_bell(self):
        r = 1 / math.sqrt(2)
        rho = amplitudes_to_density(r, -r)
        assert population(rho, "10") == pytest.approx(0.5)
        assert population(rho, "01") == pytest.approx(0.5)
        assert rho[1, 2] == pytest.approx(-0.5)
        assert population(rho, "00") == pytest.approx(0.0, abs=1e-15)

    def test_mixed(self):
        rho = amplitudes_to_density(0.6, 0.4j)
        assert population(rho, "10") == pytest.approx(0.36)
        assert population(rho, "01") == pytest.approx(0.16)
        assert population(rho, "00") == pytest.approx(0.48)
        assert rho[1, 2] == pytest.approx(-0.24j)

    def test_excess_rejected(self):
        with pytest.raises(InvalidAmplitudesError):
            amplitudes_to_density(1.0, 0.01)

    def test_population_lookup(self):
        assert population(np.diag([0, 1, 0, 0]).astype(complex), "10") == 1.0
        assert population(np.diag([0, 0.3, 0.3, 0.4]).astype(complex), "00") == pytest.approx(0.4)
        bad = np.diag([0, 1, 0, 0]).astype(complex)
        bad[1, 1] += 1e-6j
        with pytest.raises(HermiticityError):
            population(bad, "10")

    @settings(max_examples=200)
    @given(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
           st.floats(0, 1))
    def test_physical_state(self, a, b, scale):
        norm = math.hypot(abs(a), abs(b))
        if norm < 1e-6:
            return
        a, b = a / norm * math.sqrt(scale), b / norm * math.sqrt(scale)
        rho = amplitudes_to_density(a, b)
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-15
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho).min() >= -1e-12
        assert abs(population(rho, "10") - abs(a) ** 2) <= 1e-14


class TestParams:
    def test_normalization(self):
        with pytest.raises(InvalidAmplitudesError):
            ModelParams.symmetric(1, 1, 0.1, 0.5, 0.5)

    def test_negative_coupling(self):
        with pytest.raises(DomainError):
            ModelParams.symmetric(1, 1, -0.1)

    def test_detuned_bath_rejected(self):
        with pytest.raises(UnsupportedParametersError):
            ModelParams(0.1, SpectralDensity(1, 1, 50.0), SpectralDensity(1, 1), 1, 0)


def test_dissipator_decays_excited_population():
    rho = np.diag([0, 1, 0, 0]).astype(complex)
    out = unvec(dissipator_super(1) @ vec(rho))
    lo = lowering(1)
    manual = 2 * lo @ rho @ lo.conj().T - lo.conj().T @ lo @ rho - rho @ lo.conj().T @ lo
    assert np.allclose(out, manual)
    assert out[1, 1] == -2 and out[3, 3] == 2
