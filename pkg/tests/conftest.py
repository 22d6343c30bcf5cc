import functools
import math

import numpy as np
import pytest
from scipy import integrate

from qdl import ModelParams, SpectralDensity
from qdl import _backend


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request):
    with _backend.use(request.param) as kern:
        yield kern


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_params(rng, omega_max=0.5):
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= np.linalg.norm(z)
    b1 = SpectralDensity(rng.uniform(0.1, 2), math.exp(rng.uniform(math.log(0.05), math.log(20))))
    b2 = SpectralDensity(rng.uniform(0.1, 2), math.exp(rng.uniform(math.log(0.05), math.log(20))))
    return ModelParams(rng.uniform(0, omega_max), b1, b2, z[0], z[1])


REGIMES = {"fig1": (10.0, 5.0), "fig2": (1.0, 20.0), "fig3": (0.01, 300.0)}


@functools.lru_cache(maxsize=None)
def regime_trajectories(regime):
    """Exact, NZ (both routes), TCL and Markov P10 runs of one preset, computed once."""
    from qdl import NzOptions, solve_exact_ode, solve_markov, solve_nz, solve_tcl
    from qdl.exact import uniform_grid

    lam, t_max = REGIMES[regime]
    p = ModelParams.bell(1.0, lam, 0.001)
    grid = uniform_grid(t_max)
    return {
        "exact": solve_exact_ode(p, grid).to_density(),
        "nz": solve_nz(p, grid),
        "nz_volterra": solve_nz(p, grid, NzOptions(route="volterra")),
        "tcl": solve_tcl(p, grid),
        "markov": solve_markov(p, grid),
    }


def fourier_kernel(tau, sd):
    """Full-line quadrature of J(w) exp(i (w0 - w) tau); J is even about w0."""
    def weight(x):
        return sd.spectral_density(sd.center - x)

    if tau == 0:
        val, _ = integrate.quad(weight, 0, np.inf, epsabs=1e-13)
    else:
        val, _ = integrate.quad(weight, 0, np.inf, weight="cos", wvar=abs(tau), limlst=200)
    return 2 * val
