"""Time-local master equations: second-order TCL and the Markovian baseline.

The TCL equation follows from the NZ equation by replacing rho(t') with
rho(t) under the memory integrals, so the rates become kernel integrals
``Gamma_j(t) = int_0^t f_j`` and the system term picks up the weight ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .integrate import ATOL, RTOL, constant, solve_linear
from .model import (
    DensityTrajectory,
    ModelParams,
    coherent_super,
    dissipator_super,
    exchange_hamiltonian,
    unvec,
    vec,
)
from .nz import COHERENT_MODES, system_superoperators, with_source


@dataclass(frozen=True)
class TclRates:
    t: float
    rate1: complex
    rate2: complex
    system_weight: float


def tcl_rates(t: float, params: ModelParams) -> TclRates:
    if t < 0:
        raise DomainError("t must be non-negative")
    return TclRates(
        t,
        complex(params.bath1.kernel_integral(t)),
        complex(params.bath2.kernel_integral(t)),
        float(t),
    )


def tcl_terms(params: ModelParams, mode: str):
    """Generator terms ``(matrix, (a, b, d, r))`` of the TCL equation."""
    local, source, dcomm, diss = system_superoperators(params, mode)
    terms = [constant(local), (-dcomm, (0.0, 1.0, 0.0, 0.0))]
    for bath, d in zip(params.baths, diss):
        # Gamma(t) = gamma/2 - gamma/2 exp(-lambda t)
        half = 0.5 * bath.gamma
        terms.append((d, (half, 0.0, -half, bath.lam)))
    return terms, source


def solve_tcl(params: ModelParams, grid, coherent_mode: str = "literal_paper", rtol=RTOL, atol=ATOL) -> DensityTrajectory:
    if coherent_mode not in COHERENT_MODES:
        raise ConfigError(f"coherent_mode must be one of {COHERENT_MODES}")
    terms, source = tcl_terms(params, coherent_mode)
    y0 = vec(params.initial_density())
    if np.any(source):
        terms = [(with_source(m, np.zeros(16)), c) for m, c in terms]
        terms.append(constant(with_source(np.zeros((16, 16)), source)))
        y0 = np.append(y0, 1.0)
    sol = solve_linear(terms, y0, grid, rtol, atol)
    return DensityTrajectory(sol.times, unvec(sol.y[:, :16]), "tcl", 2 * sol.error_sum)


def markov_generator(params: ModelParams) -> np.ndarray:
    gen = coherent_super(exchange_hamiltonian(params.omega_coupling))
    for j, bath in enumerate(params.baths, start=1):
        gen = gen + 0.5 * bath.gamma * dissipator_super(j)
    return gen


def solve_markov(params: ModelParams, grid, rtol=RTOL, atol=ATOL) -> DensityTrajectory:
    """Lindblad dynamics with the asymptotic rates gamma_j / 2."""
    sol = solve_linear([constant(markov_generator(params))], vec(params.initial_density()), grid, rtol, atol)
    return DensityTrajectory(sol.times, unvec(sol.y), "markov", 2 * sol.error_sum)
