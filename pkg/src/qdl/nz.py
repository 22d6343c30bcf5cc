"""Second-order Nakajima-Zwanzig master equation for the two-qubit state.

    rho'(t) = coherent term
              - int_0^t [H_s, [H_s, rho(t')]] dt'
              + sum_j int_0^t f_j(t - t') D_j rho(t') dt'

with ``D_j rho = [s-_j rho, s+_j] + [s-_j, rho s+_j]``.  The coherent term is
``-i [H_s, rho(0)]`` (``literal_paper``) or ``-i [H_s, rho(t)]``
(``standard``).  Two routes integrate it:

* ``auxiliary_ode``: for the exponential kernel the memory integrals
  ``X_j = int e^{-lambda_j (t - t')} rho(t') dt'`` and ``M = int rho dt'``
  obey local linear equations, so the extended system is integrated exactly
  by the adaptive stepper.
* ``volterra``: implicit trapezoid march with product-trapezoid memory
  weights, summing the whole stored history at every step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConfigError, DomainError, HistoryOverflowError, MissingHistoryError
from .integrate import ATOL, RTOL, constant, solve_linear
from .model import (
    DensityTrajectory,
    ModelParams,
    coherent_super,
    dissipator_super,
    double_commutator_super,
    exchange_hamiltonian,
    unvec,
    vec,
)

COHERENT_MODES = ("literal_paper", "standard")
NZ_ROUTES = ("auxiliary_ode", "volterra")
MAX_HISTORY = 1_000_000
STEP_FRACTION = 20


@dataclass(frozen=True)
class NzOptions:
    coherent_term_mode: str = "literal_paper"
    route: str = "auxiliary_ode"
    step: float | None = None
    rtol: float = RTOL
    atol: float = ATOL

    def __post_init__(self):
        if self.coherent_term_mode not in COHERENT_MODES:
            raise ConfigError(f"coherent_term_mode must be one of {COHERENT_MODES}")
        if self.route not in NZ_ROUTES:
            raise ConfigError(f"route must be one of {NZ_ROUTES}")
        if self.step is not None and not self.step > 0:
            raise ConfigError("quadrature step must be positive")


def max_volterra_step(params: ModelParams) -> float:
    scales = [1 / params.bath1.lam, 1 / params.bath2.lam]
    if params.omega_coupling > 0:
        scales.append(1 / params.omega_coupling)
    return min(scales) / STEP_FRACTION


def default_volterra_step(params: ModelParams) -> float:
    """Largest admissible step, further capped by the decay rates."""
    step = max_volterra_step(params)
    gmax = max(params.bath1.gamma, params.bath2.gamma)
    if gmax > 0:
        step = min(step, 1 / gmax / STEP_FRACTION)
    return step


def system_superoperators(params: ModelParams, mode: str):
    """(local generator, constant source, double commutator, dissipators)."""
    h_s = exchange_hamiltonian(params.omega_coupling)
    coh = coherent_super(h_s)
    if mode == "standard":
        local, source = coh, np.zeros(16, dtype=complex)
    elif mode == "literal_paper":
        local, source = np.zeros((16, 16), dtype=complex), coh @ vec(params.initial_density())
    else:
        raise ConfigError(f"unknown coherent mode {mode!r}")
    return local, source, double_commutator_super(h_s), (dissipator_super(1), dissipator_super(2))


def nz_memory_terms(history: DensityTrajectory, params: ModelParams, t: float) -> np.ndarray:
    """Memory part of the NZ generator at time ``t`` from a stored history.

    The history is interpolated linearly between its grid points and each
    interval is integrated exactly against the kernels.
    """
    times = np.asarray(history.times, dtype=float)
    if t < 0:
        raise DomainError("t must be non-negative")
    if times.size == 0 or times[0] > 0 or t > times[-1] * (1 + 1e-12) + 1e-300:
        raise MissingHistoryError(f"history does not cover [0, {t}]")
    states = history.states
    keep = times < t
    ts = times[keep]
    rhos = states[keep]
    end = np.array([interp_state(times, states, t)])
    ts = np.concatenate([ts, [t]])
    rhos = np.concatenate([rhos, end])
    if ts.size < 2:
        return np.zeros((4, 4), dtype=complex)
    h = np.diff(ts)
    dist = t - ts[1:]
    rv = rhos.reshape(-1, 16)
    _, _, dcomm, diss = system_superoperators(params, "standard")
    # constant kernel: plain trapezoid
    integral_const = 0.5 * (h[:, None] * (rv[:-1] + rv[1:])).sum(axis=0)
    out = -dcomm @ integral_const
    for bath, d in zip(params.baths, diss):
        left, right = bath.interval_weights(h, dist)
        out = out + d @ (left @ rv[:-1] + right @ rv[1:])
    return unvec(out)


def interp_state(times, states, t):
    i = np.searchsorted(times, t)
    if i < times.size and times[i] == t:
        return states[i]
    w = (t - times[i - 1]) / (times[i] - times[i - 1])
    return (1 - w) * states[i - 1] + w * states[i]


def _aux_generator(params, local, dcomm, diss):
    b1, b2 = params.baths
    eye = np.eye(16)
    zero = np.zeros((16, 16))
    return np.block(
        [
            [local, b1.strength * diss[0], b2.strength * diss[1], -dcomm],
            [eye, -b1.lam * eye, zero, zero],
            [eye, zero, -b2.lam * eye, zero],
            [eye, zero, zero, zero],
        ]
    ).astype(complex)


def with_source(generator, source):
    """Append a constant unit component that feeds ``source`` into the first block."""
    n = generator.shape[0]
    out = np.zeros((n + 1, n + 1), dtype=complex)
    out[:n, :n] = generator
    out[: source.size, n] = source
    return out


def _solve_auxiliary(params, grid, opts):
    local, source, dcomm, diss = system_superoperators(params, opts.coherent_term_mode)
    gen = _aux_generator(params, local, dcomm, diss)
    y0 = np.zeros(64, dtype=complex)
    y0[:16] = vec(params.initial_density())
    if np.any(source):
        gen = with_source(gen, source)
        y0 = np.append(y0, 1.0)
    sol = solve_linear([constant(gen)], y0, grid, opts.rtol, opts.atol)
    return unvec(sol.y[:, :16]), 2 * sol.error_sum


def volterra_weights(alpha, beta, nsteps):
    """Lag weights of the marching sum from per-interval hat weights.

    Returns ``(omega, alpha_end)``: ``omega[0]`` multiplies the newest state,
    ``omega[m]`` an interior history point at lag ``m``, and ``alpha_end[p]``
    the initial state at step ``p``.
    """
    omega = np.zeros(nsteps + 1)
    omega[0] = beta[1]
    omega[1:nsteps] = alpha[1:nsteps] + beta[2 : nsteps + 1]
    return omega, alpha[: nsteps + 1].copy()


def _solve_volterra(params, grid, opts):
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    if grid.size < 2:
        return unvec(vec(params.initial_density())[None, :]), 0.0
    if np.max(np.abs(dt - dt[0])) > 1e-9 * dt[0]:
        raise ConfigError("the volterra route needs a uniform time grid")
    step = opts.step if opts.step is not None else default_volterra_step(params)
    if step > max_volterra_step(params) * (1 + 1e-12):
        raise ConfigError(f"quadrature step {step:g} exceeds the bound {max_volterra_step(params):g}")
    sub = int(np.ceil(dt[0] / step - 1e-9))
    h = (grid[-1] - grid[0]) / ((grid.size - 1) * sub)
    nsteps = (grid.size - 1) * sub
    if nsteps > MAX_HISTORY:
        raise HistoryOverflowError(f"{nsteps} history points exceed the limit of {MAX_HISTORY}")

    local, source, dcomm, diss = system_superoperators(params, opts.coherent_term_mode)
    kernels, omegas, ends = [], [], []
    for bath, d in zip(params.baths, diss):
        alpha, beta = bath.lag_weights(h, nsteps + 1)
        om, end = volterra_weights(alpha, beta, nsteps)
        kernels.append(d)
        omegas.append(om)
        ends.append(end)
    flat = np.full(nsteps + 2, 0.5 * h)
    flat[0] = 0.0
    om, end = volterra_weights(flat, flat, nsteps)
    kernels.append(-dcomm)
    omegas.append(om)
    ends.append(end)

    kernels = np.ascontiguousarray(kernels, dtype=complex)
    omegas = np.ascontiguousarray(omegas, dtype=float)
    ends = np.ascontiguousarray(ends, dtype=float)
    effective = local + np.tensordot(omegas[:, 0], kernels, axes=1)
    implicit_inv = np.linalg.inv(np.eye(16) - 0.5 * h * effective)
    rho = _backend.active().volterra_march(
        np.ascontiguousarray(local, dtype=complex),
        np.ascontiguousarray(implicit_inv),
        np.ascontiguousarray(effective),
        kernels,
        omegas,
        ends,
        np.ascontiguousarray(source, dtype=complex),
        np.ascontiguousarray(vec(params.initial_density())),
        float(h),
        int(nsteps),
    )
    return unvec(np.asarray(rho)[::sub]), 0.0


def solve_nz(params: ModelParams, grid, opts: NzOptions | None = None) -> DensityTrajectory:
    opts = opts or NzOptions()
    grid = np.asarray(grid, dtype=float)
    if opts.route == "auxiliary_ode":
        states, err = _solve_auxiliary(params, grid, opts)
    else:
        states, err = _solve_volterra(params, grid, opts)
    return DensityTrajectory(grid, states, "nz", err)
