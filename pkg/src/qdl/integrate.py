"""Adaptive Dormand-Prince 5(4) integration of linear systems.

The generator is a sum of constant matrices with scalar weights of the form
``a + b t + d exp(-r t)``, which covers every master equation in the package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import StiffnessError

RTOL = 1e-8
ATOL = 1e-10
MAX_STEPS = 1_000_000


def constant(matrix):
    return (matrix, (1.0, 0.0, 0.0, 0.0))


@dataclass(frozen=True)
class Solution:
    times: np.ndarray
    y: np.ndarray
    steps: int
    error_sum: float


def solve_linear(terms, y0, times, rtol=RTOL, atol=ATOL, max_steps=MAX_STEPS) -> Solution:
    """Integrate ``y' = sum_k phi_k(t) M_k y`` and sample it on ``times``.

    ``terms`` is a sequence of ``(M_k, (a, b, d, r))``.  ``times`` must start
    at the initial time and increase strictly; every output time is hit
    exactly by the stepper.
    """
    mats = np.ascontiguousarray(np.array([m for m, _ in terms], dtype=complex))
    coef = np.ascontiguousarray(np.array([c for _, c in terms], dtype=float).reshape(len(terms), 4))
    y0 = np.ascontiguousarray(y0, dtype=complex)
    times = np.ascontiguousarray(times, dtype=float)
    if times.size < 2:
        return Solution(times, y0[None, :].copy(), 0, 0.0)
    scale = np.abs(np.tensordot(np.abs(coef[:, 0]) + np.abs(coef[:, 2]), np.abs(mats), axes=1)).sum(axis=1).max()
    h0 = min(0.01 / max(scale, 1e-12), times[-1] - times[0])
    kern = _backend.active()
    Y, steps, error_sum, status = kern.integrate_linear(
        mats, coef, y0, times, float(rtol), float(atol), float(h0), int(max_steps)
    )
    if status == 1:
        raise StiffnessError(
            "step size underflow; the system is too stiff for the explicit integrator "
            "(use the Laplace route or the Markov baseline)"
        )
    if status == 2:
        raise StiffnessError(
            f"step budget of {max_steps} exhausted; the system is too stiff for the explicit "
            "integrator (use the Laplace route or the Markov baseline)"
        )
    return Solution(times, np.asarray(Y), int(steps), float(error_sum))
