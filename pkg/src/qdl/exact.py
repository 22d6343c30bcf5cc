"""Exact one-excitation dynamics.

Two independent routes give the amplitudes a(t) of |10> and b(t) of |01>:

* Laplace inversion: with the Lorentzian kernel the Laplace-domain amplitudes
  are rational, so clearing the bath poles leaves a quartic denominator whose
  simple roots give ``a(t) = sum_k r_k exp(p_k t)``.
* An extended linear ODE: the memory integral ``A_j(t) = int_0^t
  exp(-lambda_j (t - t')) x(t') dt'`` obeys ``A_j' = x - lambda_j A_j``, which
  makes the integro-differential amplitude equations local without
  approximation.
"""
from __future__ import annotations

import cmath
import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, PoleError, UnsupportedParametersError
from .integrate import ATOL, RTOL, constant, solve_linear
from .model import AmplitudeTrajectory, ModelParams

CONFLUENCE_TOL = 1e-7
CONFLUENCE_SHIFT = 1e-6
RESIDUE_LIMIT = 1e8
DEFAULT_POINTS = 2001


def uniform_grid(t_max: float, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    return np.linspace(0.0, float(t_max), int(n_points))


def laplace_amplitudes(s: complex, params: ModelParams) -> tuple[complex, complex]:
    """Laplace images (a~(s), b~(s)) of the exact amplitudes."""
    s = complex(s)
    f1 = params.bath1.laplace(s)
    f2 = params.bath2.laplace(s)
    om = params.omega_coupling
    den = (s + f1) * (s + f2) + om**2
    scale = (abs(s) + abs(f1)) * (abs(s) + abs(f2)) + om**2
    if den == 0 or abs(den) <= 1e-14 * max(scale, 1e-300):
        raise PoleError(f"s = {s} is a pole of the amplitude transforms")
    a = (params.a0 * (s + f2) - 1j * om * params.b0) / den
    b = (params.b0 * (s + f1) - 1j * om * params.a0) / den
    return a, b


@dataclass(frozen=True)
class PartialFractionForm:
    poles: np.ndarray
    residues_a: np.ndarray
    residues_b: np.ndarray

    def evaluate(self, t):
        """Amplitudes at arbitrary (also negative) times."""
        t = np.asarray(t, dtype=float)
        phases = np.exp(np.multiply.outer(t, self.poles))
        return phases @ self.residues_a, phases @ self.residues_b


def _quadratic(lam, k):
    # s (s + lam) + k
    return np.array([1.0, lam, k], dtype=complex)


class _Quartic:
    """Q(s) = q1(s) q2(s) + Omega^2 (s + l1)(s + l2), evaluated in factored form.

    Near-coincident roots (weakly coupled identical baths) are badly
    conditioned in the expanded coefficients but not in the factors.
    """

    def __init__(self, l1, k1, l2, k2, om):
        self.l1, self.k1, self.l2, self.k2, self.om2 = l1, k1, l2, k2, om * om
        q1, q2 = _quadratic(l1, k1), _quadratic(l2, k2)
        self.coeffs = np.polyadd(np.polymul(q1, q2), self.om2 * np.polymul([1.0, l1], [1.0, l2]))

    def __call__(self, s):
        q1 = s * (s + self.l1) + self.k1
        q2 = s * (s + self.l2) + self.k2
        return q1 * q2 + self.om2 * (s + self.l1) * (s + self.l2)

    def deriv(self, s):
        q1 = s * (s + self.l1) + self.k1
        q2 = s * (s + self.l2) + self.k2
        return (2 * s + self.l1) * q2 + q1 * (2 * s + self.l2) + self.om2 * (2 * s + self.l1 + self.l2)

    def roots(self, iterations=8):
        companion = np.zeros((4, 4), dtype=complex)
        companion[0, :] = -self.coeffs[1:]
        companion[1:, :-1] = np.eye(3)
        out = np.linalg.eigvals(companion)
        for i, r in enumerate(out):
            # Newton polish, kept only while |Q| decreases
            for _ in range(iterations):
                d = self.deriv(r)
                if d == 0:
                    break
                cand = r - self(r) / d
                if abs(self(cand)) < abs(self(r)):
                    r = cand
                else:
                    break
            out[i] = r
        return out


def _min_separation(roots):
    return min(abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots)))


def _warn_confluent(which):
    warnings.warn(
        f"confluent poles detected; perturbing lambda{which} by {CONFLUENCE_SHIFT:g} relative",
        RuntimeWarning,
        stacklevel=3,
    )


def _perturbed(bath):
    return dataclasses.replace(bath, lam=bath.lam * (1 + CONFLUENCE_SHIFT))


def _quadratic_roots(lam, k):
    """Roots of s (s + lam) + k without cancellation."""
    disc = cmath.sqrt(0.25 * lam * lam - k)
    big = -0.5 * lam - (disc if disc.real >= 0 else -disc)
    return np.array([big, k / big])


def _decoupled_fractions(params, tol):
    """Omega = 0: each amplitude has only its own bath's two poles."""
    poles, res_a, res_b = [], [], []
    for j, (bath, amp) in enumerate(zip(params.baths, (params.a0, params.b0)), start=1):
        for attempt in range(2):
            roots = _quadratic_roots(bath.lam, bath.strength)
            if abs(roots[0] - roots[1]) >= tol:
                break
            if attempt == 1:
                raise ConditioningError(f"confluent poles persist after perturbing lambda{j}")
            _warn_confluent(j)
            bath = _perturbed(bath)
        dq = 2 * roots + bath.lam
        res = amp * (roots + bath.lam) / dq
        poles.extend(roots)
        res_a.extend(res if j == 1 else np.zeros(2))
        res_b.extend(res if j == 2 else np.zeros(2))
    return np.array(poles), np.array(res_a, dtype=complex), np.array(res_b, dtype=complex)


def build_partial_fractions(params: ModelParams) -> PartialFractionForm:
    b1, b2 = params.baths
    if b1.gamma * b1.lam == 0 or b2.gamma * b2.lam == 0:
        raise UnsupportedParametersError(
            "the Laplace route needs gamma * lambda > 0 on both baths; use solve_exact_ode"
        )
    tol = CONFLUENCE_TOL * max(b1.lam, b2.lam)
    om = params.omega_coupling
    if om == 0:
        roots, res_a, res_b = _decoupled_fractions(params, tol)
    else:
        # perturb lambda2 first; lambda1 as well if the clash sits in bath 1
        for attempt in range(3):
            l1, l2 = b1.lam, b2.lam
            quartic = _Quartic(l1, b1.strength, l2, b2.strength, om)
            roots = quartic.roots()
            if _min_separation(roots) >= tol:
                break
            if attempt == 2:
                raise ConditioningError("confluent poles persist after perturbing both baths")
            which = 2 if attempt == 0 else 1
            _warn_confluent(which)
            if which == 2:
                b2 = _perturbed(b2)
            else:
                b1 = _perturbed(b1)
        p = roots
        q1 = p * (p + l1) + b1.strength
        q2 = p * (p + l2) + b2.strength
        cross = 1j * om * (p + l1) * (p + l2)
        dq = quartic.deriv(p)
        res_a = (params.a0 * (p + l1) * q2 - cross * params.b0) / dq
        res_b = (params.b0 * (p + l2) * q1 - cross * params.a0) / dq
    if not (np.all(np.isfinite(res_a)) and np.all(np.isfinite(res_b))) or max(
        np.abs(res_a).max(), np.abs(res_b).max()
    ) > RESIDUE_LIMIT:
        raise ConditioningError("partial-fraction residues overflow; use solve_exact_ode")
    if np.max(roots.real) > 1e-9:
        raise ConditioningError(f"unstable pole with Re = {np.max(roots.real):g}")
    order = np.lexsort((roots.imag, roots.real))
    return PartialFractionForm(roots[order], res_a[order], res_b[order])


def solve_exact_laplace(params: ModelParams, grid) -> AmplitudeTrajectory:
    pf = build_partial_fractions(params)
    a, b = pf.evaluate(grid)
    return AmplitudeTrajectory(np.asarray(grid, dtype=float), a, b)


def amplitude_generator(params: ModelParams) -> np.ndarray:
    """Generator of (a, b, A1, A2) with A_j the exponentially weighted memory."""
    b1, b2 = params.baths
    om = params.omega_coupling
    return np.array(
        [
            [0, -1j * om, -b1.strength, 0],
            [-1j * om, 0, 0, -b2.strength],
            [1, 0, -b1.lam, 0],
            [0, 1, 0, -b2.lam],
        ],
        dtype=complex,
    )


def solve_exact_ode(params: ModelParams, grid, rtol=RTOL, atol=ATOL) -> AmplitudeTrajectory:
    """Exact amplitudes by adaptive integration of the memory-extended system.

    ``error_estimate`` bounds the resulting error on the populations: twice
    the sum of the accepted local error estimates.
    """
    y0 = np.array([params.a0, params.b0, 0, 0], dtype=complex)
    sol = solve_linear([constant(amplitude_generator(params))], y0, grid, rtol, atol)
    return AmplitudeTrajectory(sol.times, sol.y[:, 0], sol.y[:, 1], 2 * sol.error_sum)


def normal_mode_trajectories(params: ModelParams, grid, check: bool = True, rtol=RTOL, atol=ATOL):
    """u = a + b and v = a - b for identical baths.

    With ``check`` the modes are integrated again from their own decoupled
    equations ``u' = -i Omega u - f*u`` and ``v' = +i Omega v - f*v`` and
    must agree with the coupled solution to 1e-6.
    """
    if not params.identical_baths:
        raise UnsupportedParametersError("normal modes decouple only for identical baths")
    traj = solve_exact_ode(params, grid, rtol, atol)
    u = traj.a + traj.b
    v = traj.a - traj.b
    if check:
        bath = params.bath1
        for mode, sign, start in ((u, -1, params.a0 + params.b0), (v, 1, params.a0 - params.b0)):
            gen = np.array([[sign * 1j * params.omega_coupling, -bath.strength], [1, -bath.lam]], dtype=complex)
            ref = solve_linear([constant(gen)], np.array([start, 0]), grid, rtol, atol).y[:, 0]
            residual = np.max(np.abs(ref - mode))
            if residual > 1e-6:
                raise ConditioningError(f"normal-mode residual {residual:g} exceeds 1e-6")
    return u, v
