"""Physical parameters, bath kernels and two-qubit density-matrix algebra.

Rates, frequencies and times are dimensionless, measured in units of a
reference decay rate (``bath1.gamma`` unless stated otherwise).  States are
written in the ordered basis ``|11>, |10>, |01>, |00>`` and all amplitudes
and coherences live in the interaction picture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    HermiticityError,
    InvalidAmplitudesError,
    UnsupportedParametersError,
)

BASIS = ("11", "10", "01", "00")
INDEX = {label: i for i, label in enumerate(BASIS)}

NORM_TOL = 1e-12
EXCESS_TOL = 1e-9
DEFAULT_OMEGA0 = 100.0


@dataclass(frozen=True)
class SpectralDensity:
    """Lorentzian reservoir centred on the qubit transition.

    ``gamma`` is the Markovian decay rate and ``lam`` the half-width, i.e. the
    inverse memory time of the bath.  ``gamma == 0`` describes a bath that is
    switched off.
    """

    gamma: float
    lam: float
    center: float = DEFAULT_OMEGA0

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"lambda must be finite and > 0, got {self.lam}")

    @property
    def strength(self) -> float:
        """Kernel amplitude f(0) = gamma * lambda / 2."""
        return 0.5 * self.gamma * self.lam

    def spectral_density(self, omega):
        return self.strength * self.lam / math.pi / ((self.center - np.asarray(omega)) ** 2 + self.lam**2)

    def kernel(self, tau):
        return self.strength * np.exp(-self.lam * np.abs(tau))

    def laplace(self, s):
        s = complex(s)
        if s.real <= -self.lam:
            raise DomainError(f"Re(s) = {s.real} lies outside the half-plane Re(s) > {-self.lam}")
        return self.strength / (s + self.lam)

    def kernel_integral(self, t):
        """Integral of the kernel over [0, t], the TCL rate."""
        return 0.5 * self.gamma * -np.expm1(-self.lam * np.asarray(t, dtype=float))

    def interval_weights(self, h, d):
        """Integrals of the kernel against the two hat functions of an interval.

        For an interval of length ``h`` ending a distance ``d >= 0`` before the
        evaluation time, returns ``(left, right)``: the weights of the earlier
        and later endpoint values of a linearly interpolated history.
        """
        h = np.asarray(h, dtype=float)
        x = self.lam * h
        left, right = _hat_integrals(x)
        decay = self.strength * h * np.exp(-self.lam * np.asarray(d, dtype=float))
        return decay * left, decay * right

    def lag_weights(self, h: float, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Product-trapezoid weights on a uniform grid of step ``h``.

        ``alpha[m]`` and ``beta[m]`` (``1 <= m <= n``) weight the earlier and
        later endpoints of the interval at lag ``m``; index 0 is unused.
        """
        m = np.arange(n + 1, dtype=float)
        alpha, beta = self.interval_weights(np.full(n + 1, h), np.maximum(m - 1, 0) * h)
        alpha[0] = beta[0] = 0.0
        return alpha, beta


def _hat_integrals(x):
    # (1 - e^-x - x e^-x)/x^2 and (x - 1 + e^-x)/x^2, series below x = 1e-2
    x = np.asarray(x, dtype=float)
    small = x < 1e-2
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    em = np.exp(-xl)
    left = np.where(small, 0.5 - xs / 3 + xs**2 / 8 - xs**3 / 30 + xs**4 / 144 - xs**5 / 840,
                    (-np.expm1(-xl) - xl * em) / xl**2)
    right = np.where(small, 0.5 - xs / 6 + xs**2 / 24 - xs**3 / 120 + xs**4 / 720 - xs**5 / 5040,
                     (xl + np.expm1(-xl)) / xl**2)
    return left, right


def lorentzian_j(omega, sd: SpectralDensity):
    """J(omega) = gamma lambda^2 / (2 pi ((center - omega)^2 + lambda^2))."""
    return sd.spectral_density(omega)


def correlation_kernel(tau, sd: SpectralDensity):
    return sd.kernel(tau)


def kernel_laplace(s, sd: SpectralDensity) -> complex:
    return sd.laplace(s)


@dataclass(frozen=True)
class ModelParams:
    omega_coupling: float
    bath1: SpectralDensity
    bath2: SpectralDensity
    a0: complex = 1.0
    b0: complex = 0.0
    omega0: float = DEFAULT_OMEGA0

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "b0", complex(self.b0))
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")
        if not self.omega_coupling >= 0:
            raise DomainError("omega_coupling must be >= 0")
        norm = abs(self.a0) ** 2 + abs(self.b0) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidAmplitudesError(f"|a0|^2 + |b0|^2 = {norm!r}, expected 1")
        for bath in (self.bath1, self.bath2):
            if bath.center != self.omega0:
                raise UnsupportedParametersError("only baths resonant with the qubits are supported")

    @classmethod
    def symmetric(cls, gamma, lam, omega_coupling, a0=1.0, b0=0.0, omega0=DEFAULT_OMEGA0):
        bath = SpectralDensity(gamma, lam, omega0)
        return cls(omega_coupling, bath, bath, a0, b0, omega0)

    @classmethod
    def bell(cls, gamma, lam, omega_coupling, omega0=DEFAULT_OMEGA0):
        """Identical baths, qubits in (|10> - |01>)/sqrt(2)."""
        r = 1 / math.sqrt(2)
        return cls.symmetric(gamma, lam, omega_coupling, r, -r, omega0)

    @property
    def identical_baths(self) -> bool:
        return self.bath1 == self.bath2

    @property
    def baths(self) -> tuple[SpectralDensity, SpectralDensity]:
        return self.bath1, self.bath2

    def initial_density(self) -> np.ndarray:
        return amplitudes_to_density(self.a0, self.b0)


@dataclass(frozen=True)
class AmplitudeTrajectory:
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    error_estimate: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise DomainError("times must be strictly increasing and start at 0")
        if len(self.a) != times.size or len(self.b) != times.size:
            raise DomainError("amplitude sequences must align with times")

    @property
    def bath_occupation(self) -> np.ndarray:
        return 1.0 - np.abs(self.a) ** 2 - np.abs(self.b) ** 2

    def to_density(self, method: str = "exact") -> "DensityTrajectory":
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        excited = np.abs(a) ** 2 + np.abs(b) ** 2
        if np.any(excited > 1.0 + EXCESS_TOL):
            raise InvalidAmplitudesError(f"|a|^2 + |b|^2 reaches {excited.max()!r}")
        states = np.zeros((a.size, 4, 4), dtype=complex)
        states[:, 1, 1] = np.abs(a) ** 2
        states[:, 2, 2] = np.abs(b) ** 2
        states[:, 1, 2] = a * b.conj()
        states[:, 2, 1] = b * a.conj()
        states[:, 3, 3] = 1.0 - excited
        return DensityTrajectory(self.times, states, method, self.error_estimate)


@dataclass(frozen=True)
class DensityTrajectory:
    """Reduced density matrices on a time grid.

    Positivity is deliberately not checked; negative populations of the
    approximate master equations are a measured result.
    """

    times: np.ndarray
    states: np.ndarray
    method: str
    error_estimate: float = 0.0

    def __post_init__(self):
        if self.states.shape != (len(self.times), 4, 4):
            raise DomainError(f"states must have shape (n, 4, 4), got {self.states.shape}")

    def population(self, which: str = "10") -> np.ndarray:
        i = INDEX[which]
        return self.states[:, i, i].real.copy()

    def coherence(self) -> np.ndarray:
        """<10|rho|01> along the trajectory."""
        return self.states[:, 1, 2].copy()

    def trace_error(self) -> float:
        return float(np.max(np.abs(np.trace(self.states, axis1=1, axis2=2) - 1.0)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.states - np.conj(np.swapaxes(self.states, 1, 2)))))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.states + np.conj(np.swapaxes(self.states, 1, 2)))
        return float(np.min(np.linalg.eigvalsh(herm)))


def amplitudes_to_density(a: complex, b: complex) -> np.ndarray:
    """Reduced state of the qubits for the pure global state with amplitudes a, b.

    The bath-excited branch contributes only to ``|00><00|``.
    """
    a, b = complex(a), complex(b)
    excited = abs(a) ** 2 + abs(b) ** 2
    if excited > 1.0 + EXCESS_TOL:
        raise InvalidAmplitudesError(f"|a|^2 + |b|^2 = {excited!r} exceeds 1")
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = abs(a) ** 2
    rho[2, 2] = abs(b) ** 2
    rho[1, 2] = a * b.conjugate()
    rho[2, 1] = b * a.conjugate()
    rho[3, 3] = 1.0 - excited
    return rho


def population(rho: np.ndarray, which: str) -> float:
    i = INDEX[which]
    value = rho[i, i]
    if abs(value.imag) >= 1e-10:
        raise HermiticityError(f"diagonal element {which} has imaginary part {value.imag:g}")
    return float(value.real)


def validate_density(rho: np.ndarray, herm_tol=1e-10, trace_tol=1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError("density matrix must be 4x4")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise HermiticityError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise DomainError("density matrix trace differs from 1")
    return rho


# Operators in the basis |11>, |10>, |01>, |00>; qubit 1 is the left label.
def lowering(qubit: int) -> np.ndarray:
    op = np.zeros((4, 4), dtype=complex)
    if qubit == 1:
        op[INDEX["01"], INDEX["11"]] = 1.0
        op[INDEX["00"], INDEX["10"]] = 1.0
    elif qubit == 2:
        op[INDEX["10"], INDEX["11"]] = 1.0
        op[INDEX["00"], INDEX["01"]] = 1.0
    else:
        raise DomainError("qubit must be 1 or 2")
    return op


def exchange_hamiltonian(omega_coupling: float) -> np.ndarray:
    """Omega (s+1 s-2 + s-1 s+2): flip-flop coupling between |10> and |01>."""
    h = np.zeros((4, 4), dtype=complex)
    h[INDEX["10"], INDEX["01"]] = omega_coupling
    h[INDEX["01"], INDEX["10"]] = omega_coupling
    return h


# Superoperators act on row-major vec(rho): vec(A rho B) = kron(A, B.T) vec(rho).
_EYE = np.eye(4)


def commutator_super(h: np.ndarray) -> np.ndarray:
    return np.kron(h, _EYE) - np.kron(_EYE, h.T)


def coherent_super(h: np.ndarray) -> np.ndarray:
    """rho -> -i [H, rho]."""
    return -1j * commutator_super(h)


def double_commutator_super(h: np.ndarray) -> np.ndarray:
    """rho -> [H, [H, rho]]."""
    c = commutator_super(h)
    return c @ c


def dissipator_super(qubit: int) -> np.ndarray:
    """rho -> [s- rho, s+] + [s-, rho s+] for a real bath correlation."""
    lo = lowering(qubit)
    up = lo.conj().T
    nn = up @ lo
    return 2 * np.kron(lo, up.T) - np.kron(nn, _EYE) - np.kron(_EYE, nn.T)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(rho, dtype=complex).reshape(16)


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v).reshape(v.shape[:-1] + (4, 4))
