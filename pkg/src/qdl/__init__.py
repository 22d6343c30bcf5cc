"""Dissipative dynamics of two coupled qubits in independent zero-temperature
Lorentzian reservoirs: exact one-excitation solution, second-order
Nakajima-Zwanzig and time-convolutionless master equations."""
from ._backend import active as active_backend
from .exact import (
    PartialFractionForm,
    build_partial_fractions,
    laplace_amplitudes,
    normal_mode_trajectories,
    solve_exact_laplace,
    solve_exact_ode,
)
from .model import (
    AmplitudeTrajectory,
    DensityTrajectory,
    ModelParams,
    SpectralDensity,
    amplitudes_to_density,
    correlation_kernel,
    kernel_laplace,
    lorentzian_j,
    population,
)
from .nz import NzOptions, nz_memory_terms, solve_nz
from .tcl import TclRates, solve_markov, solve_tcl, tcl_rates

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTrajectory",
    "DensityTrajectory",
    "ModelParams",
    "PartialFractionForm",
    "SpectralDensity",
    "active_backend",
    "amplitudes_to_density",
    "build_partial_fractions",
    "correlation_kernel",
    "kernel_laplace",
    "laplace_amplitudes",
    "lorentzian_j",
    "NzOptions",
    "nz_memory_terms",
    "solve_nz",
    "TclRates",
    "solve_markov",
    "solve_tcl",
    "tcl_rates",
    "normal_mode_trajectories",
    "population",
    "solve_exact_laplace",
    "solve_exact_ode",
]
