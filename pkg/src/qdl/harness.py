"""Method comparison, figure presets and parameter sweeps."""
from __future__ import annotations

import dataclasses
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import find_peaks

from . import csvio, svg
from .errors import ConfigError, QdlError
from .exact import DEFAULT_POINTS, solve_exact_laplace, solve_exact_ode, uniform_grid
from .integrate import ATOL, RTOL
from .model import DensityTrajectory, ModelParams
from .nz import COHERENT_MODES, NzOptions, solve_nz
from .tcl import solve_markov, solve_tcl

log = logging.getLogger(__name__)

METHODS = ("exact", "nz", "tcl", "markov")
EXTREMA_FLOOR = 1e-6
NEGATIVITY_RESOLUTION = 1e-4
SWEEP_AXES = ("lambda", "gamma", "omega_coupling", "t_max")


class SolverError(QdlError):
    """A solver failed; ``method`` names which one."""

    def __init__(self, method, cause):
        super().__init__(f"{method}: {cause}")
        self.method = method
        self.cause = cause


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    t_max: float
    n_points: int = DEFAULT_POINTS
    methods: tuple = ("exact", "nz", "tcl")
    nz: NzOptions = field(default_factory=NzOptions)
    tcl_coherent_mode: str = "literal_paper"
    exact_route: str = "ode"
    rtol: float = RTOL
    atol: float = ATOL
    out_csv: Path | None = None
    out_svg: Path | None = None

    def __post_init__(self):
        if int(self.n_points) < 2:
            raise ConfigError("n_points must be at least 2")
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        methods = tuple(self.methods)
        if not methods:
            raise ConfigError("methods must be non-empty")
        unknown = set(methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        # canonical column order, duplicates dropped
        object.__setattr__(self, "methods", tuple(m for m in METHODS if m in methods))
        if self.tcl_coherent_mode not in COHERENT_MODES:
            raise ConfigError(f"tcl coherent mode must be one of {COHERENT_MODES}")
        if self.exact_route not in ("ode", "laplace"):
            raise ConfigError("exact_route must be 'ode' or 'laplace'")

    def grid(self) -> np.ndarray:
        return uniform_grid(self.t_max, self.n_points)


@dataclass
class ComparisonReport:
    methods: tuple
    max_deviation: dict = field(default_factory=dict)
    mean_deviation: dict = field(default_factory=dict)
    first_negativity_time: dict = field(default_factory=dict)
    local_maxima: dict = field(default_factory=dict)
    local_extrema: dict = field(default_factory=dict)
    trace_error: dict = field(default_factory=dict)
    hermiticity_error: dict = field(default_factory=dict)
    label: str = ""
    error: str | None = None

    @property
    def max_trace_error(self) -> float:
        return max(self.trace_error.values(), default=0.0)

    @property
    def max_hermiticity_error(self) -> float:
        return max(self.hermiticity_error.values(), default=0.0)


def count_local_maxima(y, prominence=EXTREMA_FLOOR) -> int:
    peaks, _ = find_peaks(np.asarray(y), prominence=prominence)
    return int(peaks.size)


def count_local_extrema(y, prominence=EXTREMA_FLOOR) -> int:
    y = np.asarray(y)
    return count_local_maxima(y, prominence) + count_local_maxima(-y, prominence)


def first_negativity_time(times, values, resolution=NEGATIVITY_RESOLUTION):
    """First time the sampled curve drops below zero, or None.

    The bracketing grid interval is refined by bisection on a cubic spline of
    the samples until it is narrower than ``resolution``; the returned time
    is the right end of the final bracket, where the curve is negative.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    neg = np.flatnonzero(values < 0)
    if neg.size == 0:
        return None
    i = int(neg[0])
    if i == 0:
        return float(times[0])
    spline = CubicSpline(times, values)
    lo, hi = times[i - 1], times[i]
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if spline(mid) < 0:
            hi = mid
        else:
            lo = mid
    return float(hi)


def solve_method(method: str, config: RunConfig, grid) -> DensityTrajectory:
    p = config.params
    try:
        if method == "exact":
            if config.exact_route == "laplace":
                return solve_exact_laplace(p, grid).to_density("exact")
            return solve_exact_ode(p, grid, config.rtol, config.atol).to_density("exact")
        if method == "nz":
            opts = dataclasses.replace(config.nz, rtol=config.rtol, atol=config.atol)
            return solve_nz(p, grid, opts)
        if method == "tcl":
            return solve_tcl(p, grid, config.tcl_coherent_mode, config.rtol, config.atol)
        if method == "markov":
            return solve_markov(p, grid, config.rtol, config.atol)
    except QdlError as exc:
        raise SolverError(method, exc) from exc
    raise ConfigError(f"unknown method {method!r}")


def compare(trajectories: dict, label: str = "") -> ComparisonReport:
    report = ComparisonReport(tuple(trajectories), label=label)
    exact = trajectories.get("exact")
    for method, traj in trajectories.items():
        p10 = traj.population("10")
        if exact is not None:
            dev = np.abs(p10 - exact.population("10"))
            report.max_deviation[method] = float(dev.max())
            report.mean_deviation[method] = float(dev.mean())
        report.first_negativity_time[method] = None if method == "exact" else first_negativity_time(traj.times, p10)
        report.local_maxima[method] = count_local_maxima(p10)
        report.local_extrema[method] = count_local_extrema(p10)
        report.trace_error[method] = traj.trace_error()
        report.hermiticity_error[method] = traj.hermiticity_error()
    return report


def run_comparison(config: RunConfig, label: str = ""):
    """Solve every requested method on a shared grid and compare them.

    Returns ``(report, trajectories)``; writes the CSV and SVG outputs named
    in the config.
    """
    grid = config.grid()
    trajectories = {m: solve_method(m, config, grid) for m in config.methods}
    report = compare(trajectories, label)
    if config.out_csv is not None:
        csvio.write_csv(config.out_csv, trajectories)
    if config.out_svg is not None:
        write_population_svg(config.out_svg, trajectories, label or "P10")
    return report, trajectories


def write_population_svg(path, trajectories, title):
    series = [(m, traj.times, traj.population("10")) for m, traj in trajectories.items()]
    svg.write_line_chart(path, series, title=title, x_label="γt", y_label="P10")


FIGURES = {
    "fig1": {"lam": 10.0, "t_max": 5.0},
    "fig2": {"lam": 1.0, "t_max": 20.0},
    "fig3": {"lam": 0.01, "t_max": 300.0},
}
FIGURE_COUPLING = 0.001


def figure_config(fig_id: str, out_dir=None, n_points=DEFAULT_POINTS, **overrides) -> RunConfig:
    """Preset of one of the three reservoir regimes (Bell initial state)."""
    if fig_id not in FIGURES:
        raise ConfigError(f"unknown figure {fig_id!r}; choose from {sorted(FIGURES)}")
    preset = FIGURES[fig_id]
    params = ModelParams.bell(1.0, preset["lam"], FIGURE_COUPLING)
    out_csv = out_svg = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_csv, out_svg = out_dir / f"{fig_id}.csv", out_dir / f"{fig_id}.svg"
    kwargs = dict(params=params, t_max=preset["t_max"], n_points=n_points, out_csv=out_csv, out_svg=out_svg)
    kwargs.update(overrides)
    return RunConfig(**kwargs)


def reproduce_figure(fig_id: str, out_dir=".", n_points=DEFAULT_POINTS, **overrides):
    config = figure_config(fig_id, out_dir, n_points, **overrides)
    lam = FIGURES[fig_id]["lam"]
    report, trajectories = run_comparison(config, label=f"{fig_id}: λ = {lam:g}γ, Ω = {FIGURE_COUPLING:g}γ")
    return report, trajectories, config


def with_axis(config: RunConfig, axis: str, value: float) -> RunConfig:
    p = config.params
    if axis == "t_max":
        return dataclasses.replace(config, t_max=float(value))
    if axis == "omega_coupling":
        return dataclasses.replace(config, params=dataclasses.replace(p, omega_coupling=float(value)))
    if axis in ("lambda", "gamma"):
        key = "lam" if axis == "lambda" else "gamma"
        baths = [dataclasses.replace(b, **{key: float(value)}) for b in p.baths]
        return dataclasses.replace(config, params=dataclasses.replace(p, bath1=baths[0], bath2=baths[1]))
    raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}")


def sweep_threads(n_tasks: int) -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get("QDL_THREADS")
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ConfigError(f"QDL_THREADS must be an integer, got {env!r}") from None
    return max(1, min(cap, n_tasks))


def _point_outputs(base: RunConfig, axis: str, value: float, out_dir):
    if out_dir is None:
        return {}
    stem = f"sweep_{axis}_{value!r}"
    out_dir = Path(out_dir)
    return {"out_csv": out_dir / f"{stem}.csv", "out_svg": out_dir / f"{stem}.svg"}


def sweep(base: RunConfig, axis: str, values, out_dir=None) -> list[ComparisonReport]:
    """Independent comparison runs along one parameter axis.

    Reports come back in input order.  A failing point yields a report with
    ``error`` set and the sweep carries on.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        return []

    def run_point(value):
        label = f"{axis}={value:g}"
        try:
            config = dataclasses.replace(with_axis(base, axis, value), **_point_outputs(base, axis, value, out_dir))
            return run_comparison(config, label)[0]
        except QdlError as exc:
            log.warning("sweep point %s failed: %s", label, exc)
            return ComparisonReport(base.methods, label=label, error=str(exc))

    with ThreadPoolExecutor(max_workers=sweep_threads(len(values))) as pool:
        return list(pool.map(run_point, values))


def format_report(report: ComparisonReport) -> str:
    lines = [report.label] if report.label else []
    if report.error:
        lines.append(f"  error: {report.error}")
        return "\n".join(lines)
    for m in report.methods:
        neg = report.first_negativity_time.get(m)
        parts = [f"  {m:<7}"]
        if m in report.max_deviation:
            parts.append(f"max|dP10|={report.max_deviation[m]:.3e} mean|dP10|={report.mean_deviation[m]:.3e}")
        parts.append(f"first P10<0: {'none' if neg is None else f'{neg:.4f}'}")
        parts.append(f"maxima={report.local_maxima[m]} extrema={report.local_extrema[m]}")
        parts.append(f"trace err={report.trace_error[m]:.1e} herm err={report.hermiticity_error[m]:.1e}")
        lines.append("  ".join(parts))
    return "\n".join(lines)
