"""Run configuration files.

Plain ``key = value`` pairs under ``[section]`` headers; all rates in units
of the reference rate::

    [model]
    omega = 0.001
    initial = bell        # or 10, 01; a0/b0 give explicit amplitudes

    [bath]                # both baths; [bath1]/[bath2] override one side
    gamma = 1
    lambda = 10

    [run]
    t_max = 5
    points = 2001
    methods = exact, nz, tcl

    [nz]
    route = auxiliary_ode
    coherent_mode = literal_paper
    step = 0.005

    [tcl]
    coherent_mode = literal_paper

    [output]
    csv = fig.csv
    svg = fig.svg
"""
from __future__ import annotations

import configparser
import math
from pathlib import Path

from .errors import ConfigError, QdlError
from .harness import RunConfig
from .model import DEFAULT_OMEGA0, ModelParams, SpectralDensity
from .nz import NzOptions

SECTIONS = {
    "model": {"omega": "omega", "omega0": "omega0", "initial": "initial", "a0": "a0", "b0": "b0"},
    "bath": {"gamma": "gamma", "lambda": "lambda"},
    "bath1": {"gamma": "gamma1", "lambda": "lambda1"},
    "bath2": {"gamma": "gamma2", "lambda": "lambda2"},
    "run": {"t_max": "t_max", "points": "points", "methods": "methods", "exact_route": "exact_route",
            "rtol": "rtol", "atol": "atol"},
    "nz": {"route": "nz_route", "coherent_mode": "nz_coherent_mode", "step": "nz_step"},
    "tcl": {"coherent_mode": "tcl_coherent_mode"},
    "output": {"csv": "out_csv", "svg": "out_svg"},
}

DEFAULTS = {
    "gamma": 1.0,
    "lambda": 1.0,
    "omega": 0.001,
    "omega0": DEFAULT_OMEGA0,
    "initial": "bell",
    "t_max": 5.0,
    "points": 2001,
    "methods": "exact,nz,tcl",
    "exact_route": "ode",
    "nz_route": "auxiliary_ode",
    "nz_coherent_mode": "literal_paper",
    "tcl_coherent_mode": "literal_paper",
}


def load_config(path) -> dict:
    """Flat settings dict from a config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    settings = {}
    for section in parser.sections():
        keys = SECTIONS.get(section)
        if keys is None:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            settings[keys[key]] = value
    return settings


def _float(settings, key):
    try:
        value = float(settings[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {settings[key]!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def _complex(settings, key):
    try:
        return complex(str(settings[key]).replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{key} must be a complex number, got {settings[key]!r}") from None


def initial_amplitudes(settings):
    if "a0" in settings or "b0" in settings:
        a0 = _complex(settings, "a0") if "a0" in settings else 0j
        b0 = _complex(settings, "b0") if "b0" in settings else 0j
        return a0, b0
    kind = str(settings["initial"]).strip().lower()
    r = 1 / math.sqrt(2)
    table = {"bell": (r, -r), "10": (1.0, 0.0), "01": (0.0, 1.0)}
    if kind not in table:
        raise ConfigError(f"initial must be one of {sorted(table)}, got {kind!r}")
    return table[kind]


def build_run_config(settings: dict) -> RunConfig:
    """RunConfig from merged settings (file values overridden by flags)."""
    s = dict(DEFAULTS)
    s.update({k: v for k, v in settings.items() if v is not None})
    try:
        omega0 = _float(s, "omega0")
        baths = []
        for j in ("1", "2"):
            gamma = _float(s, "gamma" + j) if "gamma" + j in s else _float(s, "gamma")
            lam = _float(s, "lambda" + j) if "lambda" + j in s else _float(s, "lambda")
            baths.append(SpectralDensity(gamma, lam, omega0))
        a0, b0 = initial_amplitudes(s)
        params = ModelParams(_float(s, "omega"), baths[0], baths[1], a0, b0, omega0)
        methods = s["methods"]
        if isinstance(methods, str):
            methods = [m.strip() for m in methods.split(",") if m.strip()]
        step = _float(s, "nz_step") if s.get("nz_step") is not None else None
        nz = NzOptions(coherent_term_mode=s["nz_coherent_mode"], route=s["nz_route"], step=step)
        extra = {}
        for key in ("rtol", "atol"):
            if key in s:
                extra[key] = _float(s, key)
        return RunConfig(
            params=params,
            t_max=_float(s, "t_max"),
            n_points=int(_float(s, "points")),
            methods=tuple(methods),
            nz=nz,
            tcl_coherent_mode=s["tcl_coherent_mode"],
            exact_route=s["exact_route"],
            out_csv=Path(s["out_csv"]) if s.get("out_csv") else None,
            out_svg=Path(s["out_svg"]) if s.get("out_svg") else None,
            **extra,
        )
    except ConfigError:
        raise
    except QdlError as exc:
        raise ConfigError(str(exc)) from exc
