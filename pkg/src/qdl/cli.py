"""Command-line interface: ``qdl simulate | reproduce | sweep``.

Exit codes: 0 success, 1 solver error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from . import harness
from .config import build_run_config, load_config
from .errors import ConfigError, QdlError

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _model_flags(p):
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--lambda", dest="lambda_", type=float, help="Lorentzian width of both baths")
    p.add_argument("--gamma", type=float, help="decay rate of both baths")
    p.add_argument("--omega", type=float, help="qubit-qubit coupling")
    p.add_argument("--t-max", type=float, help="end of the time window (units of 1/gamma_ref)")
    p.add_argument("--points", type=int, help="number of grid points")
    p.add_argument("--methods", help="comma list from exact,nz,tcl,markov")
    p.add_argument("--coherent-mode", choices=("literal_paper", "standard"), help="coherent term of NZ and TCL")
    p.add_argument("--nz-route", choices=("auxiliary_ode", "volterra"))
    p.add_argument("--out-csv", type=Path)
    p.add_argument("--out-svg", type=Path)


def _settings(args) -> dict:
    settings = load_config(args.config) if args.config else {}
    flags = {
        "lambda": args.lambda_,
        "gamma": args.gamma,
        "omega": args.omega,
        "t_max": args.t_max,
        "points": args.points,
        "methods": args.methods,
        "nz_route": args.nz_route,
        "out_csv": args.out_csv,
        "out_svg": args.out_svg,
    }
    if args.coherent_mode:
        flags["nz_coherent_mode"] = flags["tcl_coherent_mode"] = args.coherent_mode
    # a flag for both baths beats per-bath file values
    for key in ("lambda", "gamma"):
        if flags[key] is not None:
            settings.pop(key + "1", None)
            settings.pop(key + "2", None)
    settings.update({k: v for k, v in flags.items() if v is not None})
    return settings


def build_parser():
    parser = _Parser(prog="qdl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one configuration")
    _model_flags(sim)

    rep = sub.add_parser("reproduce", help="reproduce one of the three reservoir regimes")
    rep.add_argument("figure", choices=sorted(harness.FIGURES))
    rep.add_argument("--out-dir", type=Path, default=Path("."))
    rep.add_argument("--out-csv", type=Path)
    rep.add_argument("--out-svg", type=Path)
    rep.add_argument("--points", type=int, default=2001)
    rep.add_argument("--coherent-mode", choices=("literal_paper", "standard"))
    rep.add_argument("--nz-route", choices=("auxiliary_ode", "volterra"))

    sw = sub.add_parser("sweep", help="sweep one parameter")
    _model_flags(sw)
    sw.add_argument("--axis", required=True, choices=harness.SWEEP_AXES)
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--out-dir", type=Path, help="directory for per-point CSV/SVG and the summary")
    return parser


def _simulate(args):
    config = build_run_config(_settings(args))
    report, _ = harness.run_comparison(config)
    print(harness.format_report(report))


def _reproduce(args):
    config = harness.figure_config(args.figure, args.out_dir, args.points)
    changes = {}
    if args.out_csv:
        changes["out_csv"] = args.out_csv
    if args.out_svg:
        changes["out_svg"] = args.out_svg
    if args.coherent_mode:
        changes["tcl_coherent_mode"] = args.coherent_mode
        changes["nz"] = dataclasses.replace(config.nz, coherent_term_mode=args.coherent_mode)
    if args.nz_route:
        changes["nz"] = dataclasses.replace(changes.get("nz", config.nz), route=args.nz_route)
    config = dataclasses.replace(config, **changes)
    lam = harness.FIGURES[args.figure]["lam"]
    report, _ = harness.run_comparison(config, label=f"{args.figure}: λ = {lam:g}γ, Ω = {harness.FIGURE_COUPLING:g}γ")
    print(harness.format_report(report))
    for path in (config.out_csv, config.out_svg):
        if path is not None:
            print(f"wrote {path}")


def _sweep(args):
    settings = _settings(args)
    settings.pop("out_csv", None)
    settings.pop("out_svg", None)
    base = build_run_config(settings)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {args.values!r}") from None
    reports = harness.sweep(base, args.axis, values, args.out_dir)
    for r in reports:
        print(harness.format_report(r))
    if args.out_dir is not None:
        write_sweep_summary(Path(args.out_dir) / f"sweep_{args.axis}_summary.csv", args.axis, values, reports)
    return EXIT_SOLVER if any(r.error for r in reports) else EXIT_OK


def write_sweep_summary(path, axis, values, reports):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([axis, "method", "max_dev_P10", "mean_dev_P10", "first_negativity_time",
                    "local_maxima", "trace_error", "hermiticity_error", "error"])
        for value, r in zip(values, reports):
            if r.error:
                w.writerow([value, "", "", "", "", "", "", "", r.error])
                continue
            for m in r.methods:
                neg = r.first_negativity_time.get(m)
                w.writerow([value, m, r.max_deviation.get(m, ""), r.mean_deviation.get(m, ""),
                            "" if neg is None else neg, r.local_maxima[m], r.trace_error[m],
                            r.hermiticity_error[m], ""])


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"qdl: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {"simulate": _simulate, "reproduce": _reproduce, "sweep": _sweep}
    try:
        status = handlers[args.command](args)
    except ConfigError as exc:
        print(f"qdl: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QdlError as exc:
        print(f"qdl: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"qdl: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
