"""Compiled kernels vs the numpy fallback on the three figure presets.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--figures fig1,fig3]
"""
import argparse
import time

from qdl import NzOptions, _backend, solve_exact_ode, solve_nz, solve_tcl
from qdl.harness import figure_config

CASES = {
    "exact ode": lambda p, g: solve_exact_ode(p, g),
    "tcl": lambda p, g: solve_tcl(p, g),
    "nz auxiliary": lambda p, g: solve_nz(p, g),
    "nz volterra": lambda p, g: solve_nz(p, g, NzOptions(route="volterra")),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--figures", default="fig1,fig2,fig3")
    args = ap.parse_args(argv)

    backends = sorted(_backend.BACKENDS)
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is timed")
    print(f"{'figure':<6} {'case':<13}" + "".join(f"{b:>10}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for fig in args.figures.split(","):
        config = figure_config(fig.strip())
        grid = config.grid()
        for name, run in CASES.items():
            row = {}
            for b in backends:
                with _backend.use(b):
                    row[b] = best_of(lambda: run(config.params, grid), args.repeat)
            line = f"{fig:<6} {name:<13}" + "".join(f"{row[b]:>9.3f}s" for b in backends)
            if len(backends) > 1:
                line += f"  {row['python'] / row['cython']:>7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
