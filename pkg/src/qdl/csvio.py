"""Trajectory CSV files.

One ``t`` column followed by a group of five columns per method, in the
order exact, nz, tcl, markov::

    P10_<m>,P01_<m>,P00_<m>,coh_re_<m>,coh_im_<m>

Numbers use the shortest round-trip scientific notation; lines end in LF.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

GROUP = ("P10", "P01", "P00", "coh_re", "coh_im")


def fmt(x: float) -> str:
    return np.format_float_scientific(float(x) + 0.0, unique=True, trim="-")


def header(methods) -> list[str]:
    return ["t"] + [f"{col}_{m}" for m in methods for col in GROUP]


def columns(traj) -> list[np.ndarray]:
    coh = traj.coherence()
    return [traj.population("10"), traj.population("01"), traj.population("00"), coh.real, coh.imag]


def write_csv(path, trajectories: dict) -> Path:
    path = Path(path)
    methods = list(trajectories)
    times = next(iter(trajectories.values())).times
    cols = [times]
    for m in methods:
        if not np.array_equal(trajectories[m].times, times):
            raise ValueError("all trajectories must share one time grid")
        cols.extend(columns(trajectories[m]))
    data = np.column_stack(cols)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header(methods)) + "\n")
        for row in data:
            fh.write(",".join(fmt(x) for x in row) + "\n")
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    """Columns of a trajectory CSV keyed by header name."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    return {name: data[:, i] for i, name in enumerate(names)}
