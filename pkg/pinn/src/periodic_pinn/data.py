"""Readers for the shared point dumps produced by the solver package.

Both methods train on identical collocation points and are scored on an
identical evaluation set; the dumps are the only data interface between the
packages.  `sample_points.csv` carries coordinates plus forcing values,
`eval_points.csv` coordinates plus reference solution values, `meta.json` the
provenance (dimension, seeds, generator identity).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def _read_csv(path) -> tuple:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    n_coords = sum(1 for h in header if h.startswith("x"))
    values = data[:, n_coords] if len(header) > n_coords else None
    return data[:, :n_coords], values


def read_sample_dump(directory) -> tuple:
    """(points (m, d), forcing values (m,)) from a dump directory."""
    points, f = _read_csv(Path(directory) / "sample_points.csv")
    if f is None:
        raise ValueError("sample dump carries no forcing column")
    return points, f


def read_eval_dump(directory) -> tuple:
    """(points (M, d), reference values (M,)) from a dump directory."""
    points, u = _read_csv(Path(directory) / "eval_points.csv")
    if u is None:
        raise ValueError("evaluation dump carries no reference column")
    return points, u


def read_meta(directory) -> dict:
    return json.loads((Path(directory) / "meta.json").read_text())
