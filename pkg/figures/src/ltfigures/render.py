"""Render the report CSVs (figure1.csv .. figure5.csv) as scatter plots.

Usage: render_figures <csv_dir> <out_dir>

Each input is a two-column CSV with a fixed header: `r,<column>` where the
column is one of observed, predicted, abs_err, rel_err, norm_err.  Output is
one PNG per input, styled by the checked-in ltfigures.mplstyle.  A header-only
CSV renders an empty-axes image; a missing or garbled CSV is a hard error.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import List, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

STYLE_PATH = os.path.join(os.path.dirname(__file__), "ltfigures.mplstyle")

# input name -> (expected value column, panel title)
FIGURES = {
    "figure1.csv": ("observed", "observed prime counts by trace value"),
    "figure2.csv": ("predicted", "predicted counts"),
    "figure3.csv": ("abs_err", "absolute error"),
    "figure4.csv": ("rel_err", "relative error"),
    "figure5.csv": ("norm_err", "error over sqrt(1 + prediction)"),
}


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    title: str
    xlabel: str
    ylabel: str
    out_path: str
    value_column: str


class InputError(Exception):
    pass


def read_series(csv_path: str, value_column: str) -> Tuple[np.ndarray, np.ndarray]:
    """Parse an `r,<column>` CSV; NaN rows are kept (dropped at plot time)."""
    if not os.path.exists(csv_path):
        raise InputError("missing input %s" % csv_path)
    with open(csv_path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "r,%s" % value_column:
        raise InputError("%s: expected header 'r,%s'" % (csv_path, value_column))
    rs: List[float] = []
    vs: List[float] = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 2:
            raise InputError("%s: bad row %r" % (csv_path, ln))
        try:
            rs.append(float(parts[0]))
            vs.append(float(parts[1]))
        except ValueError:
            raise InputError("%s: bad row %r" % (csv_path, ln)) from None
    return np.asarray(rs), np.asarray(vs)


def render(spec: FigureSpec) -> str:
    r, v = read_series(spec.csv_path, spec.value_column)
    keep = ~np.isnan(v)
    with plt.style.context(STYLE_PATH):
        fig, ax = plt.subplots()
        ax.scatter(r[keep], v[keep], s=2.2, linewidths=0)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        ax.set_title(spec.title)
        os.makedirs(os.path.dirname(os.path.abspath(spec.out_path)), exist_ok=True)
        fig.savefig(spec.out_path)
        plt.close(fig)
    return spec.out_path


def specs_for_dir(csv_dir: str, out_dir: str) -> List[FigureSpec]:
    out = []
    for name, (column, title) in sorted(FIGURES.items()):
        out.append(
            FigureSpec(
                csv_path=os.path.join(csv_dir, name),
                title=title,
                xlabel="r",
                ylabel="v",
                out_path=os.path.join(out_dir, name.replace(".csv", ".png")),
                value_column=column,
            )
        )
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: render_figures <csv_dir> <out_dir>", file=sys.stderr)
        return 2
    csv_dir, out_dir = argv
    try:
        for spec in specs_for_dir(csv_dir, out_dir):
            print("wrote %s" % render(spec))
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
