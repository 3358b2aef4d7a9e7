"""Empirical statistics from a trace table, compared against the theory.

Produces the per-r residual table (observed vs predicted counts), the
residue-class comparison against the exact trace-class densities, the
normalized-trace histogram against the semicircle / arcsine laws, and the
constant-averaging check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .constants import ConstantProfile, constant
from .density import DensityModel, li, main_term, phi_integral
from .errors import EmptyTableError
from .galois import GaloisImage, delta_aq
from .sieve_table import TraceTable
from .util import atomic_write_text


def pi_r(table: TraceTable, r: int) -> int:
    """Number of good primes in the table with trace exactly r."""
    return int(np.count_nonzero(table.traces == r))


def residue_counts(table: TraceTable, q: int) -> np.ndarray:
    """Counts of a(p) mod q, indexed by residue."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return np.bincount(table.traces % q, minlength=q)


def chebotarev_count(table: TraceTable, a: int, q: int) -> int:
    return int(residue_counts(table, q)[a % q])


@dataclass(frozen=True)
class ChebotarevRow:
    a: int
    count: int
    share: float  # count / Li(x)
    delta: Optional[Fraction]  # exact density when an image is available
    rel_dev: Optional[float]


def chebotarev_report(
    table: TraceTable, q: int, image: Optional[GaloisImage] = None
) -> List[ChebotarevRow]:
    """Residue-class counts, against delta * Li(x) when an exact image is given."""
    counts = residue_counts(table, q)
    li_x = li(float(table.x_max))
    rows = []
    for a in range(q):
        share = counts[a] / li_x
        delta = rel = None
        if image is not None and image.level % q == 0:
            delta = delta_aq(image, a, q)
            if delta > 0:
                rel = abs(share - float(delta)) / float(delta)
        rows.append(ChebotarevRow(a, int(counts[a]), share, delta, rel))
    return rows


@dataclass(frozen=True)
class AveragingResult:
    q: int
    a: int
    lo: int  # A
    span: int  # B
    total: float
    predicted: float
    deviation: float


def average_constants(
    profile: ConstantProfile, a: int, q: int, lo: int, span: int
) -> AveragingResult:
    """Sum of the constants over r = a mod q, lo < r <= lo + span, r != 0,
    against the density prediction phi(0) * B * sum of matching main factors / m.
    """
    if span < 1:
        raise ValueError("span B must be >= 1")
    if q < 1:
        raise ValueError("q must be >= 1")
    if profile.m % q != 0:
        raise ValueError("the profile level must be divisible by q")
    first = lo + 1 + (a - lo - 1) % q
    total = 0.0
    for r in range(first, lo + span + 1, q):
        if r == 0:
            continue
        total += constant(profile, r).value
    class_share = sum(
        profile.main_factors[b] for b in range(profile.m) if b % q == a % q
    ) / profile.m
    predicted = profile.phi0 * span * float(class_share)
    return AveragingResult(q, a % q, lo, span, total, predicted, abs(total - predicted))


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Observed pi_r against the prediction for every |r| <= 2 sqrt(x).

    `interior` marks |r| <= 2 sqrt(x) (1 - 1/log x), where the prediction is
    an asymptotic; summary statistics are taken there (and where the constant
    is nonzero), but every row is reported.
    """

    x: int
    r: np.ndarray
    observed: np.ndarray
    predicted: np.ndarray
    abs_err: np.ndarray
    rel_err: np.ndarray
    norm_err: np.ndarray
    interior: np.ndarray
    nonzero_constant: np.ndarray
    threshold: float

    @property
    def summary_mask(self) -> np.ndarray:
        return self.interior & self.nonzero_constant

    @property
    def max_norm_err(self) -> float:
        m = self.summary_mask
        return float(np.max(np.abs(self.norm_err[m]))) if m.any() else 0.0

    @property
    def within_threshold(self) -> float:
        m = self.summary_mask
        if not m.any():
            return 1.0
        return float(np.mean(np.abs(self.norm_err[m]) <= self.threshold))

    @property
    def mean_norm_err(self) -> float:
        m = self.summary_mask
        return float(np.mean(self.norm_err[m])) if m.any() else 0.0


def error_report(
    table: TraceTable,
    profile: ConstantProfile,
    model: DensityModel,
    tol: float = 1e-9,
    threshold: float = 5.0,
) -> ErrorReport:
    if len(table) == 0:
        raise EmptyTableError("cannot build a report from an empty table")
    x = table.x_max
    r_max = math.isqrt(4 * x)
    cm = profile.cm is not None
    rs = np.array([r for r in range(-r_max, r_max + 1) if not (cm and r == 0)])
    shifted = table.traces.astype(np.int64) + r_max
    all_counts = np.bincount(shifted, minlength=2 * r_max + 1)
    observed = all_counts[rs + r_max]
    # the integral factor is even in r: evaluate once per |r|
    shape_cache = {}
    predicted = np.empty(rs.shape[0])
    consts = np.empty(rs.shape[0])
    for i, r in enumerate(rs):
        r = int(r)
        consts[i] = constant(profile, r).value
        if consts[i] == 0.0:
            predicted[i] = 0.0
            continue
        key = abs(r)
        if key not in shape_cache:
            shape_cache[key] = main_term(1.0, key, float(x), model, tol)
        predicted[i] = consts[i] * shape_cache[key]
    abs_err = observed - predicted
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_err = np.where(predicted > 0, abs_err / predicted, np.nan)
    norm_err = abs_err / np.sqrt(1.0 + predicted)
    interior = np.abs(rs) <= 2.0 * math.sqrt(x) * (1.0 - 1.0 / math.log(x))
    return ErrorReport(
        x=x,
        r=rs,
        observed=observed,
        predicted=predicted,
        abs_err=abs_err,
        rel_err=rel_err,
        norm_err=norm_err,
        interior=interior,
        nonzero_constant=consts > 0,
        threshold=threshold,
    )


@dataclass(frozen=True, eq=False)
class HistogramReport:
    """Normalized traces a(p) / (2 sqrt p) binned on [-1, 1].

    For a CM curve the supersingular records (a = 0) form an atom excluded
    from the bins and reported separately with its frequency.
    """

    edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    sup_cdf_distance: float
    atom_count: int
    atom_share: Optional[float]  # CM only; None without CM


def sato_tate_report(table: TraceTable, model: DensityModel, bins: int = 40) -> HistogramReport:
    if bins < 10:
        raise ValueError("need at least 10 bins")
    if len(table) == 0:
        raise EmptyTableError("cannot bin an empty table")
    z = table.traces / (2.0 * np.sqrt(table.ps.astype(np.float64)))
    cm = model.cm
    atom_count = int(np.count_nonzero(table.traces == 0)) if cm else 0
    zs = z[table.traces != 0] if cm else z
    edges = np.linspace(-1.0, 1.0, bins + 1)
    counts, _ = np.histogram(zs, bins=edges)
    n_primes = len(table) + len(table.bad_primes)
    expected = np.array(
        [n_primes * phi_integral(model, edges[i], edges[i + 1]) for i in range(bins)]
    )
    # empirical CDF at the bin boundaries vs the (conditional) model CDF
    sorted_z = np.sort(zs)
    n = sorted_z.shape[0]
    scale = 2.0 if cm else 1.0  # condition the arcsine law on the non-atom mass
    sup = 0.0
    for e in edges:
        emp = np.searchsorted(sorted_z, e, side="right") / n
        mod = scale * phi_integral(model, -1.0, float(e))
        sup = max(sup, abs(emp - mod))
    return HistogramReport(
        edges=edges,
        counts=counts,
        expected=expected,
        sup_cdf_distance=float(sup),
        atom_count=atom_count,
        atom_share=(atom_count / len(table)) if cm else None,
    )


# --------------------------------------------------------------------------
# CSV emission (fixed headers, atomically written)
# --------------------------------------------------------------------------

_FIGURE_COLUMNS = (
    ("figure1.csv", "observed"),
    ("figure2.csv", "predicted"),
    ("figure3.csv", "abs_err"),
    ("figure4.csv", "rel_err"),
    ("figure5.csv", "norm_err"),
)


def write_figure_csvs(report: ErrorReport, out_dir: str) -> List[str]:
    """One CSV per figure: r against one column of the residual table."""
    paths = []
    data = {
        "observed": report.observed,
        "predicted": report.predicted,
        "abs_err": report.abs_err,
        "rel_err": report.rel_err,
        "norm_err": report.norm_err,
    }
    for name, col in _FIGURE_COLUMNS:
        rows = ["r,%s" % col]
        vals = data[col]
        for r, v in zip(report.r, vals):
            rows.append("%d,%s" % (r, format(float(v), ".12g")))
        path = os.path.join(out_dir, name)
        atomic_write_text(path, "\n".join(rows) + "\n")
        paths.append(path)
    return paths


def write_chebotarev_csv(rows: Sequence[ChebotarevRow], path: str) -> None:
    out = ["a,count,share,delta,rel_dev"]
    for row in rows:
        delta = "" if row.delta is None else "%d/%d" % (row.delta.numerator, row.delta.denominator)
        rel = "" if row.rel_dev is None else format(row.rel_dev, ".6g")
        out.append("%d,%d,%s,%s,%s" % (row.a, row.count, format(row.share, ".12g"), delta, rel))
    atomic_write_text(path, "\n".join(out) + "\n")


def write_satotate_csv(report: HistogramReport, path: str) -> None:
    out = ["z_lo,z_hi,count,expected"]
    for i in range(report.counts.shape[0]):
        out.append(
            "%s,%s,%d,%s"
            % (
                format(report.edges[i], ".6g"),
                format(report.edges[i + 1], ".6g"),
                int(report.counts[i]),
                format(float(report.expected[i]), ".12g"),
            )
        )
    out.append(
        "# sup_cdf_distance=%s atom_count=%d atom_share=%s"
        % (
            format(report.sup_cdf_distance, ".6g"),
            report.atom_count,
            "" if report.atom_share is None else format(report.atom_share, ".6g"),
        )
    )
    atomic_write_text(path, "\n".join(out) + "\n")


def write_averaging_csv(results: Sequence[AveragingResult], path: str) -> None:
    out = ["q,a,A,B,sum,predicted,deviation"]
    for res in results:
        out.append(
            "%d,%d,%d,%d,%s,%s,%s"
            % (
                res.q,
                res.a,
                res.lo,
                res.span,
                format(res.total, ".12g"),
                format(res.predicted, ".12g"),
                format(res.deviation, ".6g"),
            )
        )
    atomic_write_text(path, "\n".join(out) + "\n")
