"""Command-line front end: build tables, dump constants and predictions,
emit figure CSVs, and run the consistency checks.

Exit codes: 0 pass, 1 check failure, 2 usage or bad config, 3 I/O, 4 budget.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import List, Optional

from . import analysis, constants as consts, density, galois
from .curve import RationalCurve, load_curve_config
from .errors import CurveConfigError, LtlabError, MissingTableError
from .sieve_table import TraceTable, build_table, load_table, save_table
from .util import atomic_write_text

_CACHE_ENV = "LTLAB_CACHE_DIR"


def _cache_dir(override: Optional[str] = None) -> str:
    if override:
        return override
    return os.environ.get(_CACHE_ENV, os.path.join(os.getcwd(), "lttb-cache"))


def _table_path(curve: RationalCurve, x: int, out: Optional[str]) -> str:
    if out:
        return out
    return os.path.join(_cache_dir(), "%s-x%d.lttb" % (curve.label, x))


def _load_for(curve: RationalCurve, x: int, path: Optional[str]) -> TraceTable:
    p = _table_path(curve, x, path)
    table = load_table(p)
    if (table.a, table.b) != (curve.a, curve.b):
        raise CurveConfigError("table %s belongs to a different curve" % p)
    if table.x_max < x:
        raise MissingTableError("table %s stops at x=%d < %d" % (p, table.x_max, x))
    return table


def _profile(curve, table, cutoff):
    return consts.profile_for_curve(curve, table, cutoff)


def cmd_build(args) -> int:
    curve = load_curve_config(args.curve)
    table = build_table(curve, args.x, workers=args.workers)
    path = _table_path(curve, args.x, args.out)
    save_table(table, path)
    print("wrote %s (%d records)" % (path, len(table)))
    return 0


def cmd_constants(args) -> int:
    curve = load_curve_config(args.curve)
    table = None
    if galois.image_for_curve(curve) is None:
        # no exact image: main factors come from trace data
        table = _load_for(curve, args.x, args.table)
    profile = _profile(curve, table, args.euler_cutoff)
    out = args.out or "constants.csv"
    consts.write_constants_csv(profile, args.r_min, args.r_max, out)
    print("wrote %s" % out)
    return 0


def cmd_predict(args) -> int:
    curve = load_curve_config(args.curve)
    table = None
    if galois.image_for_curve(curve) is None:
        table = _load_for(curve, args.x, args.table)
    profile = _profile(curve, table, args.euler_cutoff)
    model = density.model_for_curve(curve)
    rows = ["r,F"]
    for r in range(args.r_min, args.r_max + 1):
        if curve.has_cm and r == 0:
            continue
        c = consts.constant(profile, r).value
        f = density.main_term(c, r, float(args.x), model, args.tol)
        rows.append("%d,%s" % (r, format(f, ".12g")))
    out = args.out or "predict.csv"
    atomic_write_text(out, "\n".join(rows) + "\n")
    print("wrote %s" % out)
    return 0


def cmd_report(args) -> int:
    curve = load_curve_config(args.curve)
    table = _load_for(curve, args.x, args.table)
    profile = _profile(curve, table, args.euler_cutoff)
    model = density.model_for_curve(curve)
    report = analysis.error_report(table, profile, model, tol=args.tol)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    paths = analysis.write_figure_csvs(report, out_dir)
    for p in paths:
        print("wrote %s" % p)
    return 0


def _check_chebotarev(curve, table, args, out_dir) -> List[str]:
    image = galois.image_for_curve(curve)
    if image is None:
        raise CurveConfigError(
            "chebotarev check needs an exact image (Serre curve or user counts)"
        )
    q = args.q or image.level
    rows = analysis.chebotarev_report(table, q, image)
    analysis.write_chebotarev_csv(rows, os.path.join(out_dir, "chebotarev.csv"))
    lines = []
    for row in rows:
        if row.delta == 0:
            ok = row.count <= 2
            lines.append("%s chebotarev a=%d: delta=0, count=%d" % (_pf(ok), row.a, row.count))
        else:
            ok = row.rel_dev < 0.03
            lines.append(
                "%s chebotarev a=%d: share=%.5f delta=%.5f rel=%.4f"
                % (_pf(ok), row.a, row.share, float(row.delta), row.rel_dev)
            )
    return lines


def _check_satotate(curve, table, args, out_dir) -> List[str]:
    model = density.model_for_curve(curve)
    rep = analysis.sato_tate_report(table, model, bins=args.bins)
    analysis.write_satotate_csv(rep, os.path.join(out_dir, "satotate.csv"))
    lines = []
    if model.cm:
        ok = rep.sup_cdf_distance < 0.02
        lines.append("%s sato-tate non-atom sup distance %.5f < 0.02" % (_pf(ok), rep.sup_cdf_distance))
        ok2 = abs(rep.atom_share - 0.5) < 0.02
        lines.append("%s supersingular share %.5f within 0.02 of 1/2" % (_pf(ok2), rep.atom_share))
    else:
        ok = rep.sup_cdf_distance < 0.01
        lines.append("%s sato-tate sup distance %.5f < 0.01" % (_pf(ok), rep.sup_cdf_distance))
    return lines


def _check_averaging(curve, table, args, out_dir) -> List[str]:
    profile = _profile(curve, table, args.euler_cutoff)
    lines = []
    results = []
    if not curve.has_cm:
        res = analysis.average_constants(profile, 0, 1, 0, 10**5)
        results.append(res)
        rel = res.deviation / res.predicted
        lines.append("%s averaging q=1 rel deviation %.2e < 1e-3" % (_pf(rel < 1e-3), rel))
        q = args.q or profile.m
        for a in range(q):
            res = analysis.average_constants(profile, a, q, 0, 10**5)
            results.append(res)
            if res.predicted == 0:
                ok = res.total < 1e-9
                lines.append("%s averaging q=%d a=%d: empty class sum %.2e" % (_pf(ok), q, a, res.total))
                continue
            rel = res.deviation / res.predicted
            lines.append(
                "%s averaging q=%d a=%d rel deviation %.2e < 1e-2" % (_pf(rel < 1e-2), q, a, rel)
            )
    else:
        grid = [(0, 10**5, 1), (-(10**4), 2 * 10**4, 1), (0, 10**5, 2), (10**3, 10**4, 4)]
        for lo, span, q in grid:
            for a in range(q):
                res = analysis.average_constants(profile, a, q, lo, span)
                results.append(res)
                m_big = max(abs(lo), abs(lo + span), 3)
                bound = 50.0 * q * math.log(m_big) ** 3
                lines.append(
                    "%s averaging q=%d a=%d A=%d B=%d deviation %.3f <= %.1f"
                    % (_pf(res.deviation <= bound), q, a, lo, span, res.deviation, bound)
                )
    analysis.write_averaging_csv(results, os.path.join(out_dir, "averaging.csv"))
    return lines


def _check_invariants(curve, table, args, out_dir) -> List[str]:
    import numpy as np

    from .sieve_table import sieve_primes

    lines = []
    hasse_ok = not np.any(table.traces.astype(np.int64) ** 2 > 4 * table.ps)
    lines.append("%s hasse bound on all %d records" % (_pf(hasse_ok), len(table)))
    increasing = len(table) < 2 or bool(np.all(np.diff(table.ps) > 0))
    lines.append("%s record primes strictly increasing" % _pf(increasing))
    primes = sieve_primes(table.x_max)
    expected = int(primes.shape[0]) - len(table.bad_primes)
    lines.append(
        "%s completeness: %d records = pi(x) - #bad = %d" % (_pf(len(table) == expected), len(table), expected)
    )
    return lines


def _pf(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


_CHECKS = {
    "chebotarev": _check_chebotarev,
    "satotate": _check_satotate,
    "averaging": _check_averaging,
    "invariants": _check_invariants,
}


def cmd_check(args) -> int:
    curve = load_curve_config(args.curve)
    table = _load_for(curve, args.x, args.table)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    lines = _CHECKS[args.which](curve, table, args, out_dir)
    for line in lines:
        print(line)
    return 0 if all(l.startswith("PASS") for l in lines) else 1


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ltlab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, x_required=True):
        p.add_argument("--curve", required=True, help="curve config file")
        p.add_argument("--x", type=int, required=x_required, help="prime cutoff")
        p.add_argument("--table", help="explicit trace-table path (default: cache)")
        p.add_argument("--euler-cutoff", type=int, default=consts.DEFAULT_EULER_CUTOFF)
        p.add_argument("--tol", type=float, default=density.DEFAULT_TOL)
        p.add_argument("--out", help="output file or directory")

    p = sub.add_parser("build", help="build and persist a trace table")
    p.add_argument("--curve", required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", help="table path (default: cache dir)")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("constants", help="dump the constants over an r range")
    common(p)
    p.add_argument("--r-min", type=int, required=True)
    p.add_argument("--r-max", type=int, required=True)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("predict", help="dump the refined main term over an r range")
    common(p)
    p.add_argument("--r-min", type=int, required=True)
    p.add_argument("--r-max", type=int, required=True)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("report", help="write the five figure CSVs")
    common(p)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("check", help="run a consistency check suite")
    common(p)
    p.add_argument("--which", choices=sorted(_CHECKS), required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--bins", type=int, default=40)
    p.set_defaults(fn=cmd_check)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except LtlabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
