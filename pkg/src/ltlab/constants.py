"""The prime-counting constants: local Euler factors, truncated products, and
the multiplicative cross-check machinery (f, g, and the C^{-1} identity).

Local cardinalities follow the closed forms
    no CM:  |H(l)| = l(l-1)^2(l+1),  |H(l)_r| = l^2(l-1) or l(l^2-l-1)
    CM:     |H(l)| = (l-1)(l-chi),   |H(l)_r| = l-1 or l-(1+chi)
for primes l coprime to the level; the galois module checks these against
brute-force enumeration, so the two routes stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Tuple

from .curve import RationalCurve
from .errors import CMZeroTraceError, CurveConfigError
from .galois import (
    CMOrder,
    GaloisImage,
    default_level,
    empirical_main_factor,
    image_for_curve,
    main_factor,
)
from .numtheory import factorize
from .sieve_table import TraceTable, sieve_primes
from .util import atomic_write_text

DEFAULT_EULER_CUTOFF = 10**6

PHI0_NONCM = 2.0 / math.pi
PHI0_CM = 1.0 / (2.0 * math.pi)


def h_order(ell: int, cm: Optional[CMOrder]) -> int:
    """|H(ell)| for an admissible prime ell (unramified if CM)."""
    if cm is None:
        return ell * (ell - 1) ** 2 * (ell + 1)
    return (ell - 1) * (ell - cm.chi(ell))


def h_trace_count(ell: int, r_divisible: bool, cm: Optional[CMOrder]) -> int:
    """|H(ell)_r|, depending only on whether ell divides r."""
    if cm is None:
        return ell * ell * (ell - 1) if r_divisible else ell * (ell * ell - ell - 1)
    if r_divisible:
        return ell - 1
    return ell - (1 + cm.chi(ell))


def euler_local(ell: int, r_divisible: bool, cm: Optional[CMOrder] = None) -> float:
    """Local factor ell * |H(ell)_r| / |H(ell)| of the Euler product."""
    return float(Fraction(ell * h_trace_count(ell, r_divisible, cm), h_order(ell, cm)))


def _log_ndiv(ell: float, chi: int, cm: bool) -> float:
    if not cm:
        return math.log1p(-1.0 / ((ell - 1.0) * (ell * ell - 1.0)))
    return math.log1p(-chi / ((ell - 1.0) * (ell - chi)))


def _log_div(ell: float, chi: int, cm: bool) -> float:
    if not cm:
        return math.log1p(1.0 / (ell * ell - 1.0))
    return math.log1p(chi / (ell - chi))


class ConstantValue(NamedTuple):
    value: float
    rel_bound: float  # rigorous bound on the relative truncation error


@dataclass(frozen=True, eq=False)
class ConstantProfile:
    """Everything needed to evaluate the constant for every integer r."""

    m: int
    phi0: float
    main_factors: Tuple[Fraction, ...]  # indexed by r mod m
    cm: Optional[CMOrder]
    cutoff: int
    tail_bound: float
    base_ndiv: float  # prod over ell <= cutoff, ell coprime to m, of the ell-nmid-r factor
    base_div: Optional[float]  # same with every factor in the ell | r form (r = 0 case)
    tail_zero: Optional[float]

    def __post_init__(self):
        if len(self.main_factors) != self.m:
            raise ValueError("need a main factor for every residue mod m")
        if any(f < 0 for f in self.main_factors):
            raise ValueError("main factors cannot be negative")


def _build_profile(
    m: int,
    main_factors: Tuple[Fraction, ...],
    cm: Optional[CMOrder],
    cutoff: int,
) -> ConstantProfile:
    if cutoff < 10**3:
        raise ValueError("Euler cutoff below 10^3 is not supported")
    is_cm = cm is not None
    if is_cm:
        # the unit-group cardinalities assume every prime in the Euler
        # product is unramified and odd, so the level must absorb 4 and
        # all ramified primes
        if m % 4 != 0 or any(m % p != 0 for p in cm.ramified_primes()):
            raise ValueError(
                "CM level %d must be divisible by 4 and by every ramified prime %s"
                % (m, list(cm.ramified_primes()))
            )
    primes = sieve_primes(cutoff)
    logs_n = []
    logs_d = []
    for p in primes:
        ell = int(p)
        if m % ell == 0:
            continue
        chi = cm.chi(ell) if is_cm else 0
        logs_n.append(_log_ndiv(float(ell), chi, is_cm))
        if not is_cm:
            logs_d.append(_log_div(float(ell), chi, is_cm))
    base_ndiv = math.exp(math.fsum(logs_n))
    # Tails over integers majorise the prime sums: |log f| <= 2/l^3 (no CM,
    # l nmid r), 2/(l-1)^2 (CM), 2/l^2 (no CM, l | r, used only at r = 0).
    if is_cm:
        tail = math.expm1(2.0 / (cutoff - 1))
        base_div = None
        tail_zero = None
    else:
        tail = math.expm1(1.0 / (cutoff * float(cutoff)))
        base_div = math.exp(math.fsum(logs_d))
        tail_zero = math.expm1(2.0 / cutoff)
    return ConstantProfile(
        m=m,
        phi0=PHI0_CM if is_cm else PHI0_NONCM,
        main_factors=main_factors,
        cm=cm,
        cutoff=cutoff,
        tail_bound=tail,
        base_ndiv=base_ndiv,
        base_div=base_div,
        tail_zero=tail_zero,
    )


def profile_from_image(
    image: GaloisImage, cm: Optional[CMOrder] = None, cutoff: int = DEFAULT_EULER_CUTOFF
) -> ConstantProfile:
    factors = tuple(main_factor(image, r) for r in range(image.level))
    return _build_profile(image.level, factors, cm, cutoff)


def profile_from_table(
    curve: RationalCurve,
    table: TraceTable,
    cutoff: int = DEFAULT_EULER_CUTOFF,
    level: Optional[int] = None,
) -> ConstantProfile:
    """Profile with empirically estimated main factors (the CM route)."""
    m = level if level is not None else default_level(curve)
    factors = tuple(empirical_main_factor(table, m, r)[0] for r in range(m))
    cm = CMOrder(curve.cm_disc) if curve.has_cm else None
    return _build_profile(m, factors, cm, cutoff)


def profile_for_curve(
    curve: RationalCurve,
    table: Optional[TraceTable] = None,
    cutoff: int = DEFAULT_EULER_CUTOFF,
) -> ConstantProfile:
    """Exact main factors when derivable (Serre construction or user counts),
    else the empirical estimate from a trace table."""
    image = image_for_curve(curve)
    if image is not None:
        cm = CMOrder(curve.cm_disc) if curve.has_cm else None
        return profile_from_image(image, cm, cutoff)
    if table is None:
        raise CurveConfigError(
            "curve %s has no exact image; a trace table is needed for empirical "
            "main factors" % curve.label
        )
    return profile_from_table(curve, table, cutoff)


def constant(profile: ConstantProfile, r: int) -> ConstantValue:
    """The prime-counting constant for trace value r, with its truncation bound.

    Exactly zero (bound zero) when the main factor vanishes.  Primes dividing
    r are handled exactly from the factorisation of r, so the truncation
    bound only covers the missing ell-nmid-r factors beyond the cutoff.
    """
    is_cm = profile.cm is not None
    if is_cm and r == 0:
        raise CMZeroTraceError("r = 0 has no finite constant for a CM curve")
    mf = profile.main_factors[r % profile.m]
    if mf == 0:
        return ConstantValue(0.0, 0.0)
    if r == 0:
        return ConstantValue(profile.phi0 * float(mf) * profile.base_div, profile.tail_zero)
    prod = profile.base_ndiv
    for ell in factorize(r):
        if profile.m % ell == 0:
            continue
        chi = profile.cm.chi(ell) if is_cm else 0
        div = math.exp(_log_div(float(ell), chi, is_cm))
        if ell <= profile.cutoff:
            prod *= div / math.exp(_log_ndiv(float(ell), chi, is_cm))
        else:
            prod *= div
    return ConstantValue(profile.phi0 * float(mf) * prod, profile.tail_bound)


# --------------------------------------------------------------------------
# the averaging machinery of the constant: f, g = f * mu, and C^{-1}
# --------------------------------------------------------------------------


def f_of(r: int, m: int, cm: Optional[CMOrder] = None) -> float:
    """f(r) = prod over primes l | r coprime to m of |H(l)_0| / |H(l)_1|."""
    if r == 0:
        raise ValueError("f is a function of nonzero integers")
    out = 1.0
    for ell in factorize(r):
        if m % ell != 0:
            out *= h_trace_count(ell, True, cm) / h_trace_count(ell, False, cm)
    return out


def g_of(d: int, m: int, cm: Optional[CMOrder] = None) -> float:
    """Dirichlet convolution g = f * mu; vanishes off squarefree d coprime to m."""
    if d < 1:
        raise ValueError("g is a function of positive integers")
    if math.gcd(d, m) > 1:
        return 0.0
    out = 1.0
    for ell, e in factorize(d).items():
        if e > 1:
            return 0.0
        h0 = h_trace_count(ell, True, cm)
        h1 = h_trace_count(ell, False, cm)
        out *= (h0 - h1) / h1
    return out


def verify_C_inverse(profile: ConstantProfile, cutoff: Optional[int] = None) -> float:
    """Residual |C * prod(1 + g(l)/l) - 1| over primes l <= cutoff coprime to m.

    The two products are accumulated independently, term by term; the identity
    is exact prime by prime, so the residual measures rounding only.
    """
    L = cutoff if cutoff is not None else profile.cutoff
    if L < 10**3:
        raise ValueError("cutoff below 10^3 is not supported")
    cm = profile.cm
    is_cm = cm is not None
    logs_c = []
    logs_g = []
    for p in sieve_primes(L):
        ell = int(p)
        if profile.m % ell == 0:
            continue
        h = h_order(ell, cm)
        h1 = h_trace_count(ell, False, cm)
        h0 = h_trace_count(ell, True, cm)
        logs_c.append(math.log(ell * h1 / h))
        logs_g.append(math.log1p((h0 - h1) / (h1 * float(ell))))
    return abs(math.exp(math.fsum(logs_c) + math.fsum(logs_g)) - 1.0)


def write_constants_csv(profile: ConstantProfile, r_lo: int, r_hi: int, path: str) -> None:
    """Dump r, main_factor (num/den), constant, tail bound for r in [r_lo, r_hi]."""
    rows = ["r,main_factor,C,tail_bound"]
    for r in range(r_lo, r_hi + 1):
        if profile.cm is not None and r == 0:
            continue
        mf = profile.main_factors[r % profile.m]
        val = constant(profile, r)
        rows.append(
            "%d,%d/%d,%s,%s"
            % (r, mf.numerator, mf.denominator, format(val.value, ".12g"), format(val.rel_bound, ".3g"))
        )
    atomic_write_text(path, "\n".join(rows) + "\n")
