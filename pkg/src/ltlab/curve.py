"""Elliptic curves y^2 = x^3 + ax + b over Q: discriminants, CM lookup, reduction."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import BadReductionError, CurveConfigError, SingularCurveError

_I64_MIN = -(1 << 63)
_I64_MAX = (1 << 63) - 1

# The thirteen rational CM j-invariants with their order discriminants.
CM_J_TABLE = {
    0: -3,
    1728: -4,
    -3375: -7,
    8000: -8,
    -32768: -11,
    54000: -12,
    287496: -16,
    -884736: -19,
    -12288000: -27,
    16581375: -28,
    -884736000: -43,
    -147197952000: -67,
    -262537412640768000: -163,
}


def discriminant(a: int, b: int) -> int:
    """Discriminant -16(4a^3 + 27b^2) of y^2 = x^3 + ax + b."""
    d = -16 * (4 * a**3 + 27 * b**2)
    if d == 0:
        raise SingularCurveError("4a^3 + 27b^2 = 0 for a=%d, b=%d" % (a, b))
    return d


def j_invariant(a: int, b: int) -> Fraction:
    denom = 4 * a**3 + 27 * b**2
    if denom == 0:
        raise SingularCurveError("singular model has no j-invariant")
    return Fraction(6912 * a**3, denom)


def classify_cm(j: Union[int, Fraction]) -> Optional[int]:
    """Order discriminant for a rational CM j-invariant, else None."""
    j = Fraction(j)
    if j.denominator != 1:
        return None
    return CM_J_TABLE.get(j.numerator)


@dataclass(frozen=True)
class RationalCurve:
    """A short Weierstrass model over Q.

    `cm_disc` is None for a curve without complex multiplication, else the
    (negative) discriminant of the CM order.  `serre_curve` is asserted by
    configuration, never proven here.  `level` optionally pins the division
    level m at which the Galois image is known; `trace_counts_path` optionally
    points at a user-supplied trace-count table for that level.
    """

    label: str
    a: int
    b: int
    delta: int
    cm_disc: Optional[int] = None
    serre_curve: bool = False
    level: Optional[int] = None
    trace_counts_path: Optional[str] = None

    def __post_init__(self):
        if not (_I64_MIN <= self.a <= _I64_MAX and _I64_MIN <= self.b <= _I64_MAX):
            raise CurveConfigError("coefficients must fit in 64-bit integers")
        if self.delta != discriminant(self.a, self.b):
            raise ValueError("discriminant does not match coefficients")
        if self.cm_disc is not None:
            if self.cm_disc >= 0 or self.cm_disc % 4 not in (0, 1):
                raise ValueError("CM discriminant must be negative and = 0 or 1 mod 4")

    @property
    def has_cm(self) -> bool:
        return self.cm_disc is not None


@dataclass(frozen=True)
class ReducedCurve:
    """Coefficients of a good reduction modulo p."""

    p: int
    a_mod: int
    b_mod: int


def make_curve(
    label: str,
    a: int,
    b: int,
    cm_disc: Optional[int] = None,
    serre_curve: bool = False,
    level: Optional[int] = None,
    trace_counts_path: Optional[str] = None,
) -> RationalCurve:
    """Build a RationalCurve, classifying CM by j-invariant when not supplied."""
    delta = discriminant(a, b)
    found = classify_cm(j_invariant(a, b))
    if cm_disc is None:
        cm_disc = found
    elif cm_disc != found:
        raise CurveConfigError(
            "cm_discriminant %s does not match the j-invariant lookup (%s)" % (cm_disc, found)
        )
    if serre_curve and cm_disc is not None:
        raise CurveConfigError("a CM curve cannot be a Serre curve")
    return RationalCurve(
        label=label,
        a=a,
        b=b,
        delta=delta,
        cm_disc=cm_disc,
        serre_curve=serre_curve,
        level=level,
        trace_counts_path=trace_counts_path,
    )


def reduce_curve(curve: RationalCurve, p: int) -> ReducedCurve:
    """Reduce mod p; fails exactly when p divides the discriminant."""
    if p < 2:
        raise ValueError("p must be a prime")
    if curve.delta % p == 0:
        raise BadReductionError("p=%d divides the discriminant of %s" % (p, curve.label))
    return ReducedCurve(p=p, a_mod=curve.a % p, b_mod=curve.b % p)


def is_good_prime(curve: RationalCurve, p: int) -> bool:
    """Good primes for table building: p >= 5 and p does not divide delta.

    2 and 3 are always rejected; short-Weierstrass counting is not done there.
    """
    return p >= 5 and curve.delta % p != 0


_CONFIG_KEYS = {"label", "a", "b", "cm_discriminant", "serre_curve", "m_E", "trace_counts"}


def parse_curve_config(text: str, base_dir: str = ".") -> RationalCurve:
    """Parse a key = value curve description (see README for the format)."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CurveConfigError("line %d: expected key = value" % lineno)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise CurveConfigError("line %d: unknown key %r" % (lineno, key))
        if key in values:
            raise CurveConfigError("line %d: duplicate key %r" % (lineno, key))
        values[key] = val
    for req in ("label", "a", "b"):
        if req not in values:
            raise CurveConfigError("missing required key %r" % req)
    try:
        a = int(values["a"])
        b = int(values["b"])
        cm = int(values["cm_discriminant"]) if "cm_discriminant" in values else None
        level = int(values["m_E"]) if "m_E" in values else None
    except ValueError as exc:
        raise CurveConfigError("bad integer value: %s" % exc) from None
    serre = values.get("serre_curve", "false")
    if serre not in ("true", "false"):
        raise CurveConfigError("serre_curve must be true or false")
    if level is not None and level < 1:
        raise CurveConfigError("m_E must be positive")
    counts = values.get("trace_counts")
    if counts is not None and not os.path.isabs(counts):
        counts = os.path.join(base_dir, counts)
    return make_curve(
        label=values["label"],
        a=a,
        b=b,
        cm_disc=cm,
        serre_curve=(serre == "true"),
        level=level,
        trace_counts_path=counts,
    )


def load_curve_config(path: str) -> RationalCurve:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CurveConfigError("cannot read curve config %s: %s" % (path, exc)) from None
    return parse_curve_config(text, base_dir=os.path.dirname(os.path.abspath(path)))
