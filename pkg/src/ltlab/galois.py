"""Finite mod-n images of Galois representations and their trace-class densities.

Non-CM curves see subgroups of GL2(Z/nZ); CM curves see subgroups of the unit
group of O/nO for the CM order O.  Everything here is exact: enumeration plus
Fraction arithmetic, no floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .curve import RationalCurve, make_curve
from .errors import EmptyTableError, LevelTooLargeError, RamifiedPrimeError
from .numtheory import factorize, kronecker, squarefree_kernel
from .sieve_table import TraceTable

KIND_MATRIX = "matrix"
KIND_CM_UNITS = "cm-units"
KIND_USER = "user"

ENUMERATION_BUDGET = 10**8

# Keep explicit element lists only below this group order.
_ELEMENT_LIMIT = 300_000


@dataclass(frozen=True)
class CMOrder:
    """An imaginary quadratic order, identified by its discriminant."""

    disc: int

    def __post_init__(self):
        if self.disc >= 0 or self.disc % 4 not in (0, 1):
            raise ValueError("order discriminant must be negative and = 0 or 1 mod 4")

    def chi(self, ell: int) -> int:
        """Splitting character at ell: +1 split, -1 inert, 0 ramified."""
        return kronecker(self.disc, ell)

    def ramified_primes(self) -> Tuple[int, ...]:
        return tuple(sorted(factorize(self.disc)))


@dataclass(frozen=True, eq=False)
class GaloisImage:
    """A finite image at some level, reduced to what the constants need.

    `trace_counts[a]` is the number of elements of trace a mod level; the
    element list is kept only when small enough to be useful for projections.
    """

    level: int
    kind: str
    order: int
    trace_counts: Tuple[int, ...]
    elements: Optional[Tuple] = None

    def __post_init__(self):
        if len(self.trace_counts) != self.level:
            raise ValueError("need one trace count per residue mod level")
        if sum(self.trace_counts) != self.order:
            raise ValueError("trace counts must partition the group")
        if self.elements is not None and len(self.elements) != self.order:
            raise ValueError("element list disagrees with the order")


def gl2_order(n: int) -> int:
    """|GL2(Z/nZ)| by the standard local formula."""
    if n < 1:
        raise ValueError("level must be positive")
    total = 1
    for p, e in factorize(n).items():
        total *= p ** (4 * (e - 1)) * (p * p - 1) * (p * p - p)
    return total


def _check_budget(order: int, budget: int) -> None:
    if order > budget:
        raise LevelTooLargeError("group order %d exceeds the budget %d" % (order, budget))


def full_matrix_group(n: int, budget: int = ENUMERATION_BUDGET) -> GaloisImage:
    """All of GL2(Z/nZ) with exact trace counts.

    Counting uses the convolution #{(b,c): bc = w} so the work is O(n^2),
    not O(n^4); the explicit element list is materialised only for small n.
    """
    if n == 1:
        return GaloisImage(1, KIND_MATRIX, 1, (1,), ((0, 0, 0, 0),))
    order = gl2_order(n)
    _check_budget(order, budget)
    v = np.arange(n, dtype=np.int64)
    coprime = np.array([math.gcd(int(w), n) == 1 for w in range(n)])
    bc = np.bincount(((v[:, None] * v[None, :]) % n).ravel(), minlength=n)
    # inv_count[w] = #{(b,c) : w - bc invertible mod n}
    inv_count = np.array(
        [int(bc[coprime[(w - v) % n]].sum()) for w in range(n)], dtype=np.int64
    )
    counts = np.zeros(n, dtype=np.int64)
    for a in range(n):
        tr = (a + v) % n
        np.add.at(counts, tr, inv_count[(a * v) % n])
    counts_t = tuple(int(c) for c in counts)
    elements = None
    if order <= _ELEMENT_LIMIT:
        elements = tuple(
            (a, b, c, d)
            for a in range(n)
            for b in range(n)
            for c in range(n)
            for d in range(n)
            if coprime[(a * d - b * c) % n]
        )
    return GaloisImage(n, KIND_MATRIX, order, counts_t, elements)


def cm_unit_group(order: CMOrder, ell: int, budget: int = ENUMERATION_BUDGET) -> GaloisImage:
    """(O/ell O)^* for an unramified prime ell, by enumerating the quotient ring.

    O = Z[w] with w^2 = Dw - D(D-1)/4; an element u + vw is a unit exactly
    when its norm is nonzero mod ell, and its trace is 2u + vD.
    """
    if order.chi(ell) == 0:
        raise RamifiedPrimeError("%d ramifies in the order of discriminant %d" % (ell, order.disc))
    d = order.disc
    h = (ell - 1) * (ell - order.chi(ell))
    _check_budget(h, budget)
    u = np.arange(ell, dtype=np.int64)
    norm_w = d * (d - 1) // 4
    # norm(u + vw) = u^2 + uvD + v^2 * w wbar
    norm = (u[:, None] ** 2 % ell + (u[:, None] * u[None, :]) % ell * (d % ell) + (u[None, :] ** 2 % ell) * (norm_w % ell)) % ell
    unit = norm != 0
    tr = (2 * u[:, None] + u[None, :] * (d % ell)) % ell
    counts = np.bincount(tr[unit].ravel(), minlength=ell)
    elements = None
    total = int(unit.sum())
    if total <= _ELEMENT_LIMIT:
        uu, vv = np.nonzero(unit)
        elements = tuple(zip(uu.tolist(), vv.tolist()))
    return GaloisImage(ell, KIND_CM_UNITS, total, tuple(int(c) for c in counts), elements)


# --------------------------------------------------------------------------
# Serre-curve images
# --------------------------------------------------------------------------

# Sign of the permutation each invertible matrix mod 2 induces on the three
# nonzero vectors of F_2^2; index is a*8 + b*4 + c*2 + d.
def _sign_table() -> Tuple[int, ...]:
    vecs = ((0, 1), (1, 0), (1, 1))
    table = [0] * 16
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    if (a * d - b * c) % 2 == 0:
                        continue
                    perm = []
                    for (x, y) in vecs:
                        img = ((a * x + b * y) % 2, (c * x + d * y) % 2)
                        perm.append(vecs.index(img))
                    inversions = sum(
                        1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j]
                    )
                    table[a * 8 + b * 4 + c * 2 + d] = -1 if inversions % 2 else 1
    return tuple(table)


_SIGN_MOD2 = _sign_table()


def serre_level(d: int) -> int:
    """Image level for a Serre curve with squarefree discriminant kernel d."""
    if d == 0 or squarefree_kernel(d) != d:
        raise ValueError("d must be a nonzero squarefree integer")
    return 2 * abs(d) if d % 4 == 1 else 4 * abs(d)


def serre_image(d: int, n: Optional[int] = None, budget: int = ENUMERATION_BUDGET) -> GaloisImage:
    """The index-2 subgroup {g : sign(g mod 2) = chi_d(det g)} of GL2(Z/nZ).

    This is the mod-n Galois image of a Serre curve whose discriminant has
    squarefree kernel d; the level defaults to the minimal one.
    """
    m = serre_level(d)
    if n is None:
        n = m
    if n % m != 0:
        raise ValueError("level %d is not a multiple of the Serre level %d" % (n, m))
    order = gl2_order(n) // 2
    _check_budget(order, budget)
    chi_table = np.array([kronecker(d, v) for v in range(n)], dtype=np.int64)
    v = np.arange(n, dtype=np.int64)
    b3, c3, d3 = np.meshgrid(v, v, v, indexing="ij")
    b3, c3, d3 = b3.ravel(), c3.ravel(), d3.ravel()
    counts = np.zeros(n, dtype=np.int64)
    keep = []
    keep_elements = order <= _ELEMENT_LIMIT
    for a in range(n):
        det = (a * d3 - b3 * c3) % n
        sign_idx = (a % 2) * 8 + (b3 % 2) * 4 + (c3 % 2) * 2 + (d3 % 2)
        eps = np.array(_SIGN_MOD2, dtype=np.int64)[sign_idx]
        mask = (np.gcd(det, n) == 1) & (eps == chi_table[det])
        np.add.at(counts, (a + d3[mask]) % n, 1)
        if keep_elements:
            keep.extend(
                (a, int(bb), int(cc), int(dd))
                for bb, cc, dd in zip(b3[mask], c3[mask], d3[mask])
            )
    total = int(counts.sum())
    if total != order:
        raise AssertionError("index-2 filter returned %d of %d elements" % (total, order))
    return GaloisImage(n, KIND_MATRIX, order, tuple(int(c) for c in counts),
                       tuple(keep) if keep_elements else None)


# --------------------------------------------------------------------------
# densities and main factors
# --------------------------------------------------------------------------


def delta_aq(image: GaloisImage, a: int, q: int) -> Fraction:
    """Chebotarev factor: proportion of image elements with trace = a mod q."""
    if q < 1 or image.level % q != 0:
        raise ValueError("q must divide the image level")
    total = sum(image.trace_counts[b] for b in range(image.level) if b % q == a % q)
    return Fraction(total, image.order)


def main_factor(image: GaloisImage, r: int) -> Fraction:
    """level * |G_r| / |G|, the finite-level factor of the prime-counting constant."""
    return Fraction(image.level * image.trace_counts[r % image.level], image.order)


def project(image: GaloisImage, q: int) -> GaloisImage:
    """Set-image of the reduction map to level q; needs explicit matrix elements."""
    if q < 1 or image.level % q != 0:
        raise ValueError("q must divide the image level")
    if image.kind != KIND_MATRIX or image.elements is None:
        raise ValueError("projection needs an explicit matrix element list")
    reduced = {tuple(x % q for x in g) for g in image.elements}
    counts = [0] * q
    for g in reduced:
        counts[(g[0] + g[3]) % q] += 1
    return GaloisImage(q, image.kind, len(reduced), tuple(counts), tuple(sorted(reduced)))


def lambda_gamma(curve: RationalCurve, a: int, q: int) -> Tuple[int, int]:
    """(lambda, gamma): lambda = 2 iff CM; gamma = 1 iff CM and a = 0 mod q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if curve.has_cm:
        return 2, 1 if a % q == 0 else 0
    return 1, 0


def empirical_main_factor(
    table: TraceTable, m: int, r: int
) -> Tuple[Fraction, float]:
    """Estimate of level * |G(m)_r| / |G(m)| from trace data, with standard error.

    The raw frequency of a(p) = r mod m estimates the Chebotarev density; for
    a CM curve the supersingular half is removed and the rest doubled, which
    is exactly the lambda
    (delta - gamma/2) correction.  Noise can push the
    corrected estimate below zero, in which case it is clamped.
    """
    n = len(table)
    if n == 0:
        raise EmptyTableError("cannot estimate densities from an empty table")
    if m < 1:
        raise ValueError("level must be >= 1")
    curve = make_curve(table.curve_label or "table", table.a, table.b)
    lam, gam = lambda_gamma(curve, r, m)
    count = int(np.count_nonzero(table.traces % m == r % m))
    delta_hat = Fraction(count, n)
    est = lam * (delta_hat - Fraction(gam, 2))
    if est < 0:
        est = Fraction(0)
    stderr = m * lam * math.sqrt(float(delta_hat * (1 - delta_hat)) / n)
    return m * est, stderr


def default_level(curve: RationalCurve) -> int:
    """The division level m at which this curve's image is taken.

    Configuration wins; otherwise Serre curves get the level determined by
    the squarefree kernel of the discriminant, and CM curves get
    4 * (product of ramified primes), the smallest level the unit-group
    formulas are valid above.
    """
    if curve.level is not None:
        return curve.level
    if curve.serre_curve:
        return serre_level(squarefree_kernel(curve.delta))
    if curve.has_cm:
        m = 4
        for p in CMOrder(curve.cm_disc).ramified_primes():
            if m % p != 0:
                m *= p
        return m
    raise ValueError(
        "no image level known for %s: set m_E or serre_curve in the config" % curve.label
    )


def image_for_curve(curve: RationalCurve, budget: int = ENUMERATION_BUDGET) -> Optional[GaloisImage]:
    """Exact image when one is derivable: Serre construction or a user table."""
    if curve.trace_counts_path is not None:
        return load_trace_counts(curve.trace_counts_path)
    if curve.serre_curve:
        return serre_image(squarefree_kernel(curve.delta), default_level(curve), budget)
    if not curve.has_cm and curve.level == 1:
        return full_matrix_group(1)
    return None


# --------------------------------------------------------------------------
# user-supplied trace counts (CSV)
# --------------------------------------------------------------------------


def save_trace_counts(image: GaloisImage, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, c in enumerate(image.trace_counts):
            fh.write("%d,%d\n" % (a, c))
        fh.write("order,%d\n" % image.order)


def load_trace_counts(path: str) -> GaloisImage:
    counts: Dict[int, int] = {}
    order = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition(",")
            if key == "order":
                order = int(val)
            else:
                counts[int(key)] = int(val)
    if order is None:
        raise ValueError("%s: missing order line" % path)
    level = max(counts) + 1
    if sorted(counts) != list(range(level)):
        raise ValueError("%s: need counts for every residue 0..%d" % (path, level - 1))
    return GaloisImage(level, KIND_USER, order, tuple(counts[a] for a in range(level)))
