"""Trace of Frobenius a(p) = p + 1 - #E(F_p).

Two routes: a quadratic-character sum (O(p), used for small p) and
baby-step/giant-step order finding over the Hasse interval (O(p^{1/4}),
used above NAIVE_BSGS_CUTOVER).  The BSGS route works on the curve and its
quadratic twist simultaneously; for p > 229 the combined point orders pin
the group order down to a unique candidate (Mestre).  If that ever fails
to happen within the retry budget, the caller falls back to the character
sum, so no ambiguity escapes this module.

Kernels are numba-compiled; all intermediate products stay below 2^63 for
p < 2^31, which covers every scale this package targets.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

from .curve import ReducedCurve

# Character sum below, BSGS above.  The sum is cache-friendly up to ~10^5;
# BSGS wins beyond.
NAIVE_BSGS_CUTOVER = 1 << 17

_P_LIMIT = 1 << 31

_BSGS_MIN_P = 229

_MAX_POINT_TRIALS = 8


class TraceRecord(NamedTuple):
    p: int
    a: int


def hasse_check(record: TraceRecord) -> bool:
    """True iff the trace satisfies a^2 <= 4p."""
    return record.a * record.a <= 4 * record.p


# --------------------------------------------------------------------------
# scalar kernels
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _powmod(b, e, p):
    b %= p
    r = 1
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


@njit(cache=True, nogil=True)
def _invmod(a, p):
    # extended Euclid; a in [1, p), p prime
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    return t % p


@njit(cache=True, nogil=True)
def _sqrtmod(n, p):
    # Tonelli-Shanks; n must be a quadratic residue (or 0) mod the odd prime p
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        return _powmod(n, (p + 1) // 4, p)
    z = 2
    while _powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    m = s
    c = _powmod(z, q, p)
    t = _powmod(n, q, p)
    r = _powmod(n, (q + 1) // 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = b * b % p
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


@njit(cache=True, nogil=True)
def _isqrt(n):
    s = np.int64(math.sqrt(float(n)))
    while (s + 1) * (s + 1) <= n:
        s += 1
    while s * s > n:
        s -= 1
    return s


# Affine points; x = -1 encodes the point at infinity.


@njit(cache=True, nogil=True)
def _ec_dbl(x, y, a, p):
    if x == -1 or y == 0:
        return np.int64(-1), np.int64(0)
    lam = (3 * (x * x % p) + a) % p * _invmod(2 * y % p, p) % p
    x3 = (lam * lam - 2 * x) % p
    y3 = (lam * (x - x3) - y) % p
    return x3, y3


@njit(cache=True, nogil=True)
def _ec_add(x1, y1, x2, y2, a, p):
    if x1 == -1:
        return x2, y2
    if x2 == -1:
        return x1, y1
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return np.int64(-1), np.int64(0)
        return _ec_dbl(x1, y1, a, p)
    lam = (y2 - y1) % p * _invmod((x2 - x1) % p, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return x3, y3


@njit(cache=True, nogil=True)
def _ec_mul(k, x, y, a, p):
    rx, ry = np.int64(-1), np.int64(0)
    qx, qy = x, y
    while k > 0:
        if k & 1:
            rx, ry = _ec_add(rx, ry, qx, qy, a, p)
        k >>= 1
        if k > 0:
            qx, qy = _ec_dbl(qx, qy, a, p)
    return rx, ry


@njit(cache=True, nogil=True)
def _trace_naive_kernel(p, a, b):
    # a(p) = -sum_x chi(x^3 + ax + b) with chi the quadratic character mod p
    chi = np.full(p, -1, dtype=np.int8)
    chi[0] = 0
    for y in range(1, (p - 1) // 2 + 1):
        chi[y * y % p] = 1
    s = 0
    for x in range(p):
        f = ((x * x % p) * x + a * x + b) % p
        s += chi[f]
    return -s


@njit(cache=True, nogil=True)
def _bsgs_multiple(px, py, a, p, lo, hi):
    # some m0 in [lo, hi] with m0 * P = O; exists because #E lies in [lo, hi]
    width = hi - lo + 1
    m = _isqrt(width) + 1
    bx = np.empty(m, dtype=np.int64)
    by = np.empty(m, dtype=np.int64)
    qx, qy = np.int64(-1), np.int64(0)
    for j in range(m):
        bx[j] = qx
        by[j] = qy
        qx, qy = _ec_add(qx, qy, px, py, a, p)
    sx, sy = _ec_mul(m, px, py, a, p)
    gx, gy = _ec_mul(lo, px, py, a, p)
    steps = width // m + 2
    for i in range(steps):
        # (lo + i*m + j) P = O  <=>  giant = -jP, i.e. x matches, y negated
        for j in range(m):
            if gx == bx[j]:
                if gx == -1:
                    return lo + i * m
                if (gy + by[j]) % p == 0:
                    return lo + i * m + j
                if gy == by[j] and lo + i * m - j > 0:
                    return lo + i * m - j
        gx, gy = _ec_add(gx, gy, sx, sy, a, p)
    return np.int64(0)  # unreachable for a point on the curve


@njit(cache=True, nogil=True)
def _strip_factor(px, py, a, p, order, f):
    # divide f out of `order` while (order/f) P is still O
    while order % f == 0:
        tx, _ty = _ec_mul(order // f, px, py, a, p)
        if tx != -1:
            break
        order //= f
    return order


@njit(cache=True, nogil=True)
def _point_order(px, py, a, p, multiple):
    # exact order of P from a known multiple m0 with m0 * P = O
    order = multiple
    m = multiple
    f = np.int64(2)
    while f * f <= m:
        if m % f == 0:
            while m % f == 0:
                m //= f
            order = _strip_factor(px, py, a, p, order, f)
        f += 1 if f == 2 else 2
    if m > 1:
        order = _strip_factor(px, py, a, p, order, m)
    return order


@njit(cache=True, nogil=True)
def _rng_next(state):
    # xorshift64*; state must be nonzero
    state = np.uint64(state)
    state ^= state >> np.uint64(12)
    state ^= (state << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    state ^= state >> np.uint64(27)
    out = (state * np.uint64(2685821657736338717)) >> np.uint64(11)
    return np.int64(state), np.int64(out)


@njit(cache=True, nogil=True)
def _trace_bsgs_kernel(p, a, b):
    """Trace via BSGS on curve + twist.  Returns (trace, ok)."""
    s = _isqrt(4 * p)
    lo = p + 1 - s
    hi = p + 1 + s
    # twist by a quadratic non-residue d
    d = np.int64(2)
    while _powmod(d, (p - 1) // 2, p) != p - 1:
        d += 1
    at = a * d % p * d % p  # twist coefficient a d^2
    lcm_e = np.int64(1)
    lcm_t = np.int64(1)
    state = np.int64(p * 2862933555777941757 + 3037000493)
    if state == 0:
        state = np.int64(88172645463325252)
    for _trial in range(_MAX_POINT_TRIALS):
        # one fresh point on each of E and the twist
        for side in range(2):
            px = np.int64(-1)
            py = np.int64(0)
            for _draw in range(128):
                state, r = _rng_next(state)
                x = r % p
                f = ((x * x % p) * x + a * x + b) % p
                ls = _powmod(f, (p - 1) // 2, p)
                if f == 0:
                    if side == 0:
                        px, py = x, np.int64(0)
                    else:
                        px, py = d * x % p, np.int64(0)
                    break
                if side == 0 and ls == 1:
                    px, py = x, _sqrtmod(f, p)
                    break
                if side == 1 and ls == p - 1:
                    # (dx, y) on the twist with y^2 = d^3 f
                    px = d * x % p
                    py = _sqrtmod(d % p * d % p * d % p * f % p, p)
                    break
            if px == -1:
                continue
            ca = a if side == 0 else at
            m0 = _bsgs_multiple(px, py, ca, p, lo, hi)
            if m0 == 0:
                continue
            o = _point_order(px, py, ca, p, m0)
            if side == 0:
                lcm_e = lcm_e // math.gcd(lcm_e, o) * o
            else:
                lcm_t = lcm_t // math.gcd(lcm_t, o) * o
        # N * N' pairing: N + N' = 2(p+1), N multiple of lcm_e, N' of lcm_t
        cnt_e = hi // lcm_e - (lo - 1) // lcm_e
        cnt_t = hi // lcm_t - (lo - 1) // lcm_t
        if min(cnt_e, cnt_t) > 4096:
            continue
        if cnt_e <= cnt_t:
            step, other = lcm_e, lcm_t
        else:
            step, other = lcm_t, lcm_e
        found = 0
        n_found = np.int64(0)
        n = (lo + step - 1) // step * step
        while n <= hi:
            if (2 * (p + 1) - n) % other == 0:
                found += 1
                n_found = n
                if found > 1:
                    break
            n += step
        if found == 1:
            if cnt_e <= cnt_t:
                return p + 1 - n_found, True
            return n_found - (p + 1), True
    return np.int64(0), False


@njit(cache=True, nogil=True)
def _trace_chunk_kernel(ps, a, b, cutover, out):
    for i in range(ps.shape[0]):
        p = ps[i]
        am = a % p
        bm = b % p
        if p <= cutover:
            out[i] = _trace_naive_kernel(p, am, bm)
        else:
            t, ok = _trace_bsgs_kernel(p, am, bm)
            if not ok:
                t = _trace_naive_kernel(p, am, bm)
            out[i] = t


# --------------------------------------------------------------------------
# public wrappers
# --------------------------------------------------------------------------


def _check_range(p: int) -> None:
    if p >= _P_LIMIT:
        raise ValueError("p = %d exceeds the supported range (p < 2^31)" % p)


def trace_naive(curve: ReducedCurve) -> int:
    """Character-sum point count; requires a good prime p >= 5."""
    p = curve.p
    if p < 5:
        raise ValueError("character-sum counting needs p >= 5")
    _check_range(p)
    return int(_trace_naive_kernel(p, curve.a_mod, curve.b_mod))


def trace_bsgs(curve: ReducedCurve) -> int:
    """BSGS group-order trace; requires p > 229.

    Falls back to the character sum in the (never observed) event that the
    curve/twist order information does not single out the group order.
    """
    p = curve.p
    if p <= _BSGS_MIN_P:
        raise ValueError("BSGS order finding needs p > %d" % _BSGS_MIN_P)
    _check_range(p)
    t, ok = _trace_bsgs_kernel(p, curve.a_mod, curve.b_mod)
    if not ok:
        return trace_naive(curve)
    return int(t)


def trace(curve: ReducedCurve) -> int:
    """Dispatch on the cutover: character sum for small p, BSGS beyond."""
    if curve.p <= NAIVE_BSGS_CUTOVER:
        return trace_naive(curve)
    return trace_bsgs(curve)
