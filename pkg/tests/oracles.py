"""Independent brute-force oracles used to freeze expected values.

Nothing here shares code with the package paths it checks: point counts come
from (x, y) enumeration, primes from a one-line sieve, the main-term integral
from a midpoint Riemann sum, and matrix groups from four nested loops.
"""

import itertools
import math

import numpy as np


def brute_trace(p: int, a: int, b: int) -> int:
    """p + 1 - #E(F_p) by enumerating all (x, y) pairs.  O(p^2): tiny p only."""
    squares = {}
    for y in range(p):
        squares.setdefault(y * y % p, 0)
        squares[y * y % p] += 1
    count = 1  # point at infinity
    for x in range(p):
        f = (x * x * x + a * x + b) % p
        count += squares.get(f, 0)
    return p + 1 - count


def simple_sieve(x: int):
    """Plain list-of-bools Eratosthenes."""
    if x < 2:
        return []
    flags = [True] * (x + 1)
    flags[0] = flags[1] = False
    for i in range(2, math.isqrt(x) + 1):
        if flags[i]:
            for j in range(i * i, x + 1, i):
                flags[j] = False
    return [i for i in range(x + 1) if flags[i]]


def riemann_main_term(C: float, r: int, x: float, cm: bool, panels: int = 10**6) -> float:
    """Midpoint Riemann sum for the main-term integral, on s = sqrt(t - t0).

    The substitution makes the integrand bounded (4t - r^2 = 4s^2 + (4 t0 - r^2)
    is computed without cancellation), so the plain midpoint rule converges at
    its usual rate even at the arcsine endpoint.
    """
    t0 = max(2.0, r * r / 4.0)
    if t0 >= x or C == 0.0:
        return 0.0
    span = math.sqrt(x - t0)
    h = span / panels
    shift = 4.0 * t0 - float(r) * float(r)
    total = 0.0
    chunk = 10**6
    for lo in range(0, panels, chunk):
        n = min(chunk, panels - lo)
        i = np.arange(lo, lo + n, dtype=np.float64)
        s = (i + 0.5) * h
        t = t0 + s * s
        q = 4.0 * s * s + shift  # = 4t - r^2
        w = q / (4.0 * t)  # = 1 - (r / 2 sqrt t)^2
        logt = np.log(t)
        if cm:
            f = 1.0 / (np.sqrt(w) * 2.0 * np.sqrt(t) * logt)
        else:
            f = np.sqrt(w) / (2.0 * np.sqrt(t) * logt)
        total += float(np.sum(f * 2.0 * s))
    return C * total * h


def brute_gl2_trace_counts(n: int):
    """(order, trace counts) of GL2(Z/nZ) by direct enumeration."""
    counts = [0] * n
    order = 0
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if math.gcd((a * d - b * c) % n, n) == 1:
            counts[(a + d) % n] += 1
            order += 1
    return order, counts
