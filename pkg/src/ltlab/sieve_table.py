"""Prime enumeration, parallel trace-table construction, and the table file format.

File layout (all little-endian):

    magic "LTTB" | version u8 = 1 | label_len u16 | label utf-8
    | a i64 | b i64 | x_max u64 | record_count u64
    | records (p u64, trace i32) ...
    | crc32 u32 over all preceding bytes
"""

from __future__ import annotations

import math
import os
import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Tuple

import numpy as np

from .curve import RationalCurve, is_good_prime, make_curve
from .errors import CorruptTableError, MissingTableError, TruncatedTableError
from .trace import NAIVE_BSGS_CUTOVER, TraceRecord, _trace_chunk_kernel

_MAGIC = b"LTTB"
_VERSION = 1
_HEADER_FMT = "<qqQQ"  # a, b, x_max, record_count
_REC_DTYPE = np.dtype([("p", "<u8"), ("a", "<i4")])

_CHUNK = 4096


def sieve_primes(x: int) -> np.ndarray:
    """All primes <= x, ascending, as an int64 array (segmented sieve)."""
    if x < 2:
        return np.empty(0, dtype=np.int64)
    root = math.isqrt(x)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    base_primes = np.flatnonzero(base)
    chunks = [base_primes[base_primes <= x]]
    seg_size = max(1 << 20, root + 1)
    for lo in range(root + 1, x + 1, seg_size):
        hi = min(lo + seg_size - 1, x)
        seg = np.ones(hi - lo + 1, dtype=bool)
        for p in base_primes:
            start = (-lo) % p
            seg[start::p] = False
        chunks.append(np.flatnonzero(seg) + lo)
    return np.concatenate(chunks).astype(np.int64)


def bad_primes_up_to(curve: RationalCurve, x: int, primes: np.ndarray = None) -> Tuple[int, ...]:
    """Primes <= x dividing the discriminant, together with 2 and 3."""
    if primes is None:
        primes = sieve_primes(x)
    delta = curve.delta
    bad = [p for p in (2, 3) if p <= x]
    if abs(delta) < 1 << 62:
        rest = primes[primes > 3]
        bad.extend(int(p) for p in rest[np.mod(delta, rest) == 0])
    else:
        for p in primes:
            p = int(p)
            if p > 3 and delta % p == 0:
                bad.append(p)
    return tuple(bad)


@dataclass(frozen=True, eq=False)
class TraceTable:
    """Traces for every good prime 5 <= p <= x_max, ascending in p."""

    curve_label: str
    a: int
    b: int
    x_max: int
    ps: np.ndarray  # int64
    traces: np.ndarray  # int32
    bad_primes: Tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return int(self.ps.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TraceTable):
            return NotImplemented
        return (
            self.curve_label == other.curve_label
            and self.a == other.a
            and self.b == other.b
            and self.x_max == other.x_max
            and self.bad_primes == other.bad_primes
            and np.array_equal(self.ps, other.ps)
            and np.array_equal(self.traces, other.traces)
        )

    def records(self) -> Iterator[TraceRecord]:
        for p, a in zip(self.ps, self.traces):
            yield TraceRecord(int(p), int(a))


def build_table(curve: RationalCurve, x: int, workers: int = 1) -> TraceTable:
    """Trace table for all good primes <= x.

    The prime list is cut into fixed chunks dispatched to a thread pool; each
    worker writes into its own slice of a preallocated array, so the result is
    identical for every worker count.
    """
    if x < 5:
        raise ValueError("x must be at least 5")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    primes = sieve_primes(x)
    bad = bad_primes_up_to(curve, x, primes)
    good = np.array([int(p) for p in primes if is_good_prime(curve, int(p))], dtype=np.int64)
    traces = np.empty(good.shape[0], dtype=np.int32)
    a, b = curve.a, curve.b

    def run(start: int) -> None:
        stop = min(start + _CHUNK, good.shape[0])
        _trace_chunk_kernel(good[start:stop], a, b, NAIVE_BSGS_CUTOVER, traces[start:stop])

    starts = range(0, good.shape[0], _CHUNK)
    if workers == 1:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    traces.setflags(write=False)
    good.setflags(write=False)
    return TraceTable(
        curve_label=curve.label,
        a=a,
        b=b,
        x_max=x,
        ps=good,
        traces=traces,
        bad_primes=bad,
    )


def _encode(table: TraceTable) -> bytes:
    label = table.curve_label.encode("utf-8")
    if len(label) > 0xFFFF:
        raise ValueError("label too long")
    head = b"".join(
        (
            _MAGIC,
            struct.pack("<B", _VERSION),
            struct.pack("<H", len(label)),
            label,
            struct.pack(_HEADER_FMT, table.a, table.b, table.x_max, len(table)),
        )
    )
    rec = np.empty(len(table), dtype=_REC_DTYPE)
    rec["p"] = table.ps
    rec["a"] = table.traces
    body = head + rec.tobytes()
    return body + struct.pack("<I", zlib.crc32(body))


def save_table(table: TraceTable, path: str) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    data = _encode(table)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    tmp = os.path.join(d, ".%s.tmp.%d" % (os.path.basename(path), os.getpid()))
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def load_table(path: str) -> TraceTable:
    if not os.path.exists(path):
        raise MissingTableError("no trace table at %s" % path)
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 7:
        raise TruncatedTableError("%s: shorter than any valid header" % path)
    if data[:4] != _MAGIC:
        raise CorruptTableError("%s: bad magic" % path)
    if data[4] != _VERSION:
        raise CorruptTableError("%s: unsupported version %d" % (path, data[4]))
    (label_len,) = struct.unpack_from("<H", data, 5)
    head_end = 7 + label_len + struct.calcsize(_HEADER_FMT)
    if len(data) < head_end:
        raise TruncatedTableError("%s: header cut short" % path)
    label = data[7 : 7 + label_len].decode("utf-8")
    a, b, x_max, count = struct.unpack_from(_HEADER_FMT, data, 7 + label_len)
    expected = head_end + count * _REC_DTYPE.itemsize + 4
    if len(data) < expected:
        raise TruncatedTableError(
            "%s: %d bytes, need %d for %d records" % (path, len(data), expected, count)
        )
    if len(data) > expected:
        raise CorruptTableError("%s: trailing bytes after checksum" % path)
    (crc_stored,) = struct.unpack_from("<I", data, expected - 4)
    if zlib.crc32(data[: expected - 4]) != crc_stored:
        raise CorruptTableError("%s: checksum mismatch" % path)
    rec = np.frombuffer(data, dtype=_REC_DTYPE, count=count, offset=head_end)
    ps = rec["p"].astype(np.int64)
    traces = rec["a"].astype(np.int32)
    if count and (np.any(np.diff(ps) <= 0) or ps[0] < 5):
        raise CorruptTableError("%s: record primes not strictly increasing" % path)
    if np.any(traces.astype(np.int64) ** 2 > 4 * ps):
        raise CorruptTableError("%s: record violates the Hasse bound" % path)
    try:
        curve = make_curve(label or "table", a, b)
    except Exception:
        raise CorruptTableError("%s: stored coefficients are not a valid curve" % path) from None
    bad = bad_primes_up_to(curve, x_max)
    ps.setflags(write=False)
    traces.setflags(write=False)
    return TraceTable(
        curve_label=label,
        a=a,
        b=b,
        x_max=x_max,
        ps=ps,
        traces=traces,
        bad_primes=bad,
    )
