"""Goldbach partitions and their midpoint decompositions.

An even ``n`` split as ``p1 + p2`` can equally be written around its midpoint
``P = n // 2`` as ``(P + I) + (P - I)``. The two views are in bijection; this
module computes both independently so that the bijection can be audited.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import Anomaly, CounterexampleCandidate
from .primes import PrimeTable, table_for


def _check_even(n: int) -> None:
    if n < 4 or n % 2:
        raise ValueError(f"expected an even integer >= 4, got {n}")


def _table(n: int, table: PrimeTable | None) -> PrimeTable:
    if table is None or table.lo != 0 or table.hi <= n:
        return table_for(n)
    return table


@dataclass(frozen=True, order=True)
class GoldbachPartition:
    n: int
    p1: int
    p2: int

    def __post_init__(self):
        if self.p1 + self.p2 != self.n or self.p1 > self.p2:
            raise ValueError(f"not a partition of {self.n}: ({self.p1}, {self.p2})")

    def to_witness(self) -> "MidpointWitness":
        mid = self.n // 2
        return MidpointWitness(self.n, mid, self.p2 - mid, self.p2, self.p1)

    def __str__(self) -> str:
        return f"{self.n} = {self.p1} + {self.p2}"


@dataclass(frozen=True)
class MidpointWitness:
    """``n = (midpoint + offset) + (midpoint - offset)`` with both terms prime.

    ``p1`` is the larger prime. Offset 0 stands for ``p1 == p2``; otherwise the
    offset has the opposite parity of the midpoint and is coprime to it.
    """

    n: int
    midpoint: int
    offset: int
    p1: int
    p2: int

    def __post_init__(self):
        P, I = self.midpoint, self.offset
        if 2 * P != self.n or self.p1 != P + I or self.p2 != P - I:
            raise ValueError(f"inconsistent midpoint witness {self}")
        if not 0 <= I < P:
            raise ValueError(f"offset {I} outside [0, {P})")
        if I > 0 and ((P ^ I) & 1 == 0 or gcd(P, I) != 1):
            raise ValueError(f"offset {I} not coprime/opposite parity to {P}")

    def to_partition(self) -> GoldbachPartition:
        return GoldbachPartition(self.n, self.p2, self.p1)

    def __str__(self) -> str:
        return (
            f"midpoint={self.midpoint} offset={self.offset} "
            f"p1={self.p1} p2={self.p2}"
        )


def _empty(n: int, route: str) -> CounterexampleCandidate:
    return CounterexampleCandidate(
        Anomaly(
            kind="goldbach-empty",
            inputs={"n": n},
            scanned=f"{route} over primes <= {n // 2}",
            detail="no Goldbach partition found",
        )
    )


def partition_primes(n: int, table: PrimeTable | None = None) -> np.ndarray:
    """Ascending smaller parts p1 of every partition of ``n``, scanning p1 <= n/2."""
    _check_even(n)
    t = _table(n, table)
    low = t.primes_between(2, n // 2)
    out = low[t.flags[n - low]]
    if out.size == 0:
        raise _empty(n, "lower-prime scan")
    return out


def partitions(n: int, table: PrimeTable | None = None) -> list[GoldbachPartition]:
    """All ``(p1, p2)`` with ``p1 <= p2`` prime and ``p1 + p2 = n``, ascending by p1.

    Raises CounterexampleCandidate instead of returning an empty list.
    """
    return [GoldbachPartition(n, int(p), n - int(p)) for p in partition_primes(n, table)]


def midpoint_offsets(n: int, table: PrimeTable | None = None) -> np.ndarray:
    """Ascending offsets I with ``n/2 +- I`` both prime.

    Scans from the upper side: every prime r in ``[P, n)`` proposes ``I = r - P``
    and is kept when ``P - I`` is prime too.
    """
    _check_even(n)
    t = _table(n, table)
    mid = n // 2
    upper = t.primes_between(mid, n - 2)
    offsets = upper - mid
    offsets = offsets[t.flags[mid - offsets]]
    if offsets.size == 0:
        raise _empty(n, "upper-prime offset scan")
    return offsets


def midpoint_witnesses(n: int, table: PrimeTable | None = None) -> list[MidpointWitness]:
    mid = n // 2
    return [
        MidpointWitness(n, mid, int(i), mid + int(i), mid - int(i))
        for i in midpoint_offsets(n, table)
    ]


def parity_split(a: int, c: int) -> tuple[int, int]:
    """``((a + c) / 2, (a - c) / 2)`` for odd ``a >= c > 0``."""
    if a % 2 == 0 or c % 2 == 0 or c <= 0:
        raise ValueError(f"expected positive odd inputs, got ({a}, {c})")
    if a < c:
        raise ValueError(f"expected a >= c, got ({a}, {c})")
    return (a + c) // 2, (a - c) // 2


def is_goldbach(n: int, table: PrimeTable | None = None) -> bool:
    _check_even(n)
    t = _table(n, table)
    for p in t.primes_between(2, n // 2).tolist():
        if t.flags[n - p]:
            return True
    return False


# ---------------------------------------------------------------------------
# batch routines used by the range harness

def smallest_partition_primes(ns: np.ndarray, table: PrimeTable) -> np.ndarray:
    """Smallest p1 for each even n in ``ns``; 0 where no partition exists."""
    f = table.flags
    out = np.zeros(ns.size, dtype=np.int64)
    todo = np.arange(ns.size)
    for p in table.primes.tolist():
        if todo.size == 0:
            break
        rest = ns[todo]
        alive = rest >= 2 * p
        todo, rest = todo[alive], rest[alive]
        hit = f[rest - p]
        out[todo[hit]] = p
        todo = todo[~hit]
    return out


def smallest_offsets(ns: np.ndarray, table: PrimeTable) -> np.ndarray:
    """Smallest midpoint offset for each even n in ``ns``; -1 where none exists.

    Only offsets of the opposite parity to the midpoint (or zero) are tried.
    """
    f = table.flags
    mids = ns // 2
    out = np.full(ns.size, -1, dtype=np.int64)
    zero = f[mids]
    out[zero] = 0
    for parity in (0, 1):
        todo = np.flatnonzero(~zero & (mids % 2 == parity))
        step_from = 1 if parity == 0 else 2
        i = step_from
        while todo.size:
            m = mids[todo]
            alive = m > i
            todo, m = todo[alive], m[alive]
            hit = f[m - i] & f[m + i]
            out[todo[hit]] = i
            todo = todo[~hit]
            i += 2
    return out


@dataclass(frozen=True)
class BijectionAudit:
    lo: int
    hi: int
    checked: int
    pairs: int
    mismatched: tuple[int, ...]
    broken_round_trips: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatched and not self.broken_round_trips


def _partition_counts(lo: int, hi: int, table: PrimeTable) -> tuple[np.ndarray, list[int]]:
    """Partition counts for even n in [lo, hi] by enumerating lower primes.

    Each generated pair is pushed through partition -> witness -> partition and
    the witness invariants are checked on the way.
    """
    ps = table.primes
    counts = np.zeros(hi + 1, dtype=np.int64)
    broken: set[int] = set()
    if lo <= 4 <= hi:
        counts[4] += 1
    for q in table.primes_between(3, hi // 2).tolist():
        i = np.searchsorted(ps, max(q, lo - q), side="left")
        j = np.searchsorted(ps, hi - q, side="right")
        r = ps[i:j]
        if r.size == 0:
            continue
        ns = r + q
        counts[ns] += 1
        mid = ns >> 1
        off = r - mid
        bad = (mid - off != q) | (off >= mid) | ((off > 0) & ((mid ^ off) & 1 == 0))
        if bad.any():
            broken.update(ns[bad].tolist())
    return counts, sorted(broken)


class _Windows:
    """Packed forward/reversed prime flags with 8 bit-shifted copies each.

    Lets ``sum_I f[P+I] & f[P-I]`` be evaluated with byte-aligned slices and a
    popcount, independent of how partitions are enumerated.
    """

    def __init__(self, flags: np.ndarray):
        pad = np.zeros(16, dtype=bool)
        self.top = flags.size - 1
        fwd = np.concatenate([flags, pad])
        rev = np.concatenate([flags[::-1], pad])
        self.fwd = [np.packbits(fwd[k:], bitorder="little") for k in range(8)]
        self.rev = [np.packbits(rev[k:], bitorder="little") for k in range(8)]

    def count(self, mid: int) -> int:
        length = (mid + 7) >> 3
        s = self.top - mid
        a = self.fwd[mid & 7][mid >> 3 : (mid >> 3) + length]
        b = self.rev[s & 7][s >> 3 : (s >> 3) + length]
        w = a & b
        if mid & 1:
            # odd midpoint: even offsets, bit 0 is I = 0
            return int(np.bitwise_count(w & 0x55).sum())
        return int(np.bitwise_count(w & 0xAA).sum()) + int(w[0] & 1)


def midpoint_counts(lo: int, hi: int, table: PrimeTable) -> np.ndarray:
    """Number of valid midpoint offsets for each even n in [lo, hi] (index n)."""
    win = _Windows(table.flags[: hi + 1])
    counts = np.zeros(hi + 1, dtype=np.int64)
    for n in range(lo, hi + 1, 2):
        counts[n] = win.count(n >> 1)
    return counts


def bijection_audit(lo: int, hi: int, table: PrimeTable | None = None) -> BijectionAudit:
    """Check |partitions(n)| == |midpoint_witnesses(n)| for every even n in [lo, hi].

    The two counts come from different enumerations (lower-prime pairs versus
    parity-restricted midpoint windows), and every enumerated pair is also
    round-tripped through its witness.
    """
    _check_even(lo)
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    t = _table(hi, table)
    a, broken = _partition_counts(lo, hi, t)
    b = midpoint_counts(lo, hi, t)
    ns = np.arange(lo, hi + 1, 2)
    bad = ns[(a[ns] != b[ns]) | (a[ns] == 0)]
    return BijectionAudit(
        lo, hi, int(ns.size), int(a[ns].sum()), tuple(bad.tolist()), tuple(broken)
    )
