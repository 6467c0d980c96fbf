"""Segmented sieve, deterministic Miller-Rabin, and residue-class census.

A :class:`PrimeTable` is the single source of primality truth for the rest of
the package. Tables are immutable once built; the packed bit array is the
canonical storage and an unpacked boolean view is materialised lazily for
vectorised lookups.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from functools import cached_property
from math import isqrt

import numpy as np

from .errors import InvalidInterval, NotPrime, RangeTooLarge

SEGMENT_SIZE = 1 << 20
MAX_SEGMENTS = 1 << 10
# Largest sqrt(hi) we are willing to sieve base primes up to (64 MiB of flags).
BASE_LIMIT = 1 << 26
U64_LIMIT = 1 << 64

# Deterministic for every n < 3.3e24, which covers the full unsigned 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def small_primes(limit: int) -> np.ndarray:
    """Plain sieve of Eratosthenes; primes <= limit as int64."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


class PrimeTable:
    """Primality of every integer in ``[lo, hi)``, one bit per integer.

    Bit ``i`` of :attr:`bits` (little-endian within each byte) is set iff
    ``lo + i`` is prime. Build tables with :func:`sieve_range`.
    """

    __slots__ = ("lo", "hi", "bits", "__dict__")

    def __init__(self, lo: int, hi: int, bits: np.ndarray):
        if bits.dtype != np.uint8 or bits.size != (hi - lo + 7) // 8:
            raise ValueError("bit array does not match [lo, hi)")
        bits.setflags(write=False)
        self.lo = lo
        self.hi = hi
        self.bits = bits

    def __repr__(self) -> str:
        return f"PrimeTable(lo={self.lo}, hi={self.hi})"

    def __len__(self) -> int:
        return self.hi - self.lo

    def covers(self, n: int) -> bool:
        return self.lo <= n < self.hi

    def is_prime(self, n: int) -> bool:
        if not self.covers(n):
            raise IndexError(f"{n} outside [{self.lo}, {self.hi})")
        i = n - self.lo
        return bool((int(self.bits[i >> 3]) >> (i & 7)) & 1)

    @cached_property
    def flags(self) -> np.ndarray:
        """Unpacked read-only boolean view, indexed by offset from ``lo``."""
        out = np.unpackbits(self.bits, count=self.hi - self.lo, bitorder="little").view(bool)
        out.setflags(write=False)
        return out

    @cached_property
    def primes(self) -> np.ndarray:
        """Ascending array of the primes in the table."""
        dtype = np.uint64 if self.hi > 2**63 else np.int64
        out = np.flatnonzero(self.flags).astype(dtype) + dtype(self.lo)
        out.setflags(write=False)
        return out

    def count(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def primes_between(self, a: int, b: int) -> np.ndarray:
        """Primes p with a <= p <= b (clipped to the table)."""
        ps = self.primes
        i = np.searchsorted(ps, max(a, self.lo), side="left")
        j = np.searchsorted(ps, min(b, self.hi - 1), side="right")
        return ps[i:j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and np.array_equal(self.flags, other.flags)
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def concatenate(cls, parts: list["PrimeTable"]) -> "PrimeTable":
        """Join adjacent tables ``[a, b) + [b, c) + ...`` into one."""
        if not parts:
            raise ValueError("nothing to concatenate")
        for left, right in zip(parts, parts[1:]):
            if left.hi != right.lo:
                raise InvalidInterval(f"gap between {left!r} and {right!r}")
        flags = np.concatenate([p.flags for p in parts])
        return cls(parts[0].lo, parts[-1].hi, np.packbits(flags, bitorder="little"))


def _sieve_segment(s: int, e: int, base: list[int]) -> np.ndarray:
    seg = np.ones(e - s, dtype=bool)
    for p in base:
        pp = p * p
        if pp >= e:
            break
        start = max(pp, -(-s // p) * p)
        seg[start - s :: p] = False
    if s < 2:
        seg[: min(2, e) - s] = False
    return seg


def sieve_range(
    lo: int,
    hi: int,
    segment_size: int = SEGMENT_SIZE,
    max_segments: int = MAX_SEGMENTS,
) -> PrimeTable:
    """Sieve ``[lo, hi)`` one segment at a time.

    Peak memory is one unpacked segment plus the base primes up to
    ``isqrt(hi - 1)``; the result is stored packed.

    Raises
    ------
    InvalidInterval
        ``lo < 0`` or ``lo > hi``.
    RangeTooLarge
        The interval exceeds ``segment_size * max_segments`` integers, ``hi``
        leaves the unsigned 64-bit range, or ``sqrt(hi)`` exceeds
        :data:`BASE_LIMIT`.
    """
    if lo < 0 or lo > hi:
        raise InvalidInterval(f"invalid interval [{lo}, {hi})")
    if segment_size <= 0 or segment_size % 8:
        raise ValueError("segment_size must be a positive multiple of 8")
    if hi > U64_LIMIT:
        raise RangeTooLarge(f"hi={hi} exceeds the 64-bit range")
    if hi - lo > segment_size * max_segments:
        raise RangeTooLarge(
            f"{hi - lo} integers exceed budget {segment_size} x {max_segments}"
        )
    root = isqrt(hi - 1) if hi > 1 else 0
    if root > BASE_LIMIT:
        raise RangeTooLarge(f"base primes up to {root} exceed {BASE_LIMIT}")

    base = small_primes(root).tolist()
    packed = []
    for s in range(lo, hi, segment_size):
        e = min(s + segment_size, hi)
        packed.append(np.packbits(_sieve_segment(s, e, base), bitorder="little"))
    bits = np.concatenate(packed) if packed else np.zeros(0, dtype=np.uint8)
    return PrimeTable(lo, hi, bits)


def miller_rabin(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_shared_lock = threading.Lock()
_shared: PrimeTable | None = None


def table_for(limit: int) -> PrimeTable:
    """Process-wide table covering ``[0, limit]``, regrown by doubling on demand."""
    global _shared
    with _shared_lock:
        if _shared is None or _shared.hi <= limit:
            size = max(1 << 16, 1 << (limit + 1).bit_length())
            _shared = sieve_range(0, size)
        return _shared


def shared_table() -> PrimeTable | None:
    return _shared


def is_prime(n: int, table: PrimeTable | None = None) -> bool:
    """Primality of ``n``.

    The given table (or the process-wide one) answers when it covers ``n``;
    otherwise deterministic Miller-Rabin does.
    """
    if n < 2:
        return False
    t = table if table is not None else _shared
    if t is not None and t.covers(n):
        return t.is_prime(n)
    return miller_rabin(n)


class ResidueClass(enum.Enum):
    TWO = "2"
    ONE_MOD_4 = "1 mod 4"
    THREE_MOD_4 = "3 mod 4"


def classify_mod4(p: int, table: PrimeTable | None = None) -> ResidueClass:
    if not is_prime(p, table):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        return ResidueClass.TWO
    return ResidueClass.ONE_MOD_4 if p % 4 == 1 else ResidueClass.THREE_MOD_4


@dataclass(frozen=True)
class CensusRow:
    """Prime counts up to ``limit``: pi(x;4,1), pi(x;4,3) and pi(x)."""

    limit: int
    count_one: int
    count_three: int
    total: int

    @property
    def imbalance(self) -> float:
        """|pi(x;4,1) - pi(x;4,3)| / pi(x)."""
        return abs(self.count_one - self.count_three) / self.total


def count_by_class(primes: np.ndarray) -> tuple[int, int, int]:
    """(number == 2, number = 1 mod 4, number = 3 mod 4) for an array of primes."""
    r = primes % 4
    return (
        int(np.count_nonzero(primes == 2)),
        int(np.count_nonzero(r == 1)),
        int(np.count_nonzero(r == 3)),
    )


def residue_census(limit: int, table: PrimeTable | None = None) -> CensusRow:
    if limit < 2:
        raise ValueError(f"census limit must be >= 2, got {limit}")
    if table is None or table.lo != 0 or table.hi <= limit:
        table = table_for(limit)
    ps = table.primes_between(0, limit)
    two, one, three = count_by_class(ps)
    return CensusRow(limit, one, three, two + one + three)
