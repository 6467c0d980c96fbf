"""Primes in the progressions 2tn +- I and the offset theorems built on them."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import Anomaly, CounterexampleCandidate
from .primes import PrimeTable, is_prime, table_for


def _table(limit: int, table: PrimeTable | None) -> PrimeTable:
    if table is None or table.lo != 0 or table.hi <= limit:
        return table_for(limit)
    return table


def _check_direction(direction: int) -> None:
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")


@dataclass(frozen=True)
class ProgressionSpec:
    """The sequence ``2*t*n + direction*offset``."""

    t: int
    offset: int
    direction: int = 1

    def __post_init__(self):
        _check_direction(self.direction)
        if self.t < 1:
            raise ValueError(f"t must be positive, got {self.t}")
        if self.offset % 2 == 0 or not 1 <= self.offset <= 2 * self.t - 1:
            raise ValueError(f"offset must be odd in [1, {2 * self.t - 1}], got {self.offset}")

    @property
    def degenerate(self) -> bool:
        """gcd(2t, offset) > 1: at most one term can be prime."""
        return self.direction == 1 and gcd(2 * self.t, self.offset) != 1

    def value(self, n: int) -> int:
        return 2 * self.t * n + self.direction * self.offset


@dataclass(frozen=True)
class ProgressionReport:
    spec: ProgressionSpec
    n_max: int
    hits: list[tuple[int, int]] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.spec.degenerate


@dataclass(frozen=True)
class OffsetWitness:
    t: int
    n: int
    offset: int
    direction: int
    value: int

    def __post_init__(self):
        if self.value != 2 * self.t * self.n + self.direction * self.offset:
            raise ValueError(f"inconsistent offset witness {self}")

    def __str__(self) -> str:
        op = "+" if self.direction > 0 else "-"
        return f"2*{self.t}*{self.n} {op} {self.offset} = {self.value}"


def progression_primes(
    spec: ProgressionSpec, n_max: int, table: PrimeTable | None = None
) -> ProgressionReport:
    """Every n in [1, n_max] for which the progression term is a prime (>= 2)."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    t = _table(spec.value(n_max) + 1, table)
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    vals = 2 * spec.t * ns + spec.direction * spec.offset
    ok = vals >= 2
    ok[ok] = t.flags[vals[ok]]
    return ProgressionReport(spec, n_max, list(zip(ns[ok].tolist(), vals[ok].tolist())))


def offset_window(base: int, direction: int, table: PrimeTable | None = None) -> np.ndarray:
    """Odd offsets 0 < I < base with ``base + direction*I`` prime, ascending."""
    _check_direction(direction)
    t = _table(2 * base, table)
    offs = np.arange(1, base, 2, dtype=np.int64)
    return offs[t.flags[base + direction * offs]]


def offset_witnesses(
    t: int, n: int, direction: int, table: PrimeTable | None = None
) -> list[OffsetWitness]:
    """All odd I < 2tn making ``2tn + direction*I`` prime.

    Raises CounterexampleCandidate when the list would be empty.
    """
    if t < 1:
        raise ValueError(f"t must be positive, got {t}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    base = 2 * t * n
    offs = offset_window(base, direction, table)
    if offs.size == 0:
        raise CounterexampleCandidate(
            Anomaly(
                "t5-no-offset",
                {"t": t, "n": n, "direction": direction},
                f"odd I in [1, {base - 1}]",
                "no prime in the offset window",
            )
        )
    return [OffsetWitness(t, n, int(i), direction, base + direction * int(i)) for i in offs]


def within_stated_range(witnesses: list[OffsetWitness]) -> bool:
    """Whether some witness uses an offset in the narrow range [1, 2t-1]."""
    return any(w.offset <= 2 * w.t - 1 for w in witnesses)


class Collapse(enum.Enum):
    VACUOUS = "vacuous"
    CONFIRMED = "collapse-confirmed"
    VIOLATION = "violation"


def gcd_collapse_check(n: int, offset: int, table: PrimeTable | None = None) -> Collapse:
    """If gcd(2n, offset) = g > 1 and 2n - offset is prime, it must equal g."""
    if n < 1 or offset % 2 == 0 or not 1 <= offset < 2 * n:
        raise ValueError(f"offset must be odd in [1, {2 * n}), got {offset}")
    g = gcd(2 * n, offset)
    p = 2 * n - offset
    if g == 1 or not is_prime(p, table):
        return Collapse.VACUOUS
    return Collapse.CONFIRMED if p == g else Collapse.VIOLATION


def audit_collapse(n: int, table: PrimeTable) -> tuple[int, int, list[Anomaly]]:
    """Check every odd offset < 2n at once.

    Returns (number of confirmed collapses, largest collapsed prime or 0,
    one anomaly per violating offset).
    """
    offs = np.arange(1, 2 * n, 2, dtype=np.int64)
    vals = 2 * n - offs
    g = np.gcd(offs, 2 * n)
    hyp = (g > 1) & table.flags[vals]
    confirmed = hyp & (vals == g)
    bad = [
        Anomaly(
            "t6-violation",
            {"n": n, "offset": int(o), "gcd": int(gcd(2 * n, int(o))), "value": 2 * n - int(o)},
            f"odd offsets in [1, {2 * n - 1}]",
            "prime 2n - I differs from gcd(2n, I) > 1",
        )
        for o in offs[hyp & ~confirmed]
    ]
    top = int(vals[confirmed].max()) if confirmed.any() else 0
    return int(np.count_nonzero(confirmed)), top, bad


def coprime_witness(n: int, table: PrimeTable | None = None) -> OffsetWitness:
    """Smallest odd I < 2n with gcd(2n, I) = 1 and 2n - I prime."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    tb = _table(2 * n, table)
    for i in range(1, 2 * n, 2):
        if tb.flags[2 * n - i] and gcd(2 * n, i) == 1:
            return OffsetWitness(1, n, i, -1, 2 * n - i)
    raise CounterexampleCandidate(
        Anomaly("t7-no-witness", {"n": n}, f"odd I in [1, {2 * n - 1}]", "no coprime offset")
    )


def reduce_odd_progression(I: int, P: int, direction: int) -> ProgressionSpec:
    """Rewrite ``I*n + direction*P`` on odd n = 2m+1 as ``2*I*m + (I + direction*P)``."""
    _check_direction(direction)
    if I < 1 or I % 2 == 0:
        raise ValueError(f"I must be odd and positive, got {I}")
    if P < 0 or P % 2:
        raise ValueError(f"P must be even and non-negative, got {P}")
    if P >= I:
        raise ValueError(f"reduction needs P < I, got P={P}, I={I}")
    return ProgressionSpec(I, I + direction * P, 1)


def odd_pair_witness(
    I: int, n: int, positive: bool = False, table: PrimeTable | None = None
) -> tuple[int, int, int]:
    """Smallest even P with ``I*n + P`` and ``I*n - P`` both prime.

    P = 0 is allowed only when I*n is itself prime (skip it with
    ``positive=True``); otherwise gcd(I*n, P) must be 1.
    """
    if I < 1 or I % 2 == 0:
        raise ValueError(f"I must be odd and positive, got {I}")
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd and positive, got {n}")
    c = I * n
    if c < 5 and (positive or not is_prime(c, table)):
        raise ValueError(f"I*n = {c} leaves no room for an even P")
    tb = _table(2 * c, table)
    f = tb.flags
    start = 2 if positive else 0
    for P in range(start, c, 2):
        if P == 0:
            if f[c]:
                return 0, c, c
            continue
        if f[c + P] and f[c - P] and gcd(c, P) == 1:
            return P, c + P, c - P
    raise CounterexampleCandidate(
        Anomaly(
            "c12-no-witness",
            {"I": I, "n": n},
            f"even P in [{start}, {c})",
            "no symmetric prime pair around I*n",
        )
    )


# ---------------------------------------------------------------------------
# batch routines used by the range harness

def smallest_offsets_grid(
    bases: np.ndarray, direction: int, table: PrimeTable
) -> np.ndarray:
    """Smallest odd I < base with base + direction*I prime, per base (0 if none)."""
    f = table.flags
    out = np.zeros(bases.size, dtype=np.int64)
    todo = np.arange(bases.size)
    i = 1
    while todo.size:
        b = bases[todo]
        alive = b > i
        todo, b = todo[alive], b[alive]
        hit = f[b + direction * i]
        out[todo[hit]] = i
        todo = todo[~hit]
        i += 2
    return out


def smallest_coprime_offsets(ns: np.ndarray, table: PrimeTable) -> np.ndarray:
    """Smallest odd I < 2n with gcd(2n, I) = 1 and 2n - I prime, per n (0 if none)."""
    f = table.flags
    twice = 2 * ns
    out = np.zeros(ns.size, dtype=np.int64)
    todo = np.arange(ns.size)
    i = 1
    while todo.size:
        b = twice[todo]
        alive = b > i
        todo, b = todo[alive], b[alive]
        hit = f[b - i] & (np.gcd(b, i) == 1)
        out[todo[hit]] = i
        todo = todo[~hit]
        i += 2
    return out
