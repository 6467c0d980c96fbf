"""Witnesses built from primes of the forms 4m+1 and 4n-1.

A *mixed* witness pairs ``4m+1`` with ``4n-1`` and hits the target ``4(m+n)``;
a *matched* witness uses the same sign twice and hits ``2(2(m+n) +- 1)``.
Searches return the witness with the smallest ``m``; for odd targets the
plus-sign level is tried before the minus-sign level.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import Anomaly, CounterexampleCandidate, FormNotPrime
from .primes import PrimeTable, table_for

PLUS, MINUS = 1, -1


def _table(limit: int, table: PrimeTable | None) -> PrimeTable:
    if table is None or table.lo != 0 or table.hi <= limit:
        return table_for(limit)
    return table


def _sign(s: int) -> str:
    return "+1" if s > 0 else "-1"


@dataclass(frozen=True)
class FormWitness:
    l: int
    m: int
    n: int
    sign1: int
    sign2: int
    p1: int
    p2: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.m + self.n != self.l:
            raise ValueError(f"need m, n >= 1 with m + n = l: {self}")
        if self.sign1 not in (PLUS, MINUS) or self.sign2 not in (PLUS, MINUS):
            raise ValueError(f"signs must be +-1: {self}")
        if self.p1 != 4 * self.m + self.sign1 or self.p2 != 4 * self.n + self.sign2:
            raise ValueError(f"primes do not match their forms: {self}")

    @property
    def target(self) -> int:
        return self.p1 + self.p2

    @property
    def mixed(self) -> bool:
        return self.sign1 != self.sign2

    @property
    def midpoint(self) -> int:
        return self.target // 2

    @property
    def offset(self) -> int:
        """|p1 - p2| / 2, i.e. |2(m - n) + (sign1 - sign2)/2|."""
        return abs(self.p1 - self.p2) // 2

    def __str__(self) -> str:
        f1 = f"4*{self.m}{'+' if self.sign1 > 0 else '-'}1"
        f2 = f"4*{self.n}{'+' if self.sign2 > 0 else '-'}1"
        return (
            f"l={self.l} m={self.m} n={self.n}: "
            f"{f1} + {f2} = {self.p1} + {self.p2} = {self.target}"
        )


def _require(form: str, value: int, t: PrimeTable) -> None:
    if value < 2 or not t.flags[value]:
        raise FormNotPrime(form, value)


def _check_positive(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be positive, got ({m}, {n})")


def construct_even_target(m: int, n: int, table: PrimeTable | None = None) -> tuple[int, FormWitness]:
    """Mixed construction: ``(4m+1) + (4n-1) = 4(m+n)`` around the even midpoint 2(m+n)."""
    _check_positive(m, n)
    t = _table(4 * max(m, n) + 1, table)
    _require("4m+1", 4 * m + 1, t)
    _require("4n-1", 4 * n - 1, t)
    w = FormWitness(m + n, m, n, PLUS, MINUS, 4 * m + 1, 4 * n - 1)
    return w.target, w


def construct_odd_target(
    m: int, n: int, sign: int, table: PrimeTable | None = None
) -> tuple[int, FormWitness]:
    """Matched construction: ``(4m+s) + (4n+s) = 2(2(m+n) + s)`` around an odd midpoint."""
    _check_positive(m, n)
    if sign not in (PLUS, MINUS):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    t = _table(4 * max(m, n) + 1, table)
    tag = "+" if sign > 0 else "-"
    _require(f"4m{tag}1", 4 * m + sign, t)
    _require(f"4n{tag}1", 4 * n + sign, t)
    w = FormWitness(m + n, m, n, sign, sign, 4 * m + sign, 4 * n + sign)
    return w.target, w


def mixed_witnesses(l: int, table: PrimeTable | None = None) -> list[FormWitness]:
    """Every mixed witness at level ``l``, ascending by m."""
    if l < 2:
        raise ValueError(f"level must be >= 2, got {l}")
    t = _table(4 * l, table)
    m = np.arange(1, l, dtype=np.int64)
    ok = t.flags[4 * m + 1] & t.flags[4 * (l - m) - 1]
    return [
        FormWitness(l, int(a), l - int(a), PLUS, MINUS, 4 * int(a) + 1, 4 * (l - int(a)) - 1)
        for a in m[ok]
    ]


def matched_witnesses(l: int, sign: int, table: PrimeTable | None = None) -> list[FormWitness]:
    """Every matched witness with ``m + n = l`` and the given sign, ascending by m."""
    if l < 2:
        raise ValueError(f"level must be >= 2, got {l}")
    t = _table(4 * l, table)
    m = np.arange(1, l, dtype=np.int64)
    ok = t.flags[4 * m + sign] & t.flags[4 * (l - m) + sign]
    return [
        FormWitness(l, int(a), l - int(a), sign, sign, 4 * int(a) + sign, 4 * (l - int(a)) + sign)
        for a in m[ok]
    ]


def _first_mixed(l: int, t: PrimeTable) -> FormWitness | None:
    f = t.flags
    for m in range(1, l):
        if f[4 * m + 1] and f[4 * (l - m) - 1]:
            return FormWitness(l, m, l - m, PLUS, MINUS, 4 * m + 1, 4 * (l - m) - 1)
    return None


def _first_matched(l: int, sign: int, t: PrimeTable) -> FormWitness | None:
    f = t.flags
    for m in range(1, l):
        if f[4 * m + sign] and f[4 * (l - m) + sign]:
            return FormWitness(l, m, l - m, sign, sign, 4 * m + sign, 4 * (l - m) + sign)
    return None


def conjecture2_witness(l: int, table: PrimeTable | None = None) -> FormWitness:
    """Mixed witness at level ``l`` with the smallest m.

    Raises CounterexampleCandidate when no split ``l = m + n`` works.
    """
    if l < 2:
        raise ValueError(f"level must be >= 2, got {l}")
    w = _first_mixed(l, _table(4 * l, table))
    if w is None:
        raise CounterexampleCandidate(
            Anomaly("c2-no-witness", {"l": l}, f"m in [1, {l - 1}]", "no 4m+1, 4n-1 prime pair")
        )
    return w


def _odd_target_levels(target: int) -> tuple[tuple[int, int], tuple[int, int]]:
    return (PLUS, (target - 1) // 2), (MINUS, (target + 1) // 2)


def conjecture3_witness(target: int, table: PrimeTable | None = None) -> FormWitness:
    """Matched witness whose primes sum to ``2 * target`` for odd ``target >= 5``.

    The plus branch works at level (target-1)/2, the minus branch at
    (target+1)/2; the first branch that succeeds wins.
    """
    if target < 5 or target % 2 == 0:
        raise ValueError(f"target must be odd and >= 5, got {target}")
    t = _table(2 * target, table)
    for sign, level in _odd_target_levels(target):
        w = _first_matched(level, sign, t)
        if w is not None:
            return w
    raise CounterexampleCandidate(
        Anomaly(
            "c3-no-witness",
            {"target": target},
            f"plus level {(target - 1) // 2}, minus level {(target + 1) // 2}",
            "no matched 4m+-1 pair",
        )
    )


def conjecture4_verify(l: int, table: PrimeTable | None = None) -> tuple[FormWitness, FormWitness]:
    """(mixed, matched) witnesses at level ``l``; the matched one tries plus first."""
    if l < 2:
        raise ValueError(f"level must be >= 2, got {l}")
    t = _table(4 * l + 1, table)
    mixed = _first_mixed(l, t)
    matched = _first_matched(l, PLUS, t) or _first_matched(l, MINUS, t)
    if mixed is None or matched is None:
        missing = [h for h, w in (("mixed", mixed), ("matched", matched)) if w is None]
        raise CounterexampleCandidate(
            Anomaly(
                "c4-no-witness",
                {"l": l},
                f"m in [1, {l - 1}]",
                f"missing half: {', '.join(missing)}",
            )
        )
    return mixed, matched


# ---------------------------------------------------------------------------
# batch routines used by the range harness

def _scan(sums: np.ndarray, ps: list[int], floor: int, f: np.ndarray) -> np.ndarray:
    """For each s in ``sums``: smallest p in ``ps`` with s - p prime and >= floor; 0 if none."""
    out = np.zeros(sums.size, dtype=np.int64)
    todo = np.arange(sums.size)
    for p in ps:
        if todo.size == 0:
            break
        s = sums[todo]
        alive = s - p >= floor
        todo, s = todo[alive], s[alive]
        hit = f[s - p]
        out[todo[hit]] = p
        todo = todo[~hit]
    return out


def _forms(t: PrimeTable, residue: int, limit: int) -> list[int]:
    ps = t.primes_between(3, limit)
    return ps[ps % 4 == residue].tolist()


def smallest_mixed_m(levels: np.ndarray, t: PrimeTable) -> np.ndarray:
    """Smallest m per level (0 if none). 4n-1 = 4l - (4m+1) must be >= 3."""
    sums = 4 * levels
    p = _scan(sums, _forms(t, 1, int(sums.max(initial=0))), 3, t.flags)
    return np.where(p > 0, (p - 1) // 4, 0)


def smallest_matched_m(levels: np.ndarray, sign: int, t: PrimeTable) -> np.ndarray:
    """Smallest m per level for matched forms of the given sign (0 if none)."""
    sums = 4 * levels + 2 * sign
    floor = 5 if sign > 0 else 3
    p = _scan(sums, _forms(t, 1 if sign > 0 else 3, int(sums.max(initial=0))), floor, t.flags)
    return np.where(p > 0, (p - sign) // 4, 0)


# ---------------------------------------------------------------------------
# the eight elementary identities

@dataclass(frozen=True)
class IdentityReport:
    bound: int
    checked: dict[int, int]
    violations: dict[int, list[tuple[int, ...]]]

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def lines(self) -> list[str]:
        return [
            f"identity {k}: {self.checked[k]} cases, {len(self.violations[k])} violations"
            for k in sorted(self.checked)
        ]


def _bad(mask: np.ndarray, *axes: np.ndarray) -> list[tuple[int, ...]]:
    idx = np.nonzero(mask)
    grids = np.broadcast_arrays(*axes)
    return [tuple(int(g[i]) for g in grids) for i in zip(*idx)]


def identity_suite(bound: int, table: PrimeTable | None = None) -> IdentityReport:
    """Exhaustively check the eight 4m+-1 identities for all positive values <= bound.

    (1)-(3) quantify over (m, n, l, k); (4)-(5) over (m, n) and the free odd/even
    value; (6)-(8) over m >= n with the stated P and I.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    r = np.arange(1, bound + 1, dtype=np.int64)
    m, n, l, k = r[:, None, None, None], r[None, :, None, None], r[None, None, :, None], r[None, None, None, :]
    checked: dict[int, int] = {}
    viol: dict[int, list[tuple[int, ...]]] = {}

    lhs = l + k == m + n + 1
    rhs = (4 * m + 1) + (4 * n + 1) == (4 * l - 1) + (4 * k - 1)
    viol[1] = _bad(lhs != rhs, m, n, l, k)

    lhs = l + k == m + n
    a = (4 * m + 1) + (4 * n - 1)
    rhs = (a == (4 * l + 1) + (4 * k - 1)) & (a == (4 * l - 1) + (4 * k + 1))
    viol[2] = _bad(lhs != rhs, m, n, l, k)

    rhs = (4 * m + 1) + (4 * n + 1) == (4 * l + 1) + (4 * k + 1)
    viol[3] = _bad(lhs != rhs, m, n, l, k)
    checked[1] = checked[2] = checked[3] = bound**4

    m2, n2 = r[:, None, None], r[None, :, None]
    free = np.arange(1, 4 * bound + 4, dtype=np.int64)[None, None, :]
    viol[4] = _bad((2 * free == 4 * (m2 + n2) + 2) != (free == 2 * (m2 + n2) + 1), m2, n2, free)
    viol[5] = _bad((2 * free == 4 * (m2 + n2)) != (free == 2 * (m2 + n2)), m2, n2, free)
    checked[4] = checked[5] = int(bound * bound * free.size)

    ge = m2 >= n2
    # (6): P = 2(m-n), p1 = 4m+1, p2 = 4n+1; free value plays I
    P6 = 2 * (m2 - n2)
    lhs = free == 2 * (m2 + n2) + 1
    rhs = (free + P6 == 4 * m2 + 1) & (free - P6 == 4 * n2 + 1)
    viol[6] = _bad(ge & (lhs != rhs), m2, n2, free)
    # (7): I = 2(m-n)+1, p1 = 4m+1, p2 = 4n-1; free value plays P
    I7 = 2 * (m2 - n2) + 1
    lhs = free == 2 * (m2 + n2)
    rhs = (free + I7 == 4 * m2 + 1) & (free - I7 == 4 * n2 - 1)
    viol[7] = _bad(ge & (lhs != rhs), m2, n2, free)
    checked[6] = checked[7] = int(np.count_nonzero(np.broadcast_to(ge, (bound, bound, free.size))))

    # (8): whenever the forms in (6)/(7) are distinct primes, gcd(P, I) = 1
    t = _table(4 * bound + 2, table)
    viol[8] = []
    cases = 0
    for a in range(1, bound + 1):
        for b in range(1, a + 1):
            if t.flags[4 * a + 1] and t.flags[4 * b + 1] and a != b:
                cases += 1
                P, I = 2 * (a - b), 2 * (a + b) + 1
                if gcd(P, I) != 1:
                    viol[8].append((6, a, b, P, I))
            if t.flags[4 * a + 1] and t.flags[4 * b - 1]:
                cases += 1
                P, I = 2 * (a + b), 2 * (a - b) + 1
                if gcd(P, I) != 1:
                    viol[8].append((7, a, b, P, I))
    checked[8] = cases
    return IdentityReport(bound, checked, viol)
