"""Reference implementations that share no code with the package."""

from math import gcd


def trial_division(n: int) -> bool:
    """Independent primality oracle."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def brute_partitions(n: int) -> list[tuple[int, int]]:
    return [(p, n - p) for p in range(2, n // 2 + 1) if trial_division(p) and trial_division(n - p)]


def brute_midpoints(n: int) -> list[tuple[int, int]]:
    """(midpoint, offset) pairs straight from the definition: every I in [0, P)."""
    P = n // 2
    out = []
    for i in range(P):
        if i and ((P + i) % 2 == 0 or gcd(P, i) != 1):
            continue
        if trial_division(P + i) and trial_division(P - i):
            out.append((P, i))
    return out
