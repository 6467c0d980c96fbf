import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldbach_lab.errors import CounterexampleCandidate
from goldbach_lab.goldbach import (
    GoldbachPartition,
    MidpointWitness,
    bijection_audit,
    is_goldbach,
    midpoint_counts,
    midpoint_witnesses,
    parity_split,
    partitions,
    smallest_offsets,
    smallest_partition_primes,
)
from goldbach_lab.primes import PrimeTable, sieve_range

from oracles import brute_midpoints, brute_partitions, trial_division

evens = st.integers(2, 5000).map(lambda k: 2 * k)


def pairs(n, table=None):
    return [(w.p1, w.p2) for w in partitions(n, table)]


@pytest.mark.parametrize(
    "n,expected",
    [
        (4, [(2, 2)]),
        (6, [(3, 3)]),
        (8, [(3, 5)]),
        (10, [(3, 7), (5, 5)]),
        (12, [(5, 7)]),
        (14, [(3, 11), (7, 7)]),
        (16, [(3, 13), (5, 11)]),
        (24, [(5, 19), (7, 17), (11, 13)]),
    ],
)
def test_small_partitions(n, expected):
    assert pairs(n) == expected


def test_listed_pairs_present():
    assert {(7, 73), (37, 43)} <= set(pairs(80))
    assert {(7, 8893), (13, 8887)} <= set(pairs(8900))


def test_partitions_of_100():
    assert len(partitions(100)) == len(brute_partitions(100)) == 6


@settings(max_examples=80, deadline=None)
@given(evens)
def test_partitions_match_brute_force(n):
    assert pairs(n) == brute_partitions(n)


@settings(max_examples=80, deadline=None)
@given(evens)
def test_midpoints_match_definition(n):
    got = [(w.midpoint, w.offset) for w in midpoint_witnesses(n)]
    assert got == brute_midpoints(n)


@pytest.mark.parametrize(
    "n,offsets",
    [(16, [3, 5]), (4, [0]), (10, [0, 2]), (14, [0, 4])],
)
def test_midpoint_offsets(n, offsets):
    ws = midpoint_witnesses(n)
    assert [w.offset for w in ws] == offsets
    for w in ws:
        assert w.p1 + w.p2 == n and w.p1 - w.p2 == 2 * w.offset


def test_midpoint_16_detail():
    a, b = midpoint_witnesses(16)
    assert (a.midpoint, a.offset, a.p1, a.p2) == (8, 3, 11, 5)
    assert (b.midpoint, b.offset, b.p1, b.p2) == (8, 5, 13, 3)


@pytest.mark.parametrize("bad", [3, 2, 0, 15, -4])
def test_invalid_inputs(bad):
    with pytest.raises(ValueError):
        partitions(bad)
    with pytest.raises(ValueError):
        midpoint_witnesses(bad)
    with pytest.raises(ValueError):
        is_goldbach(bad)


def _fake_table(limit, drop):
    t = sieve_range(0, limit)
    flags = t.flags.copy()
    flags[list(drop)] = False
    return PrimeTable(0, limit, np.packbits(flags, bitorder="little"))


def test_empty_partition_raises_anomaly():
    # pretend 3, 5, 11 and 13 are composite: 16 then has no partition
    fake = _fake_table(1000, [3, 5, 11, 13])
    with pytest.raises(CounterexampleCandidate) as exc:
        partitions(16, fake)
    assert exc.value.anomaly.kind == "goldbach-empty"
    assert exc.value.anomaly.inputs == {"n": 16}
    with pytest.raises(CounterexampleCandidate):
        midpoint_witnesses(16, fake)
    assert not is_goldbach(16, fake)


@pytest.mark.parametrize("n", [4, 6, 8900])
def test_is_goldbach(n):
    assert is_goldbach(n)


@pytest.mark.parametrize(
    "a,c,expected", [(13, 3, (8, 5)), (7, 7, (7, 0)), (73, 7, (40, 33))]
)
def test_parity_split(a, c, expected):
    assert parity_split(a, c) == expected


@pytest.mark.parametrize("a,c", [(4, 3), (3, 4), (3, 5), (5, -1)])
def test_parity_split_errors(a, c):
    with pytest.raises(ValueError):
        parity_split(a, c)


def test_parity_law_exhaustive():
    rng = np.arange(1, 10**4, 2)
    for a in range(1, 10**4, 2):
        cs = rng[rng < a]
        half_sum, half_diff = (a + cs) // 2, (a - cs) // 2
        assert np.all((half_sum % 2) != (half_diff % 2)), a


def test_even_halves_share_parity():
    for a in range(0, 2000, 2):
        for c in range(0, a + 1, 2):
            assert ((a + c) // 2) % 2 == ((a - c) // 2) % 2


def test_reconstruction_for_prime_pairs(table):
    ps = table.primes[(table.primes > 2) & (table.primes < 400)].tolist()
    from math import gcd

    for p1 in ps:
        for p2 in ps:
            if p2 > p1:
                break
            P, I = parity_split(p1, p2)
            assert P + I == p1 and P - I == p2
            if p1 != p2:
                assert gcd(P, I) == 1


@settings(max_examples=100, deadline=None)
@given(evens)
def test_round_trip(n):
    parts = partitions(n)
    wits = midpoint_witnesses(n)
    assert len(parts) == len(wits)
    assert sorted(w.to_partition() for w in wits) == parts
    assert sorted((p.to_witness() for p in parts), key=lambda w: w.offset) == wits


def test_witness_invariants_enforced():
    with pytest.raises(ValueError):
        MidpointWitness(16, 8, 4, 12, 4)  # same parity as midpoint
    with pytest.raises(ValueError):
        MidpointWitness(16, 8, 8, 16, 0)  # offset not below midpoint
    with pytest.raises(ValueError):
        GoldbachPartition(16, 11, 5)  # p1 > p2


def test_batch_smallest_agree(table):
    ns = np.arange(4, 20001, 2)
    p = smallest_partition_primes(ns, table)
    off = smallest_offsets(ns, table)
    for n, a, b in zip(ns.tolist(), p.tolist(), off.tolist()):
        parts = partitions(n, table)
        assert a == parts[0].p1
        assert b == midpoint_witnesses(n, table)[0].offset


def test_midpoint_window_counts(table):
    counts = midpoint_counts(4, 3000, table)
    for n in range(4, 3001, 2):
        assert counts[n] == len(brute_midpoints(n)), n


def test_bijection_small(table):
    audit = bijection_audit(4, 50000, table)
    assert audit.ok and audit.checked == 24999


def test_bijection_pair_total_matches_brute_force():
    audit = bijection_audit(4, 2000, sieve_range(0, 1 << 12))
    assert audit.ok
    assert audit.pairs == sum(len(brute_partitions(n)) for n in range(4, 2001, 2))
