"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""

import time

import numpy as np
import pytest

from goldbach_lab.forms import identity_suite
from goldbach_lab.goldbach import bijection_audit
from goldbach_lab.harness import VerifyJob, emit_report, run_job, show_witness
from goldbach_lab.primes import miller_rabin, residue_census, sieve_range
from goldbach_lab.progressions import offset_window

from conftest import ACCEPTANCE_RESULTS
from oracles import trial_division

pytestmark = pytest.mark.slow

# n -> the decompositions written out in the worked list
WORKED_LIST = {
    4: [(2, 2)],
    6: [(3, 3)],
    8: [(5, 3)],
    10: [(5, 5), (7, 3)],
    12: [(7, 5)],
    14: [(7, 7), (11, 3)],
    16: [(13, 3), (11, 5)],
    24: [(17, 7), (19, 5)],
    80: [(73, 7), (37, 43)],
    8900: [(7, 8893), (13, 8887)],
}


def record(name, ok, detail=""):
    ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def frontier_runs():
    """Criterion-2 job at every worker count 1..16, with wall times."""
    runs = {}
    for workers in range(1, 17):
        job = VerifyJob("goldbach", 4, 10**7, chunk=1 << 16, workers=workers)
        start = time.perf_counter()
        rep = run_job(job)
        runs[workers] = (rep, time.perf_counter() - start)
    return runs


def test_01_worked_list():
    start = time.perf_counter()
    missing = []
    for n, pairs in WORKED_LIST.items():
        shown = set()
        for line in show_witness(n, "goldbach"):
            lhs, rhs = line.split("=")
            a, b = (int(x) for x in rhs.split("+"))
            assert int(lhs) == n == a + b
            shown.add(frozenset((a, b)))
        missing += [(n, p) for p in pairs if frozenset(p) not in shown]
    elapsed = time.perf_counter() - start
    record("1 worked list", not missing and elapsed < 1.0, f"missing={missing} {elapsed:.3f}s")


def test_02_goldbach_frontier(frontier_runs):
    one, t1 = frontier_runs[1]
    eight, t8 = frontier_runs[8]
    ok = (
        one.anomaly_count == 0
        and one.verified_count == (10**7 - 4) // 2 + 1
        and eight.anomaly_count == 0
        and t1 <= 120
        and t8 <= 30
    )
    record(
        "2 Goldbach frontier 10^7",
        ok,
        f"verified={one.verified_count} anomalies={one.anomaly_count} "
        f"1 worker {t1:.1f}s, 8 workers {t8:.1f}s, largest smallest prime {one.stats()['value']}",
    )


def test_03_bijection():
    audit = bijection_audit(4, 10**6)
    record(
        "3 partition/midpoint bijection [4, 10^6]",
        audit.ok and audit.checked == 499999,
        f"checked={audit.checked} pairs={audit.pairs} mismatched={len(audit.mismatched)} "
        f"broken={len(audit.broken_round_trips)}",
    )


def test_04_form_conjectures():
    c2 = run_job(VerifyJob("c2", 2, 10**5))
    c3 = run_job(VerifyJob("c3", 5, 2 * 10**5 + 1))
    c4 = run_job(VerifyJob("c4", 2, 10**5))
    ok = (
        c2.anomaly_count == c3.anomaly_count == c4.anomaly_count == 0
        and c2.verified_count == 10**5 - 1
        and c3.verified_count == 10**5 - 1
        and c4.verified_count == 10**5 - 1
    )
    record(
        "4 form conjectures",
        ok,
        f"c2 {c2.verified_count}/{c2.anomaly_count} c3 {c3.verified_count}/{c3.anomaly_count} "
        f"c4 {c4.verified_count}/{c4.anomaly_count}",
    )


def test_05_gcd_collapse():
    rep = run_job(VerifyJob("t6", 1, 5000))
    record(
        "5 gcd collapse audit 2n <= 10^4",
        rep.anomaly_count == 0 and rep.verified_count == 5000,
        f"n checked={rep.verified_count} violations={rep.anomaly_count} "
        f"confirmed={rep.stats()['confirmed']}",
    )


def test_06_coprime_witness():
    rep = run_job(VerifyJob("t7", 2, 10**5))
    record(
        "6 coprime witness n <= 10^5",
        rep.anomaly_count == 0 and rep.verified_count == 10**5 - 1,
        f"verified={rep.verified_count} largest offset={rep.stats()['value']}",
    )


def test_07_offset_grid():
    rep = run_job(VerifyJob("t5", 2, 1000, t_max=50))
    record(
        "7 offset grid t <= 50, n <= 10^3",
        rep.anomaly_count == 0 and rep.verified_count == 999,
        f"verified={rep.verified_count} outside [1, 2t-1]={rep.stats()['outside_stated_range']}",
    )


def test_08_window_200():
    below = {200 - int(i) for i in offset_window(200, -1)}
    above = {200 + int(i) for i in offset_window(200, 1)}
    ok = below == {p for p in range(3, 200) if trial_division(p)} and above == {
        p for p in range(201, 400) if trial_division(p)
    }
    record("8 200 +- I windows", ok, f"{len(below)} below, {len(above)} above")


def test_09_census():
    row = residue_census(10**6)
    ok = (row.count_one, row.count_three, row.total) == (39175, 39322, 78498) and row.imbalance < 0.01
    record("9 census 10^6", ok, f"{row} imbalance={row.imbalance:.5f}")


def test_10_oracle_equivalence():
    small = sieve_range(0, 10**5)
    td = np.array([trial_division(n) for n in range(10**5)])
    big = sieve_range(0, 10**6)
    mr = np.array([miller_rabin(n) for n in range(10**6)])
    ok = np.array_equal(small.flags, td) and np.array_equal(big.flags, mr)
    record("10 oracle equivalence", ok, f"{int(td.sum())} primes < 1e5, {int(mr.sum())} primes < 1e6")


def test_11_identity_suite():
    rep = identity_suite(50)
    record("11 identity suite bound 50", rep.ok, "; ".join(rep.lines()))


def test_12_determinism(frontier_runs):
    ref = emit_report(frontier_runs[1][0], "json", timing=False)
    ref_csv = emit_report(frontier_runs[1][0], "csv", timing=False)
    differing = [
        w for w, (rep, _) in frontier_runs.items()
        if emit_report(rep, "json", timing=False) != ref or emit_report(rep, "csv", timing=False) != ref_csv
    ]
    record("12 determinism workers 1-16", not differing, f"differing worker counts: {differing}")
