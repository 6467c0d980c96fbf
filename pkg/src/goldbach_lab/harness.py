"""Range verification driver.

A :class:`VerifyJob` splits ``[lo, hi]`` into fixed-width chunks; chunks run on
a process pool (or inline for one worker) and are merged strictly in chunk
order, so the report body does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Iterable, Iterator

import numpy as np

from . import forms, goldbach, progressions
from .errors import Anomaly, CounterexampleCandidate
from .primes import PrimeTable, count_by_class, residue_census, sieve_range, table_for

TASKS = ("goldbach", "midpoint", "c2", "c3", "c4", "t5", "t6", "t7", "census")
CSV_COLUMNS = ("task", "lo", "hi", "verified", "anomalies", "max_min_offset", "elapsed_ms")

# smallest admissible lo, and the parity lo must have (None = any)
_FLOORS = {
    "goldbach": (4, 0),
    "midpoint": (4, 0),
    "c2": (2, None),
    "c3": (5, 1),
    "c4": (2, None),
    "t5": (2, None),
    "t6": (1, None),
    "t7": (2, None),
    "census": (0, None),
}

_STAT_NAMES = {
    "goldbach": "largest smallest prime",
    "midpoint": "largest smallest offset",
    "c2": "largest smallest m",
    "c3": "largest smallest m",
    "c4": "largest smallest m",
    "t5": "largest smallest offset",
    "t6": "largest collapsed prime",
    "t7": "largest smallest offset",
    "census": "count_one:count_three",
}


@dataclass(frozen=True)
class VerifyJob:
    task: str
    lo: int
    hi: int
    chunk: int = 1 << 16
    workers: int = 1
    t_max: int = 50

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}; choose from {', '.join(TASKS)}")
        if self.lo > self.hi:
            raise ValueError(f"lo={self.lo} > hi={self.hi}")
        if self.chunk < 1 or self.workers < 1 or self.t_max < 1:
            raise ValueError("chunk, workers and t_max must be >= 1")
        floor, parity = _FLOORS[self.task]
        if self.lo < floor or (parity is not None and self.lo % 2 != parity):
            kind = {0: "even ", 1: "odd "}.get(parity, "")
            raise ValueError(f"task {self.task} needs an {kind}lo >= {floor}, got {self.lo}")

    def chunks(self) -> list[tuple[int, int]]:
        return [
            (a, min(a + self.chunk - 1, self.hi)) for a in range(self.lo, self.hi + 1, self.chunk)
        ]

    def table_limit(self) -> int:
        hi = self.hi
        return {
            "c2": 4 * hi,
            "c3": 2 * hi,
            "c4": 4 * hi + 2,
            "t5": 4 * self.t_max * hi,
            "t6": 2 * hi,
            "t7": 2 * hi,
        }.get(self.task, hi)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"task": self.task, "lo": self.lo, "hi": self.hi, "chunk": self.chunk}
        if self.task == "t5":
            out["t_max"] = self.t_max
        return out


@dataclass
class ChunkResult:
    index: int
    lo: int
    hi: int
    verified: int = 0
    anomalies: list[Anomaly] = field(default_factory=list)
    stat: int | None = None
    stat_at: int | None = None
    extra: dict[str, int] = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def offer(self, values: np.ndarray, instances: np.ndarray) -> None:
        """Fold per-instance witness sizes into the running max (ties: smaller instance)."""
        if values.size == 0:
            return
        i = int(np.argmax(values))
        v = int(values[i])
        at = int(instances[i])
        if self.stat is None or (v, -at) > (self.stat, -self.stat_at):
            self.stat, self.stat_at = v, at

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "index": self.index,
            "lo": self.lo,
            "hi": self.hi,
            "verified": self.verified,
            "anomalies": len(self.anomalies),
            "stat": self.stat,
            "stat_at": self.stat_at,
        }
        out.update(sorted(self.extra.items()))
        if timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def _instances(task: str, a: int, b: int, table: PrimeTable) -> np.ndarray:
    if task in ("goldbach", "midpoint"):
        return np.arange(a + (a & 1), b + 1, 2, dtype=np.int64)
    if task == "c3":
        return np.arange(a + 1 - (a & 1), b + 1, 2, dtype=np.int64)
    if task == "census":
        return table.primes_between(a, b).astype(np.int64)
    return np.arange(a, b + 1, dtype=np.int64)


def _recheck(res: ChunkResult, call, *args) -> None:
    """Re-run the single-instance routine so its own anomaly record is carried."""
    try:
        call(*args)
    except CounterexampleCandidate as exc:
        res.anomalies.append(exc.anomaly)
    else:
        res.anomalies.append(
            Anomaly("batch-mismatch", {"call": call.__name__, "args": list(args[:-1])},
                    "batch scan", "batch search failed where the direct search succeeded")
        )


def evaluate_chunk(task: str, index: int, a: int, b: int, t_max: int, table: PrimeTable) -> ChunkResult:
    start = time.perf_counter()
    res = ChunkResult(index, a, b)
    xs = _instances(task, a, b, table)

    if task == "goldbach":
        p = goldbach.smallest_partition_primes(xs, table)
        for n in xs[p == 0].tolist():
            _recheck(res, goldbach.partitions, n, table)
        res.offer(p, xs)
        res.verified = int(np.count_nonzero(p))

    elif task == "midpoint":
        off = goldbach.smallest_offsets(xs, table)
        for n in xs[off < 0].tolist():
            _recheck(res, goldbach.midpoint_witnesses, n, table)
        res.offer(off, xs)
        res.verified = int(np.count_nonzero(off >= 0))

    elif task == "c2":
        m = forms.smallest_mixed_m(xs, table)
        for lv in xs[m == 0].tolist():
            _recheck(res, forms.conjecture2_witness, lv, table)
        res.offer(m, xs)
        res.verified = int(np.count_nonzero(m))

    elif task == "c3":
        m = forms.smallest_matched_m((xs - 1) // 2, forms.PLUS, table)
        minus = m == 0
        m[minus] = forms.smallest_matched_m((xs[minus] + 1) // 2, forms.MINUS, table)
        for tg in xs[m == 0].tolist():
            _recheck(res, forms.conjecture3_witness, tg, table)
        res.offer(m, xs)
        res.verified = int(np.count_nonzero(m))
        res.extra["minus_branch"] = int(np.count_nonzero(minus & (m > 0)))

    elif task == "c4":
        mixed = forms.smallest_mixed_m(xs, table)
        matched = forms.smallest_matched_m(xs, forms.PLUS, table)
        minus = matched == 0
        matched[minus] = forms.smallest_matched_m(xs[minus], forms.MINUS, table)
        ok = (mixed > 0) & (matched > 0)
        for lv in xs[~ok].tolist():
            _recheck(res, forms.conjecture4_verify, lv, table)
        res.offer(np.maximum(mixed, matched), xs)
        res.verified = int(np.count_nonzero(ok))
        res.extra["minus_branch"] = int(np.count_nonzero(minus & (matched > 0)))

    elif task == "t5":
        ts = np.arange(1, t_max + 1, dtype=np.int64)
        ok = np.ones(xs.size, dtype=bool)
        wide = 0
        for direction in (1, -1):
            bases = (2 * ts[None, :] * xs[:, None]).ravel()
            off = progressions.smallest_offsets_grid(bases, direction, table).reshape(xs.size, t_max)
            missing = off == 0
            ok &= ~missing.any(axis=1)
            for i, j in zip(*np.nonzero(missing)):
                _recheck(res, progressions.offset_witnesses, int(ts[j]), int(xs[i]), direction, table)
            wide += int(np.count_nonzero(off > 2 * ts[None, :] - 1))
            res.offer(off.max(axis=1), xs)
        res.verified = int(np.count_nonzero(ok))
        res.extra["outside_stated_range"] = wide

    elif task == "t6":
        confirmed = 0
        biggest = np.zeros(xs.size, dtype=np.int64)
        for k, n in enumerate(xs.tolist()):
            c, g, bad = progressions.audit_collapse(n, table)
            confirmed += c
            biggest[k] = g
            res.anomalies.extend(bad)
            res.verified += not bad
        res.offer(biggest, xs)
        res.extra["confirmed"] = confirmed

    elif task == "t7":
        off = progressions.smallest_coprime_offsets(xs, table)
        for n in xs[off == 0].tolist():
            _recheck(res, progressions.coprime_witness, n, table)
        res.offer(off, xs)
        res.verified = int(np.count_nonzero(off))

    elif task == "census":
        two, one, three = count_by_class(xs)
        odd_class = xs[(xs != 2) & (xs % 2 == 0)]
        for p in odd_class.tolist():
            res.anomalies.append(Anomaly("census-unclassified", {"p": p}, f"[{a}, {b}]"))
        res.verified = two + one + three
        res.extra.update(count_two=two, count_one=one, count_three=three)

    res.elapsed_ms = (time.perf_counter() - start) * 1000
    return res


# ---------------------------------------------------------------------------
# worker pool

_WORKER_TABLE: PrimeTable | None = None


def _init_worker(lo: int, hi: int, bits: np.ndarray) -> None:
    global _WORKER_TABLE
    _WORKER_TABLE = PrimeTable(lo, hi, bits)


def _worker_chunk(args: tuple) -> ChunkResult:
    return evaluate_chunk(*args, _WORKER_TABLE)


@dataclass
class RangeReport:
    job: VerifyJob
    per_chunk: list[ChunkResult]
    total_chunks: int
    elapsed_ms: float = 0.0

    @property
    def complete(self) -> bool:
        return len(self.per_chunk) == self.total_chunks

    @property
    def cursor(self) -> int | None:
        return None if self.complete else len(self.per_chunk)

    @property
    def verified_count(self) -> int:
        return sum(c.verified for c in self.per_chunk)

    @property
    def anomalies(self) -> list[Anomaly]:
        return [a for c in self.per_chunk for a in c.anomalies]

    @property
    def anomaly_count(self) -> int:
        return sum(len(c.anomalies) for c in self.per_chunk)

    def stats(self) -> dict[str, Any]:
        out: dict[str, Any] = {"statistic": _STAT_NAMES[self.job.task]}
        extra: dict[str, int] = {}
        best: tuple[int, int] | None = None
        for c in self.per_chunk:
            for k, v in c.extra.items():
                extra[k] = extra.get(k, 0) + v
            if c.stat is not None and (best is None or (c.stat, -c.stat_at) > (best[0], -best[1])):
                best = (c.stat, c.stat_at)
        if self.job.task == "census":
            out["value"] = (
                f"{extra['count_one']}:{extra['count_three']}" if self.per_chunk else None
            )
        else:
            out["value"], out["at"] = best if best else (None, None)
        out.update(sorted(extra.items()))
        return out

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "job": self.job.to_dict(),
            "verified_count": self.verified_count,
            "anomaly_count": self.anomaly_count,
            "min_witness_stats": self.stats(),
            "complete": self.complete,
            "cursor": self.cursor,
            "total_chunks": self.total_chunks,
            "per_chunk": [c.to_dict(timing) for c in self.per_chunk],
            "anomalies": [
                dict(chunk=c.index, **a.to_dict(timing)) for c in self.per_chunk for a in c.anomalies
            ],
        }
        if timing:
            out["runtime"] = {"workers": self.job.workers, "elapsed_ms": round(self.elapsed_ms, 3)}
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RangeReport":
        jd = dict(data["job"])
        workers = data.get("runtime", {}).get("workers", 1)
        job = VerifyJob(workers=workers, **jd)
        by_chunk: dict[int, list[Anomaly]] = {}
        for a in data.get("anomalies", []):
            a = dict(a)
            by_chunk.setdefault(a.pop("chunk"), []).append(Anomaly.from_dict(a))
        chunks = []
        for c in data["per_chunk"]:
            c = dict(c)
            extra = {
                k: c[k] for k in c
                if k not in ("index", "lo", "hi", "verified", "anomalies", "stat", "stat_at", "elapsed_ms")
            }
            chunks.append(
                ChunkResult(c["index"], c["lo"], c["hi"], c["verified"], by_chunk.get(c["index"], []),
                            c["stat"], c["stat_at"], extra, c.get("elapsed_ms", 0.0))
            )
        return cls(job, chunks, data["total_chunks"], data.get("runtime", {}).get("elapsed_ms", 0.0))


def build_table(job: VerifyJob) -> PrimeTable:
    return sieve_range(0, job.table_limit() + 1)


def _stream(job: VerifyJob, todo: list[tuple], table: PrimeTable) -> Iterator[ChunkResult]:
    if job.workers == 1 or len(todo) <= 1:
        for args in todo:
            yield evaluate_chunk(*args, table)
        return
    with ProcessPoolExecutor(
        max_workers=job.workers, initializer=_init_worker, initargs=(table.lo, table.hi, table.bits)
    ) as pool:
        try:
            yield from pool.map(_worker_chunk, todo)
        finally:
            pool.shutdown(wait=True, cancel_futures=True)


def run_job(
    job: VerifyJob,
    *,
    table: PrimeTable | None = None,
    resume: RangeReport | None = None,
    budget_seconds: float | None = None,
    max_chunks: int | None = None,
) -> RangeReport:
    """Run (or continue) a job.

    Stops early once ``budget_seconds`` have elapsed or ``max_chunks`` chunks
    have completed in this call; the returned report then carries a cursor and
    can be passed back as ``resume``.
    """
    start = time.perf_counter()
    bounds = job.chunks()
    done: list[ChunkResult] = []
    if resume is not None:
        if resume.job.to_dict() != job.to_dict():
            raise ValueError("resume report belongs to a different job")
        done = list(resume.per_chunk)
    if table is None or table.lo != 0 or table.hi <= job.table_limit():
        table = build_table(job)
    todo = [(job.task, i, a, b, job.t_max) for i, (a, b) in enumerate(bounds)][len(done):]
    report = RangeReport(job, done, len(bounds))
    stream = _stream(job, todo, table)
    try:
        for k, res in enumerate(stream, 1):
            done.append(res)
            if max_chunks is not None and k >= max_chunks:
                break
            if budget_seconds is not None and time.perf_counter() - start > budget_seconds:
                break
    finally:
        stream.close()
    report.elapsed_ms = (resume.elapsed_ms if resume else 0.0) + (time.perf_counter() - start) * 1000
    return report


def emit_report(report: RangeReport, fmt: str = "json", timing: bool = True) -> bytes:
    """Serialise a report; with ``timing=False`` the output is fully deterministic."""
    if fmt == "json":
        return (json.dumps(report.to_dict(timing), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        if report.verified_count + report.anomaly_count:
            job = report.job
            value = report.stats()["value"]
            w.writerow([
                job.task, job.lo, job.hi, report.verified_count, report.anomaly_count,
                "" if value is None else value,
                f"{report.elapsed_ms:.3f}" if timing else "",
            ])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# single-target display

def _lines(items: Iterable[object]) -> list[str]:
    return [str(x) for x in items]


def show_witness(n: int, task: str, table: PrimeTable | None = None, t: int = 2) -> list[str]:
    """Human-readable witnesses for one target, straight from the module routines."""
    if task == "goldbach":
        return _lines(goldbach.partitions(n, table))
    if task == "midpoint":
        return _lines(goldbach.midpoint_witnesses(n, table))
    if task == "c2":
        return _lines(forms.mixed_witnesses(n, table)) or _lines([forms.conjecture2_witness(n, table)])
    if task == "c3":
        forms.conjecture3_witness(n, table)
        out = []
        for sign, level in ((1, (n - 1) // 2), (-1, (n + 1) // 2)):
            if level >= 2:
                out += _lines(forms.matched_witnesses(level, sign, table))
        return out
    if task == "c4":
        mixed, matched = forms.conjecture4_verify(n, table)
        return [f"mixed   {mixed}", f"matched {matched}"]
    if task == "t5":
        return _lines(
            w for d in (1, -1) for w in progressions.offset_witnesses(t, n, d, table)
        )
    if task == "t6":
        tb = table if table is not None and table.hi > 2 * n else table_for(2 * n)
        out = []
        for off in range(1, 2 * n, 2):
            status = progressions.gcd_collapse_check(n, off, tb)
            if status is not progressions.Collapse.VACUOUS:
                out.append(f"{status.value}: 2*{n} - {off} = {2 * n - off}, gcd = {gcd(2 * n, off)}")
        return out
    if task == "t7":
        return [str(progressions.coprime_witness(n, table))]
    if task == "census":
        row = residue_census(n, table)
        return [f"limit={row.limit} count_one={row.count_one} count_three={row.count_three} total={row.total}"]
    raise ValueError(f"unknown task {task!r}")
