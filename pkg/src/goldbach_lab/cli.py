"""Command-line entry point.

Exit codes: 0 clean, 1 usage error, 2 anomaly detected.

    goldbach-lab verify --task goldbach --from 4 --to 10000000 --workers 4
    goldbach-lab witness --task goldbach 8900
    goldbach-lab census --to 1000000 --format json
    goldbach-lab progression --t 2 --offset 1 --n-max 10
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import CounterexampleCandidate, RangeTooLarge
from .harness import TASKS, RangeReport, VerifyJob, emit_report, run_job, show_witness
from .progressions import ProgressionSpec, progression_primes

EXIT_OK, EXIT_USAGE, EXIT_ANOMALY = 0, 1, 2

log = logging.getLogger("goldbach_lab")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_output(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--no-timing", action="store_true",
                   help="omit elapsed times and timestamps (byte-reproducible output)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="goldbach-lab", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a task over a range")
    v.add_argument("--task", choices=TASKS, required=True)
    v.add_argument("--from", dest="lo", type=int, required=True)
    v.add_argument("--to", dest="hi", type=int, required=True)
    v.add_argument("--chunk", type=int, default=1 << 16)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--t-max", type=int, default=50, help="largest t for the t5 grid")
    v.add_argument("--budget-seconds", type=float, help="stop after this long and emit a resumable report")
    v.add_argument("--resume", type=Path, help="JSON report of an interrupted run")
    _add_output(v, "csv")

    w = sub.add_parser("witness", help="print every witness for one target")
    w.add_argument("--task", choices=TASKS, required=True)
    w.add_argument("n", type=int)
    w.add_argument("--t", type=int, default=2, help="progression parameter for t5")

    c = sub.add_parser("census", help="count primes by residue mod 4")
    c.add_argument("--from", dest="lo", type=int, default=0)
    c.add_argument("--to", dest="hi", type=int, required=True)
    c.add_argument("--chunk", type=int, default=1 << 20)
    _add_output(c, "csv")

    g = sub.add_parser("progression", help="primes in 2*t*n + direction*offset")
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--offset", type=int, required=True)
    g.add_argument("--direction", type=int, choices=(1, -1), default=1)
    g.add_argument("--n-max", type=int, default=100)
    return parser


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out.write_bytes(data)


def _run_report(job: VerifyJob, args, resume: RangeReport | None = None) -> int:
    report = run_job(job, resume=resume, budget_seconds=getattr(args, "budget_seconds", None))
    if not report.complete:
        log.warning("budget exhausted after %d/%d chunks; resume with --resume",
                    len(report.per_chunk), report.total_chunks)
    _write(emit_report(report, args.format, timing=not args.no_timing), args.out)
    return EXIT_ANOMALY if report.anomaly_count else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify":
            resume = None
            if args.resume is not None:
                resume = RangeReport.from_dict(json.loads(args.resume.read_text()))
            job = VerifyJob(args.task, args.lo, args.hi, args.chunk, args.workers, args.t_max)
            return _run_report(job, args, resume)

        if args.command == "census":
            return _run_report(VerifyJob("census", args.lo, args.hi, args.chunk), args)

        if args.command == "witness":
            for line in show_witness(args.n, args.task, t=args.t):
                print(line)
            return EXIT_OK

        if args.command == "progression":
            spec = ProgressionSpec(args.t, args.offset, args.direction)
            rep = progression_primes(spec, args.n_max)
            if rep.degenerate:
                print(f"degenerate: gcd(2*{spec.t}, {spec.offset}) > 1")
            for n, value in rep.hits:
                print(f"n={n} value={value}")
            return EXIT_OK
    except CounterexampleCandidate as exc:
        print(json.dumps(exc.anomaly.to_dict(), indent=2))
        return EXIT_ANOMALY
    except (ValueError, RangeTooLarge, OSError) as exc:
        print(f"goldbach-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE
