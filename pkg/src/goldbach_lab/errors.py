"""Exceptions and the structured anomaly record shared by every module."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Any


class RangeTooLarge(ValueError):
    """Requested sieve interval exceeds the configured segment budget."""


class InvalidInterval(ValueError):
    """Interval bounds are out of order or negative."""


class NotPrime(ValueError):
    """An operation that requires a prime was handed a composite."""


class FormNotPrime(ValueError):
    """One of the 4m+-1 forms handed to a constructor is composite.

    ``form`` names the offending expression (e.g. ``"4m+1"``) and
    ``value`` is the composite it evaluated to.
    """

    def __init__(self, form: str, value: int):
        super().__init__(f"{form} = {value} is not prime")
        self.form = form
        self.value = value


def _utcnow() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class Anomaly:
    """Machine-readable record of a search that should have succeeded but did not.

    ``kind`` is a short tag such as ``"goldbach-empty"`` or ``"t6-violation"``;
    ``inputs`` holds the offending arguments, ``scanned`` describes the search
    space that came back empty.
    """

    kind: str
    inputs: dict[str, Any]
    scanned: str
    detail: str = ""
    timestamp: str = field(default_factory=_utcnow)

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "kind": self.kind,
            "inputs": dict(self.inputs),
            "scanned": self.scanned,
            "detail": self.detail,
        }
        if timing:
            out["timestamp"] = self.timestamp
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Anomaly":
        return cls(
            kind=data["kind"],
            inputs=dict(data["inputs"]),
            scanned=data["scanned"],
            detail=data.get("detail", ""),
            timestamp=data.get("timestamp", ""),
        )


class CounterexampleCandidate(Exception):
    """Raised when a conjectured-nonempty search is empty.

    Never swallow this: the attached :class:`Anomaly` is the only evidence of
    a potential counterexample.
    """

    def __init__(self, anomaly: Anomaly):
        super().__init__(f"{anomaly.kind}: {anomaly.inputs} ({anomaly.scanned})")
        self.anomaly = anomaly
