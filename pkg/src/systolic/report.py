"""Structured pass/fail/skip outcomes with re-checkable witnesses."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


@dataclass
class CheckReport:
    """Outcome of one check.

    A failing report always carries a witness. Bundles hold sub-reports in
    ``details`` and fail as soon as one child fails; a bundle whose children
    were all skipped is itself skipped.
    """

    name: str
    status: str
    witness: Any = None
    stats: dict = field(default_factory=dict)
    details: list[CheckReport] = field(default_factory=list)

    def __post_init__(self):
        if self.status not in (PASS, FAIL, SKIP):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError(f"failing report {self.name!r} needs a witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    @property
    def skipped(self) -> bool:
        return self.status == SKIP

    @classmethod
    def ok(cls, name, **stats):
        return cls(name, PASS, stats=stats)

    @classmethod
    def fail(cls, name, witness, **stats):
        return cls(name, FAIL, witness=witness, stats=stats)

    @classmethod
    def skip(cls, name, reason, **stats):
        return cls(name, SKIP, stats={"reason": reason, **stats})

    @classmethod
    def bundle(cls, name, details, **stats):
        details = list(details)
        failed = [d.name for d in details if d.failed]
        if failed:
            return cls(name, FAIL, witness={"failed": failed}, stats=stats, details=details)
        if details and all(d.skipped for d in details):
            return cls(name, SKIP, stats=stats, details=details)
        return cls(name, PASS, stats=stats, details=details)

    def iter_reports(self):
        yield self
        for d in self.details:
            yield from d.iter_reports()

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "passed": self.passed,
            "witness": jsonable(self.witness),
            "stats": jsonable(self.stats),
        }
        if self.details:
            out["details"] = [d.to_dict() for d in self.details]
        return out

    def summary_line(self) -> str:
        return f"[{self.status.upper():4}] {self.name}"


def jsonable(obj):
    """Convert tuples, sets, fractions and reports into JSON-ready values."""
    if isinstance(obj, CheckReport):
        return obj.to_dict()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, str) else k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        items = [jsonable(x) for x in obj]
        try:
            return sorted(items)
        except TypeError:
            return sorted(items, key=repr)
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    return obj
