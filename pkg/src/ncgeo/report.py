"""Pass/fail reporting for condition checkers."""
from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["CheckEntry", "CheckReport"]

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass
class CheckEntry:
    condition_id: str
    status: str
    residual: float
    tolerance: float
    details: str = ""

    def as_dict(self):
        return {
            "condition_id": self.condition_id,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "details": self.details,
        }


@dataclass
class CheckReport:
    entries: list = field(default_factory=list)

    def add(self, condition_id: str, residual: float, tolerance: float, details: str = ""):
        status = PASS if residual <= tolerance else FAIL
        entry = CheckEntry(condition_id, status, float(residual), float(tolerance), details)
        self.entries.append(entry)
        return entry

    def skip(self, condition_id: str, details: str = ""):
        entry = CheckEntry(condition_id, SKIPPED, 0.0, 0.0, details)
        self.entries.append(entry)
        return entry

    def extend(self, other: "CheckReport", prefix: str = ""):
        for e in other.entries:
            cid = f"{prefix}{e.condition_id}" if prefix else e.condition_id
            self.entries.append(CheckEntry(cid, e.status, e.residual, e.tolerance, e.details))
        return self

    def entry(self, condition_id: str) -> CheckEntry:
        for e in self.entries:
            if e.condition_id == condition_id:
                return e
        raise KeyError(condition_id)

    @property
    def passed(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def failures(self):
        return [e for e in self.entries if e.status == FAIL]

    def as_dict(self):
        return {"passed": self.passed, "entries": [e.as_dict() for e in self.entries]}

    def as_text(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(
                f"[{e.status.upper():7s}] {e.condition_id}: residual={e.residual:.3e} "
                f"tol={e.tolerance:.3e}" + (f"  ({e.details})" if e.details else "")
            )
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)
