"""
Verdict records and the JSON run report.

IdentityReport is the result of checking one identity at one index tuple.
RunReport collects them with a config echo and summary counts; ReportStore
writes it atomically.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .debuglog import DebugLog
from .errors import SKIPPABLE, WorkbenchError
from .exactnum import Scalar
from .operators import GradedOperator, first_difference
from .superspace import SuperElement

SCHEMA_VERSION = 1
PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    deformation: str
    indices: Tuple[Any, ...]
    window: Dict[str, Any]
    verdict: str
    reason: str = ""
    counterexample: Optional[Dict[str, Any]] = None
    conventions: Tuple[str, ...] = ()
    must_pass: bool = False

    def __post_init__(self) -> None:
        if self.verdict == FAIL and self.counterexample is None:
            raise ValueError(f"{self.identity_id}{list(self.indices)}: a failing verdict needs a counterexample")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def sort_key(self) -> Tuple[str, Tuple[Tuple[int, Any], ...]]:
        """Identity id, then indices with ints in numeric order ahead of labels."""
        return self.identity_id, tuple(_index_key(v) for v in self.indices)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "deformation": self.deformation,
            "indices": _jsonable(self.indices),
            "window": self.window,
            "verdict": self.verdict,
            "reason": self.reason,
            "counterexample": self.counterexample,
            "conventions": list(self.conventions),
            "must_pass": self.must_pass,
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Scalar):
        return value.render()
    return value


def _index_key(value: Any) -> Tuple[int, Any]:
    if isinstance(value, int) and not isinstance(value, bool):
        return 0, value
    return 1, str(_jsonable(value))


@dataclass(frozen=True)
class Cell:
    """Common fields of every verdict produced by one suite cell."""

    identity_id: str
    deformation: str
    indices: Tuple[Any, ...]
    window: Dict[str, Any] = field(default_factory=dict)
    conventions: Tuple[str, ...] = ()
    must_pass: bool = False

    def report(self, verdict: str, reason: str = "", counterexample: Optional[Dict[str, Any]] = None) -> IdentityReport:
        return IdentityReport(
            self.identity_id,
            self.deformation,
            self.indices,
            self.window,
            verdict,
            reason,
            counterexample,
            self.conventions,
            self.must_pass,
        )

    def passed(self, reason: str = "") -> IdentityReport:
        return self.report(PASS, reason)

    def failed(self, counterexample: Dict[str, Any], reason: str = "") -> IdentityReport:
        counterexample = dict(counterexample)
        counterexample.setdefault("indices", _jsonable(self.indices))
        return self.report(FAIL, reason, counterexample)

    def skipped(self, reason: str) -> IdentityReport:
        return self.report(SKIPPED, reason)

    def compare_operators(self, lhs: GradedOperator, rhs: GradedOperator, w: int) -> IdentityReport:
        difference = first_difference(lhs, rhs, w)
        if difference is None:
            return self.passed()
        n, odd, left, right = difference
        return self.failed(
            {
                "basis": f"theta*t^{n}" if odd else f"t^{n}",
                "lhs": left.render(),
                "rhs": right.render(),
                "difference": (left - right).render(),
            }
        )

    def compare_scalars(self, lhs: Scalar, rhs: Scalar, label: str = "value") -> IdentityReport:
        if lhs == rhs:
            return self.passed()
        return self.failed({"quantity": label, "lhs": lhs.render(), "rhs": rhs.render(),
                            "difference": (lhs - rhs).render()})

    def compare_elements(self, lhs: SuperElement, rhs: SuperElement, label: str) -> IdentityReport:
        if lhs == rhs:
            return self.passed()
        return self.failed({"quantity": label, "lhs": lhs.render(), "rhs": rhs.render(),
                            "difference": (lhs - rhs).render()})

    def check(self, condition: bool, detail: Dict[str, Any]) -> IdentityReport:
        return self.passed() if condition else self.failed(detail)

    def guard(self, compute: Callable[[], IdentityReport]) -> IdentityReport:
        """Evaluate ``compute``; degenerate inputs become a skipped verdict."""
        try:
            return compute()
        except SKIPPABLE as e:
            return self.skipped(f"{type(e).__name__}: {e}")


def summarize(reports: Sequence[IdentityReport]) -> Dict[str, int]:
    summary = {PASS: 0, FAIL: 0, SKIPPED: 0, "must_pass_failures": 0}
    for r in reports:
        summary[r.verdict] += 1
        if r.must_pass and r.verdict == FAIL:
            summary["must_pass_failures"] += 1
    return summary


@dataclass(frozen=True)
class RunReport:
    tool_version: str
    config: Dict[str, Any]
    reports: Tuple[IdentityReport, ...]
    wall_time_seconds: float = 0.0
    schema_version: int = SCHEMA_VERSION

    @property
    def summary(self) -> Dict[str, int]:
        return summarize(self.reports)

    @property
    def must_pass_failed(self) -> bool:
        return self.summary["must_pass_failures"] > 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "config": self.config,
            "summary": self.summary,
            "reports": [r.to_dict() for r in self.reports],
            "wall_time_seconds": round(self.wall_time_seconds, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


class ReportStore:
    def __init__(self, debug: DebugLog):
        self.debug = debug

    def save(self, path: str, report: RunReport) -> None:
        directory = os.path.dirname(path) or "."
        if not os.path.isdir(directory):
            raise WorkbenchError(f"Cannot write report {path}: directory {directory} does not exist")

        tmp_path = path + ".tmp"
        try:
            with open(tmp_path, "w", encoding="utf-8") as f:
                f.write(report.to_json())
            os.replace(tmp_path, path)
            self.debug.emit(f"report: wrote {path} ({len(report.reports)} verdicts)")
        except OSError as e:
            self.debug.emit(f"report: failed to write {path}: {e}")
            if os.path.exists(tmp_path):
                try:
                    os.remove(tmp_path)
                except OSError:
                    pass
            raise WorkbenchError(f"Cannot write report {path}: {e}. Check permissions.")

    def load(self, path: str) -> Dict[str, Any]:
        with open(path, "r", encoding="utf-8") as f:
            data: Dict[str, Any] = json.load(f)
        return data


def strip_wall_time(document: Dict[str, Any]) -> Dict[str, Any]:
    """Copy of a report document without its only nondeterministic field."""
    return {k: v for k, v in document.items() if k != "wall_time_seconds"}


def report_lines(reports: List[IdentityReport]) -> List[str]:
    lines = []
    for r in reports:
        mark = {PASS: "ok  ", FAIL: "FAIL", SKIPPED: "skip"}[r.verdict]
        tag = " [must-pass]" if r.must_pass else ""
        lines.append(f"{mark} {r.identity_id} {list(_jsonable(r.indices))}{tag}")
    return lines
