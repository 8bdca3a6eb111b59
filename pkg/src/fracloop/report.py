"""Machine-readable verification reports.

A report is a flat list of checks, each carrying a stable id, a short
anchor string naming the identity it verifies, the measured residual,
the tolerance, and the pass flag.  Report bodies are deterministic:
checks are ordered by id, floats are serialized with repr, and wall
times are kept out of the serialized body so that identical seed and
configuration produce bit-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

SCHEMA_VERSION = "1"


def inputs_digest(*parts) -> str:
    """Stable digest of the inputs that produced a check, for replay."""
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


@dataclass
class CheckResult:
    id: str
    anchor: str
    residual: float
    tol: float
    passed: bool
    digest: str = ""
    wall_time: float = 0.0  # excluded from serialized bodies

    def row(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "residual": repr(float(self.residual)),
            "tol": repr(float(self.tol)),
            "pass": self.passed,
            "digest": self.digest,
        }


@dataclass
class VerificationReport:
    suite: str
    config: Dict
    checks: List[CheckResult] = field(default_factory=list)
    recorded: Dict = field(default_factory=dict)

    def add(self, check: CheckResult):
        self.checks.append(check)

    def check(self, id: str, anchor: str, residual: float, tol: float,
              digest: str = "", wall_time: float = 0.0) -> CheckResult:
        c = CheckResult(id=id, anchor=anchor, residual=float(residual),
                        tol=float(tol), passed=bool(residual < tol),
                        digest=digest, wall_time=wall_time)
        self.add(c)
        return c

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        failed = sorted(c.id for c in self.checks if not c.passed)
        return {
            "total": len(self.checks),
            "passed": sum(1 for c in self.checks if c.passed),
            "failed": failed,
            "recorded": _stable(self.recorded),
        }

    def body(self) -> dict:
        """Deterministic report body (no wall times, checks sorted by id)."""
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "config": _stable(self.config),
            "checks": [c.row() for c in
                       sorted(self.checks, key=lambda c: c.id)],
            "summary": self.summary(),
        }

    # -- serialization -----------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(self.body(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "id", "anchor", "residual", "tol", "pass",
                    "digest"])
        for c in sorted(self.checks, key=lambda c: c.id):
            r = c.row()
            w.writerow([self.suite, r["id"], r["anchor"], r["residual"],
                        r["tol"], r["pass"], r["digest"]])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}"]
        for c in sorted(self.checks, key=lambda c: c.id):
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.id:40s} residual {c.residual:.3e}"
                         f"  tol {c.tol:.1e}")
            if not c.passed:
                lines.append(f"         replay digest {c.digest}")
        s = self.summary()
        lines.append(f"{s['passed']}/{s['total']} checks passed")
        for key, val in sorted(self.recorded.items()):
            lines.append(f"  recorded {key} = {val}")
        return "\n".join(lines) + "\n"

    def emit(self, fmt: str = "json", path: Optional[str] = None) -> str:
        if fmt == "json":
            out = self.to_json()
        elif fmt == "csv":
            out = self.to_csv()
        elif fmt == "text":
            out = self.to_text()
        else:
            raise ValueError(f"unknown report format {fmt!r}")
        if path:
            with open(path, "w") as fh:
                fh.write(out)
        return out


def _stable(obj):
    """Recursively convert config values to JSON-stable primitives."""
    if isinstance(obj, dict):
        return {str(k): _stable(v) for k, v in sorted(obj.items(),
                                                      key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_stable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": repr(obj.real), "im": repr(obj.imag)}
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return repr(obj)
