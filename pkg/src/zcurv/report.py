from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
ERROR = "error"


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``residuals`` and ``multipliers`` hold printed expressions keyed by a
    label; ``metrics`` holds floats. Dict order is insertion order and is
    preserved in every rendering, so output is deterministic.
    """

    task: str
    kind: str
    status: str = PASS
    residuals: dict = field(default_factory=dict)
    multipliers: dict = field(default_factory=dict)
    extracted: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def fail(self, note: str | None = None):
        self.status = FAIL
        if note:
            self.notes.append(note)

    def error(self, note: str):
        self.status = ERROR
        self.notes.append(note)

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "task": self.task,
            "kind": self.kind,
            "status": self.status,
            "residuals": dict(self.residuals),
            "multipliers": dict(self.multipliers),
            "extracted": dict(self.extracted),
            "metrics": {k: _json_float(v) for k, v in self.metrics.items()},
            "notes": list(self.notes),
        }
        if timing and self.wall_time is not None:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=False)

    def summary(self) -> str:
        bits = [f"[{self.status.upper():5}] {self.task} ({self.kind})"]
        for k, v in self.extracted.items():
            bits.append(f"    extracted {k}: {v}")
        for k, v in self.multipliers.items():
            bits.append(f"    multiplier {k}: {v}")
        for k, v in self.residuals.items():
            bits.append(f"    residual {k}: {v}")
        for k, v in self.metrics.items():
            bits.append(f"    {k}: {_fmt_metric(v)}")
        for n in self.notes:
            bits.append(f"    note: {n}")
        return "\n".join(bits)


def _json_float(v):
    if isinstance(v, float):
        return float(f"{v:.12g}")
    return v


def _fmt_metric(v):
    if isinstance(v, float):
        return f"{v:.6e}"
    return str(v)
