"""Machine-readable verdicts shared by the verification pipelines."""

from __future__ import annotations

from dataclasses import dataclass, field

from .polygon import NewtonPolygon, rational_str

SCHEMA_VERSION = 1


@dataclass
class VerdictReport:
    kind: str
    params: dict
    hypothesis_holds: bool
    equal: bool | None
    computed: NewtonPolygon | None
    expected: NewtonPolygon | None
    diffs: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.equal) and all(v is not False for v in self.checks.values())

    def to_json(self, with_timing: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "params": self.params,
            "hypothesis_holds": self.hypothesis_holds,
            "equal": self.equal,
            "computed": self.computed.to_json() if self.computed else None,
            "expected": self.expected.to_json() if self.expected else None,
            "diffs": {str(k): rational_str(v) for k, v in self.diffs.items()},
            "checks": self.checks,
            "data": self.data,
            "notes": self.notes,
        }
        if with_timing:
            out["seconds"] = round(self.seconds, 3)
        return out
