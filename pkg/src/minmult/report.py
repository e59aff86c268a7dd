"""Structured reports.  Every number is stored as a string so that the JSON is exact."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Dict

import numpy as np


def exact(x: Any) -> Any:
    """Convert a result tree into JSON-safe values with numbers as strings."""
    if isinstance(x, dict):
        return {str(k): exact(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [exact(v) for v in x]
    if isinstance(x, np.ndarray):
        return [exact(v) for v in x.tolist()]
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (int, np.integer, Fraction)):
        return str(x)
    if isinstance(x, float):
        raise TypeError("floating point values are not allowed in reports")
    if hasattr(x, "as_dict"):
        return exact(x.as_dict())
    return str(x)


@dataclass
class ReportDocument:
    command: str
    inputs_fingerprint: str
    results: Dict[str, Any] = dc_field(default_factory=dict)
    bounds: Dict[str, Any] = dc_field(default_factory=dict)
    timing: Dict[str, Any] = dc_field(default_factory=dict)
    ok: bool = True

    def __post_init__(self):
        self.results = exact(self.results)
        self.bounds = exact(self.bounds)
        self.timing = exact(self.timing)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs_fingerprint": self.inputs_fingerprint,
            "ok": self.ok,
            "bounds": self.bounds,
            "results": self.results,
            "timing": self.timing,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ReportDocument":
        return cls(d["command"], d["inputs_fingerprint"], d.get("results", {}), d.get("bounds", {}),
                   d.get("timing", {}), bool(d.get("ok", True)))

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))


def render_human(doc: ReportDocument) -> str:
    lines = [f"{doc.command}: {'ok' if doc.ok else 'FAILED'}"]
    if doc.bounds:
        lines.append("  bounds: " + ", ".join(f"{k}={v}" for k, v in sorted(doc.bounds.items())))
    _render(doc.results, lines, "  ")
    return "\n".join(lines)


def _render(x, lines, indent):
    for k, v in x.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            _render(v, lines, indent + "  ")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{indent}{k}:")
            for item in v:
                lines.append(f"{indent}  - " + ", ".join(f"{a}={_flat(b)}" for a, b in item.items()))
        else:
            lines.append(f"{indent}{k}: {_flat(v)}")


def _flat(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{a}: {_flat(b)}" for a, b in v.items()) + "}"
    return str(v)
