"""Run reports for the verification commands: per-check verdicts with the
two compared values, rendered as a human table, deterministic JSON, or CSV.

JSON output is reproducible byte for byte from (command, seed): wall-clock
timings appear only on the human-readable path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA_VERSION = "v1"


def format_value(value) -> str:
    """Exact rationals as 'p' or 'p/q'; everything else via str/repr."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def json_value(value):
    """JSON-native passthrough; exact rationals become 'p/q' strings."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: json_value(v) for k, v in sorted(value.items())}
    return str(value)


@dataclass
class Check:
    name: str
    passed: bool
    lhs: str
    rhs: str
    detail: dict = field(default_factory=dict)

    @staticmethod
    def compare(name: str, lhs, rhs, detail: "dict | None" = None) -> "Check":
        return Check(name, lhs == rhs, format_value(lhs), format_value(rhs),
                     detail or {})


@dataclass
class RunReport:
    command: str
    parameters: dict
    seed: "int | None"
    checks: list[Check] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check):
        self.checks.append(check)

    # -- renderers -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "parameters": {k: json_value(v) for k, v in sorted(self.parameters.items())},
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "detail": {k: json_value(v) for k, v in sorted(c.detail.items())},
                }
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["name,passed,lhs,rhs"]
        for c in self.checks:
            lines.append(f"{_csv_cell(c.name)},{str(c.passed).lower()},"
                         f"{_csv_cell(c.lhs)},{_csv_cell(c.rhs)}")
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        header = f"command: {self.command}"
        if self.seed is not None:
            header += f"   seed: {self.seed}"
        if self.parameters:
            params = "  ".join(f"{k}={format_value(v)}"
                               for k, v in sorted(self.parameters.items()))
            header += f"\n{params}"
        rows = [("check", "lhs", "rhs", "status")]
        for c in self.checks:
            rows.append((c.name, c.lhs, c.rhs, "PASS" if c.passed else "FAIL"))
        widths = [max(len(r[k]) for r in rows) for k in range(4)]
        body = []
        for r in rows:
            body.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        n_pass = sum(1 for c in self.checks if c.passed)
        summary = f"{n_pass}/{len(self.checks)} checks passed"
        if "total" in self.timings:
            summary += f" in {self.timings['total']:.2f}s"
        return "\n".join([header, ""] + body + ["", summary]) + "\n"


def _csv_cell(text: str) -> str:
    if any(ch in text for ch in ",\"\n"):
        return '"' + text.replace('"', '""') + '"'
    return text
