"""Verification suites run by the orchestrator.

Each suite module exposes ``run(config, out_dir, settings) -> SuiteResult``.
"""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.value) and self.value <= self.tolerance

    def as_dict(self) -> dict:
        return {"value": self.value, "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class SuiteResult:
    checks: dict[str, Check] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)

    def check(self, name: str, value: float, tolerance: float) -> Check:
        result = Check(float(value), float(tolerance))
        self.checks[name] = result
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> list[str]:
        return sorted(name for name, c in self.checks.items() if not c.passed)
