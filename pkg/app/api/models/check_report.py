"""
CheckReport data model
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np


def _plain(value: Any) -> Any:
    """numpy scalars and arrays inside check details become plain Python values"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class CheckResult:
    """Outcome of one named verification check"""
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'passed': bool(self.passed), 'detail': _plain(self.detail)}


class CheckReport:
    """Verification suite report"""

    def __init__(self, suite: str = "", seed: int = 0, trials: int = 0, checks: List[CheckResult] = None):
        self.suite = suite
        self.seed = seed
        self.trials = trials
        self.checks = checks if checks is not None else []

    def add(self, name: str, passed: bool, **detail: Any) -> CheckResult:
        result = CheckResult(name=name, passed=bool(passed), detail=detail)
        self.checks.append(result)
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary_lines(self) -> List[str]:
        lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" for c in self.checks]
        failed = sum(not c.passed for c in self.checks)
        lines.append(f"suite={self.suite} checks={len(self.checks)} failed={failed} seed={self.seed}")
        return lines

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'suite': self.suite,
            'seed': self.seed,
            'trials': self.trials,
            'passed': self.passed,
            'checks': [c.to_dict() for c in self.checks]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CheckReport':
        """Create from dictionary"""
        checks = [CheckResult(name=c.get('name', ''), passed=c.get('passed', False), detail=c.get('detail', {}))
                  for c in data.get('checks', [])]
        return cls(suite=data.get('suite', ''), seed=data.get('seed', 0),
                   trials=data.get('trials', 0), checks=checks)
