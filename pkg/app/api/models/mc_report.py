"""
McReport data model
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

CSV_COLUMNS = ['probe', 'estimate', 'stderr', 'reference', 'z']


@dataclass
class McProbe:
    """One Monte Carlo estimator compared against a reference value"""
    probe: str
    estimate: float
    stderr: float
    reference: float
    z_threshold: float = 3.5

    @property
    def z(self) -> float:
        diff = self.estimate - self.reference
        if self.stderr > 0:
            return diff / self.stderr
        return 0.0 if abs(diff) <= 1e-12 * max(1.0, abs(self.reference)) else math.inf

    @property
    def passed(self) -> bool:
        return abs(self.z) <= self.z_threshold

    def to_dict(self) -> Dict[str, Any]:
        return {
            'probe': self.probe,
            'estimate': self.estimate,
            'stderr': self.stderr,
            'reference': self.reference,
            'z': self.z,
            'z_threshold': self.z_threshold,
            'passed': self.passed
        }


@dataclass
class KsResult:
    """Kolmogorov-Smirnov comparison"""
    name: str
    statistic: float
    pvalue: Optional[float]
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'statistic': self.statistic, 'pvalue': self.pvalue, 'passed': self.passed}


class McReport:
    """Monte Carlo experiment report, reproducible from (seed, samples)"""

    def __init__(self, experiment: str = "", seed: int = 0, samples: int = 0,
                 probes: List[McProbe] = None, ks: List[KsResult] = None, params: Dict[str, Any] = None):
        self.experiment = experiment
        self.seed = seed
        self.samples = samples
        self.probes = probes if probes is not None else []
        self.ks = ks if ks is not None else []
        self.params = params if params is not None else {}

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.probes) and all(k.passed for k in self.ks)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'experiment': self.experiment,
            'seed': self.seed,
            'samples': self.samples,
            'params': self.params,
            'passed': self.passed,
            'probes': [p.to_dict() for p in self.probes],
            'ks': [k.to_dict() for k in self.ks]
        }

    def csv_rows(self) -> List[List[Any]]:
        rows = [[p.probe, p.estimate, p.stderr, p.reference, p.z] for p in self.probes]
        rows.extend([f"ks:{k.name}", k.statistic, "", k.pvalue if k.pvalue is not None else "", ""] for k in self.ks)
        return rows

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'McReport':
        """Create from dictionary"""
        probes = [McProbe(probe=p['probe'], estimate=p['estimate'], stderr=p['stderr'], reference=p['reference'],
                          z_threshold=p.get('z_threshold', 3.5))
                  for p in data.get('probes', [])]
        ks = [KsResult(name=k['name'], statistic=k['statistic'], pvalue=k.get('pvalue'), passed=k['passed'])
              for k in data.get('ks', [])]
        return cls(experiment=data.get('experiment', ''), seed=data.get('seed', 0),
                   samples=data.get('samples', 0), probes=probes, ks=ks, params=data.get('params', {}))
