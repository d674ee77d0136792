"""
SymmetricWeightMatrix data model
"""
from typing import Any, Dict, List, Sequence

from app.api.models.weight_matrix import WeightMatrix
from app.utils.errors import UsageError
from app.utils.exact_numerics import format_scalar, parse_scalar


class SymmetricWeightMatrix:
    """Upper triangle (with diagonal) of a symmetric n x n matrix, row-major"""

    def __init__(self, n: int, upper: Sequence[Any]):
        if n < 1 or len(upper) != n * (n + 1) // 2:
            raise UsageError(f"Symmetric matrix of size {n} needs {n * (n + 1) // 2} upper entries")
        self.n = n
        self.upper = tuple(upper)

    def _offset(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        # rows 1..i-1 hold n, n-1, ... entries
        return (i - 1) * self.n - (i - 1) * (i - 2) // 2 + (j - i)

    def __getitem__(self, index) -> Any:
        i, j = index
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise UsageError(f"Index ({i},{j}) outside symmetric matrix of size {self.n}")
        return self.upper[self._offset(i, j)]

    def to_full(self) -> WeightMatrix:
        return WeightMatrix([[self[i, j] for j in range(1, self.n + 1)] for i in range(1, self.n + 1)])

    @classmethod
    def from_full(cls, matrix: WeightMatrix) -> 'SymmetricWeightMatrix':
        if matrix.n != matrix.m:
            raise UsageError("Symmetric matrices are square")
        n = matrix.n
        return cls(n, [matrix[i, j] for i in range(1, n + 1) for j in range(i, n + 1)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetricWeightMatrix):
            return NotImplemented
        return self.n == other.n and self.upper == other.upper

    __hash__ = None

    def __repr__(self) -> str:
        return f"SymmetricWeightMatrix(n={self.n}, upper={list(self.upper)!r})"

    def flat(self) -> List[Any]:
        return list(self.upper)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {'n': self.n, 'upper': [format_scalar(x) for x in self.upper]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SymmetricWeightMatrix':
        """Create from dictionary"""
        try:
            return cls(int(data['n']), [parse_scalar(x) for x in data['upper']])
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise UsageError(f"Malformed symmetric matrix JSON: {e}")
