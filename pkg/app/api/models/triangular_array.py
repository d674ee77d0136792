"""
TriangularArray data model
"""
from typing import Any, Dict, List, Optional, Sequence

from app.utils.errors import DomainError, UsageError
from app.utils.exact_numerics import format_scalar, is_positive, parse_scalar


class TriangularArray:
    """Strictly lower-triangular array x_ij, 1 <= j < i <= n"""

    def __init__(self, rows: Sequence[Sequence[Any]]):
        rows = tuple(tuple(r) for r in rows)
        for k, row in enumerate(rows):
            # row k holds x_{k+2, 1..k+1}
            if len(row) != k + 1:
                raise UsageError(f"Row {k + 2} of a triangular array needs {k + 1} entries")
        self.n = len(rows) + 1
        if self.n < 2:
            raise UsageError("Triangular arrays need n >= 2")
        self.rows = rows

    def __getitem__(self, index) -> Any:
        i, j = index
        if not (1 <= j < i <= self.n):
            raise UsageError(f"Index ({i},{j}) is not strictly below the diagonal")
        return self.rows[i - 2][j - 1]

    def indices(self):
        for i in range(2, self.n + 1):
            for j in range(1, i):
                yield i, j

    def to_grid(self) -> List[List[Optional[Any]]]:
        """n x n 0-based grid with None on and above the diagonal"""
        grid = [[None] * self.n for _ in range(self.n)]
        for i, j in self.indices():
            grid[i - 1][j - 1] = self[i, j]
        return grid

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[Any]]) -> 'TriangularArray':
        n = len(grid)
        return cls([[grid[i][j] for j in range(i)] for i in range(1, n)])

    def flat(self) -> List[Any]:
        return [x for row in self.rows for x in row]

    @classmethod
    def from_flat(cls, values: Sequence[Any], n: int) -> 'TriangularArray':
        if len(values) != n * (n - 1) // 2:
            raise UsageError(f"Expected {n * (n - 1) // 2} values for n={n}")
        rows, k = [], 0
        for i in range(2, n + 1):
            rows.append(values[k:k + i - 1])
            k += i - 1
        return cls(rows)

    def validate_positive(self) -> 'TriangularArray':
        for i, j in self.indices():
            if not is_positive(self[i, j]):
                raise DomainError(f"Entry ({i},{j}) must be strictly positive")
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriangularArray):
            return NotImplemented
        return self.rows == other.rows

    __hash__ = None

    def __repr__(self) -> str:
        return f"TriangularArray({[list(r) for r in self.rows]!r})"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {'n': self.n, 'rows': [[format_scalar(x) for x in row] for row in self.rows]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TriangularArray':
        """Create from dictionary"""
        try:
            array = cls([[parse_scalar(x) for x in row] for row in data['rows']])
        except (KeyError, TypeError) as e:
            raise UsageError(f"Malformed triangular JSON: {e}")
        if data.get('n', array.n) != array.n:
            raise UsageError("Declared n disagrees with rows")
        return array
