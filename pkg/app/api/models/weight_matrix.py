"""
WeightMatrix data model
"""
from typing import Any, Callable, Dict, List, Sequence

from app.utils.errors import DomainError, UsageError
from app.utils.exact_numerics import format_scalar, is_positive, parse_scalar


class WeightMatrix:
    """n x m grid of scalars with 1-based (i, j) access, immutable"""

    def __init__(self, entries: Sequence[Sequence[Any]]):
        rows = tuple(tuple(row) for row in entries)
        if not rows or not rows[0]:
            raise UsageError("WeightMatrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise UsageError("WeightMatrix rows must have equal length")
        self.entries = rows

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    @property
    def p(self) -> int:
        return min(self.n, self.m)

    def __getitem__(self, index) -> Any:
        i, j = index
        if not (1 <= i <= self.n and 1 <= j <= self.m):
            raise UsageError(f"Index ({i},{j}) outside {self.n}x{self.m} matrix")
        return self.entries[i - 1][j - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def __repr__(self) -> str:
        return f"WeightMatrix({[list(r) for r in self.entries]!r})"

    def to_lists(self) -> List[List[Any]]:
        """Mutable row-major copy"""
        return [list(row) for row in self.entries]

    def flat(self) -> List[Any]:
        return [x for row in self.entries for x in row]

    @classmethod
    def from_flat(cls, values: Sequence[Any], n: int, m: int) -> 'WeightMatrix':
        if len(values) != n * m:
            raise UsageError(f"Expected {n * m} values, got {len(values)}")
        return cls([values[i * m:(i + 1) * m] for i in range(n)])

    def transpose(self) -> 'WeightMatrix':
        return WeightMatrix(list(zip(*self.entries)))

    def map(self, fn: Callable[[Any], Any]) -> 'WeightMatrix':
        return WeightMatrix([[fn(x) for x in row] for row in self.entries])

    def is_symmetric(self) -> bool:
        return self.n == self.m and all(
            self.entries[i][j] == self.entries[j][i] for i in range(self.n) for j in range(i)
        )

    def validate_positive(self) -> 'WeightMatrix':
        for i, row in enumerate(self.entries, start=1):
            for j, x in enumerate(row, start=1):
                if not is_positive(x):
                    raise DomainError(f"Entry ({i},{j}) must be strictly positive")
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'rows': self.n,
            'cols': self.m,
            'entries': [[format_scalar(x) for x in row] for row in self.entries]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'WeightMatrix':
        """Create from dictionary"""
        try:
            entries = [[parse_scalar(x) for x in row] for row in data['entries']]
        except (KeyError, TypeError) as e:
            raise UsageError(f"Malformed matrix JSON: {e}")
        matrix = cls(entries)
        if data.get('rows', matrix.n) != matrix.n or data.get('cols', matrix.m) != matrix.m:
            raise UsageError("Declared rows/cols disagree with entries")
        return matrix
