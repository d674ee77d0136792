"""
Pattern and PatternPair data models
"""
from typing import Any, Dict, List, Sequence

from app.utils.errors import UsageError
from app.utils.exact_numerics import format_scalar, parse_scalar


class Pattern:
    """Trapezoidal array z_ij on L(n, h) = {1 <= i <= h, 1 <= j <= min(i, n)}"""

    def __init__(self, rows: Sequence[Sequence[Any]], width: int = None):
        rows = tuple(tuple(r) for r in rows)
        if not rows:
            raise UsageError("Pattern needs at least one row")
        self.height = len(rows)
        self.width = width if width is not None else len(rows[-1])
        if self.width > self.height or self.width < 1:
            raise UsageError(f"Pattern width {self.width} must lie in 1..{self.height}")
        for i, row in enumerate(rows, start=1):
            if len(row) != min(i, self.width):
                raise UsageError(f"Pattern row {i} must have {min(i, self.width)} entries")
        self.rows = rows

    def __getitem__(self, index) -> Any:
        i, j = index
        return self.rows[i - 1][j - 1]

    def get(self, i: int, j: int, default: Any = 0) -> Any:
        """z_ij, or ``default`` outside the index set"""
        if 1 <= i <= self.height and 1 <= j <= min(i, self.width):
            return self.rows[i - 1][j - 1]
        return default

    def indices(self):
        for i in range(1, self.height + 1):
            for j in range(1, min(i, self.width) + 1):
                yield i, j

    @property
    def shape(self) -> tuple:
        return self.rows[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.width == other.width and self.rows == other.rows

    __hash__ = None

    def __repr__(self) -> str:
        return f"Pattern(height={self.height}, width={self.width}, rows={[list(r) for r in self.rows]!r})"

    def to_lists(self) -> List[List[Any]]:
        return [list(r) for r in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'height': self.height,
            'width': self.width,
            'rows': [[format_scalar(x) for x in row] for row in self.rows]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Pattern':
        """Create from dictionary"""
        try:
            rows = [[parse_scalar(x) for x in row] for row in data.get('rows', [])]
            return cls(rows, width=data.get('width'))
        except (AttributeError, TypeError, KeyError) as e:
            raise UsageError(f"Malformed pattern JSON: {e}")


class PatternPair:
    """(P, Q) identified with an output matrix; both share the shape vector"""

    def __init__(self, P: Pattern, Q: Pattern):
        self.P = P
        self.Q = Q

    @property
    def shape(self) -> tuple:
        return self.P.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, PatternPair):
            return NotImplemented
        return self.P == other.P and self.Q == other.Q

    __hash__ = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {'P': self.P.to_dict(), 'Q': self.Q.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PatternPair':
        """Create from dictionary"""
        try:
            P, Q = data['P'], data['Q']
        except (TypeError, KeyError) as e:
            raise UsageError(f"Pattern pair JSON needs P and Q: {e}")
        return cls(Pattern.from_dict(P), Pattern.from_dict(Q))
