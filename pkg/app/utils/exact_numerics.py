"""
Scalar arithmetic shared by every birational map in the package.

The maps only ever combine entries with ``+``, ``*`` and ``/`` (plus integer
literals), so the same code runs over:

* ``Fraction``      exact positive rationals (``PosRational``)
* ``DualRational``  exact forward-mode derivatives, used for Jacobians
* ``float``         plain IEEE doubles, or numpy arrays of them for batches
* ``LogFloat``      positive floats stored by their logarithm
"""
import math
from fractions import Fraction
from typing import Any, List, Sequence, Tuple, Union

import numpy as np

from app.utils.errors import DomainError, UsageError

PosRational = Fraction
RationalLike = Union[int, str, Fraction]


def pos_rational(value: RationalLike) -> Fraction:
    """Convert to an exact rational and insist on strict positivity"""
    q = parse_rational(value)
    if q <= 0:
        raise DomainError(f"Expected a positive rational, got {format_rational(q)}")
    return q


def parse_rational(value: RationalLike) -> Fraction:
    """Parse "p/q", "p", a decimal string or an int into a reduced Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise DomainError(f"Refusing to read {value!r} as an exact rational")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Cannot parse rational from {value!r}: {e}")


def format_rational(q: Fraction) -> str:
    """Lowest-terms "p/q", or "p" when the denominator is 1"""
    return str(Fraction(q))


def format_scalar(x: Any) -> str:
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return format_rational(Fraction(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, DualRational):
        return format_rational(x.value)
    raise UsageError(f"Cannot serialise scalar of type {type(x).__name__}")


def parse_scalar(value: Any) -> Union[Fraction, float]:
    """JSON strings and ints become exact rationals, JSON floats stay floats"""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"Entries must be finite, got {value!r}")
        return value
    return parse_rational(value)


def to_float(x: Any) -> float:
    if isinstance(x, DualRational):
        return float(x.value)
    if isinstance(x, LogFloat):
        return float(np.exp(x.log))
    return float(x)


def is_positive(x: Any) -> bool:
    if isinstance(x, LogFloat):
        return True
    if isinstance(x, DualRational):
        return x.value > 0
    if isinstance(x, np.ndarray):
        return bool(np.all(x > 0))
    return x > 0


def relative_error(exact: Any, approx: Any) -> float:
    e, a = to_float(exact), to_float(approx)
    if e == 0.0:
        return abs(a)
    return abs(a - e) / abs(e)


class DualRational:
    """Rational value together with its exact gradient row"""

    __slots__ = ("value", "partials")

    def __init__(self, value: RationalLike, partials: Sequence[RationalLike]):
        self.value = parse_rational(value)
        self.partials = tuple(parse_rational(p) for p in partials)

    @classmethod
    def _make(cls, value: Fraction, partials: Tuple[Fraction, ...]) -> "DualRational":
        obj = cls.__new__(cls)
        obj.value = value
        obj.partials = partials
        return obj

    @staticmethod
    def _is_const(other: Any) -> bool:
        return isinstance(other, (int, Fraction)) and not isinstance(other, bool)

    def _check_width(self, other: "DualRational") -> None:
        if len(other.partials) != len(self.partials):
            raise UsageError("Dual numbers seeded with different dimensions")

    def __add__(self, other):
        if isinstance(other, DualRational):
            self._check_width(other)
            return DualRational._make(self.value + other.value,
                                      tuple(p + q for p, q in zip(self.partials, other.partials)))
        if self._is_const(other):
            return DualRational._make(self.value + other, self.partials)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return DualRational._make(-self.value, tuple(-p for p in self.partials))

    def __sub__(self, other):
        if isinstance(other, DualRational) or self._is_const(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if self._is_const(other):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, DualRational):
            self._check_width(other)
            u, v = self.value, other.value
            return DualRational._make(u * v,
                                      tuple(u * q + v * p for p, q in zip(self.partials, other.partials)))
        if self._is_const(other):
            return DualRational._make(self.value * other, tuple(p * other for p in self.partials))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualRational):
            self._check_width(other)
            w = other.value
            r = self.value / w
            return DualRational._make(r, tuple((p - r * q) / w for p, q in zip(self.partials, other.partials)))
        if self._is_const(other):
            c = Fraction(other)
            return DualRational._make(self.value / c, tuple(p / c for p in self.partials))
        return NotImplemented

    def __rtruediv__(self, other):
        if self._is_const(other):
            r = Fraction(other) / self.value
            k = -r / self.value
            return DualRational._make(r, tuple(k * p for p in self.partials))
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        if k == 0:
            return DualRational._make(Fraction(1), tuple(Fraction(0) for _ in self.partials))
        coef = k * self.value ** (k - 1)
        return DualRational._make(self.value ** k, tuple(coef * p for p in self.partials))

    def __eq__(self, other):
        if isinstance(other, DualRational):
            return self.value == other.value and self.partials == other.partials
        if self._is_const(other):
            return self.value == other and not any(self.partials)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.partials))

    def __lt__(self, other):
        return self.value < _value_of(other)

    def __le__(self, other):
        return self.value <= _value_of(other)

    def __gt__(self, other):
        return self.value > _value_of(other)

    def __ge__(self, other):
        return self.value >= _value_of(other)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        parts = ", ".join(format_rational(p) for p in self.partials)
        return f"DualRational({format_rational(self.value)}, ({parts}))"


def _value_of(x: Any) -> Fraction:
    return x.value if isinstance(x, DualRational) else x


class LogFloat:
    """Positive float held as its natural logarithm; ``+`` is log-sum-exp"""

    __slots__ = ("log",)

    def __init__(self, log: Any):
        self.log = log

    @classmethod
    def from_value(cls, x: Any) -> "LogFloat":
        return cls(np.log(x))

    def _log_of(self, other):
        if isinstance(other, LogFloat):
            return other.log
        if isinstance(other, (int, float, Fraction, np.floating)):
            return math.log(other)
        return None

    def __mul__(self, other):
        lo = self._log_of(other)
        return NotImplemented if lo is None else LogFloat(self.log + lo)

    __rmul__ = __mul__

    def __truediv__(self, other):
        lo = self._log_of(other)
        return NotImplemented if lo is None else LogFloat(self.log - lo)

    def __rtruediv__(self, other):
        lo = self._log_of(other)
        return NotImplemented if lo is None else LogFloat(lo - self.log)

    def __add__(self, other):
        lo = self._log_of(other)
        return NotImplemented if lo is None else LogFloat(np.logaddexp(self.log, lo))

    __radd__ = __add__

    def __repr__(self):
        return f"LogFloat(log={self.log!r})"


def dual_seed(values: Sequence[RationalLike]) -> List[DualRational]:
    """Seed coordinate k with the unit gradient e_k"""
    exact = [pos_rational(v) for v in values]
    width = len(exact)
    zero, one = Fraction(0), Fraction(1)
    return [
        DualRational._make(v, tuple(one if b == k else zero for b in range(width)))
        for k, v in enumerate(exact)
    ]


def det_exact(matrix: Sequence[Sequence[RationalLike]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination with row pivoting"""
    a = [[parse_rational(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise UsageError("det_exact needs a square matrix")
    if n == 0:
        return Fraction(1)

    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) / prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def jacobian_rows(outputs: Sequence[DualRational]) -> List[List[Fraction]]:
    return [list(out.partials) for out in outputs]


def log_jacobian_from_duals(inputs: Sequence[Fraction], outputs: Sequence[DualRational]) -> Fraction:
    """det(D_out^{-1} J D_in), the Jacobian determinant in logarithmic variables"""
    if len(inputs) != len(outputs):
        raise UsageError("Map must preserve the number of coordinates")
    rows = []
    for out in outputs:
        t = out.value
        rows.append([p * w / t for p, w in zip(out.partials, inputs)])
    return det_exact(rows)
