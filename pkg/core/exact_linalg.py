"""Exact rational matrices over numpy integer arrays.

An ``ExactMatrix`` is an integer numerator array with one positive common
denominator. Products stay in int64 while the entries provably fit and
switch to Python integers (dtype=object) otherwise, so no operation ever
rounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Sequence, Tuple, Union

import numpy as np

_SAFE = 1 << 62

Scalar = Union[int, Fraction]


class ExactMatrixError(ArithmeticError):
    """Raised for shape mismatches and singular systems."""


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(a.max())), abs(int(a.min()))))


def _as_object(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _gcd_all(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype != object:
        return int(np.gcd.reduce(a.ravel()))
    return reduce(math.gcd, (int(x) for x in a.ravel()), 0)


def _fits(a: np.ndarray) -> bool:
    return _max_abs(a) < _SAFE


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    """Rational matrix num / den with den >= 1 and the fraction reduced."""

    num: np.ndarray
    den: int = 1

    def __post_init__(self):
        if self.num.ndim != 2:
            raise ExactMatrixError(f"expected a 2-D array, got shape {self.num.shape}")
        if self.den <= 0:
            raise ExactMatrixError("denominator must be positive")

    # ----- Construction -----

    @classmethod
    def of(cls, num: np.ndarray, den: int = 1) -> "ExactMatrix":
        """Build and reduce; int64 is kept when every entry fits."""
        num = np.asarray(num)
        if num.dtype != object and not np.issubdtype(num.dtype, np.integer):
            raise ExactMatrixError(f"numerators must be integers, got {num.dtype}")
        if num.dtype == object and _fits(num):
            num = num.astype(np.int64)
        elif num.dtype != object:
            num = num.astype(np.int64)
        g = math.gcd(_gcd_all(num), den)
        if g > 1:
            num = num // g
            den //= g
        return cls(num, den)

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence[Scalar]]) -> "ExactMatrix":
        values = [[Fraction(x) for x in row] for row in rows]
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for row in values for x in row), 1)
        num = np.array([[int(x * den) for x in row] for row in values], dtype=object)
        if num.ndim == 1:
            num = num.reshape(len(values), -1)
        return cls.of(num, den)

    @classmethod
    def identity(cls, m: int) -> "ExactMatrix":
        return cls(np.eye(m, dtype=np.int64), 1)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), 1)

    # ----- Views -----

    @property
    def shape(self) -> Tuple[int, int]:
        return self.num.shape

    @property
    def rows(self) -> int:
        return self.num.shape[0]

    @property
    def cols(self) -> int:
        return self.num.shape[1]

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.num[i, j]), self.den)

    def to_fractions(self) -> List[List[Fraction]]:
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def nnz(self) -> int:
        return int(np.count_nonzero(self.num))

    def is_zero(self) -> bool:
        return self.nnz() == 0

    def vector(self) -> np.ndarray:
        """Numerators in row-major order (the denominator is ``self.den``)."""
        return self.num.ravel()

    # ----- Arithmetic -----

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.den == other.den and bool(np.array_equal(self.num, other.num))

    __hash__ = None  # type: ignore[assignment]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ExactMatrixError(f"shape mismatch {self.shape} @ {other.shape}")
        a, b = self.num, other.num
        bound = _max_abs(a) * _max_abs(b) * max(self.cols, 1)
        if bound >= _SAFE or a.dtype == object or b.dtype == object:
            product = _as_object(a) @ _as_object(b)
        else:
            product = a @ b
        return ExactMatrix.of(product, self.den * other.den)

    def _aligned(self, other: "ExactMatrix") -> Tuple[np.ndarray, np.ndarray, int]:
        if self.shape != other.shape:
            raise ExactMatrixError(f"shape mismatch {self.shape} vs {other.shape}")
        den = self.den * other.den // math.gcd(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        a, b = self.num, other.num
        if _max_abs(a) * fa + _max_abs(b) * fb >= _SAFE or a.dtype == object or b.dtype == object:
            a, b = _as_object(a), _as_object(b)
        return a * fa, b * fb, den

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b, den = self._aligned(other)
        return ExactMatrix.of(a + b, den)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b, den = self._aligned(other)
        return ExactMatrix.of(a - b, den)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(-self.num, self.den)

    def scale(self, factor: Scalar) -> "ExactMatrix":
        factor = Fraction(factor)
        num = self.num
        if _max_abs(num) * abs(factor.numerator) >= _SAFE or num.dtype == object:
            num = _as_object(num)
        return ExactMatrix.of(num * factor.numerator, self.den * factor.denominator)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b = self.num, other.num
        if _max_abs(a) * _max_abs(b) >= _SAFE or a.dtype == object or b.dtype == object:
            a, b = _as_object(a), _as_object(b)
        return ExactMatrix.of(np.kron(a, b), self.den * other.den)

    def power_kron(self, k: int) -> "ExactMatrix":
        result = ExactMatrix.identity(1)
        for _ in range(k):
            result = result.kron(self)
        return result

    # ----- Text -----

    def to_matrix_market(self, comment: str = "") -> str:
        """Coordinate-format dump with exact p/q entries, 1-based indices."""
        lines = ["%%MatrixMarket matrix coordinate rational general"]
        if comment:
            lines.extend(f"% {line}" for line in comment.splitlines())
        rows, cols = np.nonzero(self.num)
        lines.append(f"{self.rows} {self.cols} {len(rows)}")
        for i, j in zip(rows.tolist(), cols.tolist()):
            value = self.entry(i, j)
            lines.append(f"{i + 1} {j + 1} {value}")
        return "\n".join(lines) + "\n"


def combine(coefficients: Sequence[Fraction], matrices: Sequence[ExactMatrix]) -> ExactMatrix:
    """Σ c_i M_i for matrices of one shape."""
    if not matrices:
        raise ExactMatrixError("combine needs at least one matrix")
    total = ExactMatrix.zeros(*matrices[0].shape)
    for c, m in zip(coefficients, matrices):
        if c:
            total = total + m.scale(c)
    return total


# ---------- Exact elimination ----------


def gauss_jordan(rows: Sequence[Sequence[Scalar]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q and the pivot columns.

    Pivots are chosen among the candidate rows with the fewest nonzeros,
    which keeps fill-in low on sparse systems.
    """
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots: List[int] = []
    r = 0
    for c in range(n):
        candidates = [i for i in range(r, m) if a[i][c] != 0]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: sum(1 for x in a[i] if x != 0))
        a[r], a[best] = a[best], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def invert(matrix: Sequence[Sequence[Scalar]]) -> List[List[Fraction]]:
    """Inverse of a square matrix over Q.

    Raises:
        ExactMatrixError: the matrix is singular.
    """
    m = len(matrix)
    augmented = [list(row) + [1 if i == j else 0 for j in range(m)] for i, row in enumerate(matrix)]
    reduced, pivots = gauss_jordan(augmented)
    if pivots[:m] != list(range(m)):
        raise ExactMatrixError("singular matrix")
    return [row[m:] for row in reduced]
