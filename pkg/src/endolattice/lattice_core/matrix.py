"""Immutable exact integer matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """A dense ``rows x cols`` integer matrix stored row-major.

    Python ints are arbitrary precision, so every operation here is exact.
    Vectors are plain tuples and are treated as columns.
    """

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if not rows:
            return cls(0, ncols or 0, ())
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), width, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
        columns = [tuple(int(x) for x in c) for c in columns]
        if any(len(c) != nrows for c in columns):
            raise ValueError("column length mismatch")
        ncols = len(columns)
        return cls(nrows, ncols, tuple(columns[j][i] for i in range(nrows) for j in range(ncols)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        return cls(n, n, tuple(int(values[i]) if i == j else 0 for i in range(n) for j in range(n)))

    # -- access --------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    # -- arithmetic ----------------------------------------------------

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         tuple(self.entries[i * self.cols + j]
                               for j in range(self.cols) for i in range(self.rows)))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(k * a for a in self.entries))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = [other.column(j) for j in range(other.cols)]
            out = []
            for i in range(self.rows):
                r = self.row(i)
                out.extend(sum(a * b for a, b in zip(r, c)) for c in ocols)
            return IntMatrix(self.rows, other.cols, tuple(out))
        return self.apply(other)

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product; works for int or Fraction entries in ``v``."""
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(self.row(i), v)), 0) for i in range(self.rows))

    def __pow__(self, k: int) -> IntMatrix:
        if not self.is_square:
            raise ValueError("power of non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        M = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if M[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
                if swap is None:
                    return 0
                M[k], M[swap] = M[swap], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        return sign * M[n - 1][n - 1]

    def rational_inverse(self) -> list[list[Fraction]]:
        """Inverse over Q as nested lists of Fractions."""
        if not self.is_square:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = [[Fraction(x) for x in self.row(i)] + [Fraction(int(i == j)) for j in range(n)]
               for i in range(n)]
        for c in range(n):
            p = next((r for r in range(c, n) if aug[r][c] != 0), None)
            if p is None:
                raise ZeroDivisionError("singular matrix")
            aug[c], aug[p] = aug[p], aug[c]
            inv = 1 / aug[c][c]
            aug[c] = [x * inv for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return [row[n:] for row in aug]

    def inverse(self) -> IntMatrix:
        """Integer inverse; raises ``ValueError`` unless the matrix is unimodular."""
        if not self.is_square or abs(self.det()) != 1:
            raise ValueError("matrix is not unimodular")
        inv = self.rational_inverse()
        return IntMatrix.from_rows([[int(x) for x in row] for row in inv])

    def order(self, cap: int = 10000) -> int:
        """Multiplicative order, searched up to ``cap``."""
        if not self.is_square:
            raise ValueError("order of non-square matrix")
        ident = IntMatrix.identity(self.rows)
        power = self
        for k in range(1, cap + 1):
            if power == ident:
                return k
            power = power @ self
        raise ValueError(f"matrix order exceeds cap {cap}")

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix.from_columns(self.columns() + other.columns(), self.rows)

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def _same_shape(self, other: IntMatrix) -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_rows()})"


def dot(u: Iterable, v: Iterable):
    return sum((a * b for a, b in zip(u, v, strict=True)), 0)


def vec_add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_neg(u: Sequence) -> tuple:
    return tuple(-a for a in u)


def vec_scale(k, u: Sequence) -> tuple:
    return tuple(k * a for a in u)
