"""Smith normal form and the integer/rational solvers built on it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix import IntMatrix, Vector


class NoSolution(ValueError):
    """The linear system has no solution over the requested ring."""


@dataclass(frozen=True)
class SmithDecomposition:
    """``A = U @ D @ V`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``U_inv`` and ``V_inv`` are carried along so callers never need to
    invert: ``U_inv @ A @ V_inv == D``.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nonzero diagonal entries, in divisibility order."""
        return tuple(d for d in self.diagonal if d != 0)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form by smallest-pivot elimination.

    Every elementary row operation is mirrored on ``P`` (and inversely on
    ``P_inv``), every column operation on ``Q`` / ``Q_inv``, maintaining
    ``P @ A @ Q == D`` throughout.
    """
    r, c = A.rows, A.cols
    D = A.to_rows()
    P = IntMatrix.identity(r).to_rows()
    Pi = IntMatrix.identity(r).to_rows()
    Q = IntMatrix.identity(c).to_rows()
    Qi = IntMatrix.identity(c).to_rows()

    def swap_rows(i, j):
        if i == j:
            return
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]
        for row in Pi:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i == j:
            return
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]
        Qi[i], Qi[j] = Qi[j], Qi[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        P[dst] = [a + k * b for a, b in zip(P[dst], P[src])]
        for row in Pi:
            row[src] -= k * row[dst]

    def add_col(dst, src, k):
        # col_dst += k * col_src
        for row in D:
            row[dst] += k * row[src]
        for row in Q:
            row[dst] += k * row[src]
        Qi[src] = [a - k * b for a, b in zip(Qi[src], Qi[dst])]

    def negate_row(i):
        D[i] = [-a for a in D[i]]
        P[i] = [-a for a in P[i]]
        for row in Pi:
            row[i] = -row[i]

    for t in range(min(r, c)):
        pivot = _smallest_nonzero(D, t, t)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            for i in range(t + 1, r):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
            for j in range(t + 1, c):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
            leftover = _smallest_in_cross(D, t)
            if leftover is not None:
                i, j = leftover
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            negate_row(t)

    return SmithDecomposition(
        U=IntMatrix.from_rows(Pi, r),
        D=IntMatrix.from_rows(D, c),
        V=IntMatrix.from_rows(Qi, c),
        U_inv=IntMatrix.from_rows(P, r),
        V_inv=IntMatrix.from_rows(Q, c),
    )


def _smallest_nonzero(D, r0, c0):
    best = None
    for i in range(r0, len(D)):
        for j in range(c0, len(D[i])):
            x = D[i][j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return None if best is None else best[1:]


def _smallest_in_cross(D, t):
    """Smallest nonzero entry left in row ``t`` or column ``t`` after reduction."""
    best = None
    for i in range(t + 1, len(D)):
        x = D[i][t]
        if x and (best is None or abs(x) < best[0]):
            best = (abs(x), i, t)
    for j in range(t + 1, len(D[t])):
        x = D[t][j]
        if x and (best is None or abs(x) < best[0]):
            best = (abs(x), t, j)
    return None if best is None else best[1:]


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel of ``A``, as the columns of the result.

    The basis spans the full saturated kernel: columns ``rank..`` of the
    right transform are part of a unimodular basis of Z^cols.
    """
    snf = smith_normal_form(A)
    k = snf.rank
    cols = [snf.V_inv.column(j) for j in range(k, A.cols)]
    return IntMatrix.from_columns(cols, A.cols)


def solve_integer(A: IntMatrix, b: Sequence[int], snf: SmithDecomposition | None = None) -> Vector:
    """Some integer ``x`` with ``A x = b``; raises ``NoSolution`` otherwise."""
    snf = snf or smith_normal_form(A)
    y = snf.U_inv.apply(tuple(b))
    diag = snf.diagonal
    x = [0] * A.cols
    for i, yi in enumerate(y):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if yi != 0:
                raise NoSolution("right-hand side outside the column span")
        elif yi % d:
            raise NoSolution("right-hand side outside the integer column span")
        else:
            x[i] = yi // d
    return snf.V_inv.apply(tuple(x))


def solve_rational(A: IntMatrix, b: Sequence) -> tuple[Fraction, ...]:
    """Some rational ``z`` with ``A z = b`` (free variables set to zero)."""
    rows = [[Fraction(x) for x in A.row(i)] + [Fraction(b[i])] for i in range(A.rows)]
    if len(b) != A.rows:
        raise ValueError("right-hand side length mismatch")
    pivots = []
    r = 0
    for c in range(A.cols):
        p = next((i for i in range(r, A.rows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(A.rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == A.rows:
            break
    for i in range(r, A.rows):
        if rows[i][-1] != 0:
            raise NoSolution("inconsistent rational system")
    z = [Fraction(0)] * A.cols
    for i, c in enumerate(pivots):
        z[c] = rows[i][-1]
    return tuple(z)


def rational_rank(A: IntMatrix) -> int:
    return smith_normal_form(A).rank


def rational_kernel_dim(A: IntMatrix) -> int:
    return A.cols - rational_rank(A)
