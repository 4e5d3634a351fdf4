"""Finitely generated abelian groups presented by invariant factors, and Q/Z."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Iterator, Sequence

from .matrix import IntMatrix, Vector
from .smith import NoSolution, SmithDecomposition, smith_normal_form, solve_integer


@dataclass(frozen=True, order=True)
class QmodZ:
    """A rational number modulo 1, kept as a reduced fraction in [0, 1).

    Stands for the root of unity ``exp(2 pi i * value)``; the exponential is
    never evaluated.
    """

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator == 0:
            raise ZeroDivisionError("QmodZ with zero denominator")
        f = Fraction(self.numerator, self.denominator)
        f -= f.numerator // f.denominator
        object.__setattr__(self, "numerator", f.numerator)
        object.__setattr__(self, "denominator", f.denominator)

    @classmethod
    def of(cls, x) -> QmodZ:
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def is_zero(self) -> bool:
        return self.numerator == 0

    def order(self) -> int:
        return self.denominator

    def __add__(self, other: QmodZ) -> QmodZ:
        return QmodZ.of(self.value + other.value)

    def __sub__(self, other: QmodZ) -> QmodZ:
        return QmodZ.of(self.value - other.value)

    def __neg__(self) -> QmodZ:
        return QmodZ.of(-self.value)

    def __mul__(self, k: int) -> QmodZ:
        return QmodZ.of(self.value * k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "0" if self.numerator == 0 else f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/d_1 x ... x Z/d_k x Z^free_rank`` with ``d_1 | d_2 | ... | d_k``."""

    invariant_factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        inv = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", inv)
        if any(d < 2 for d in inv):
            raise ValueError(f"invariant factors must be >= 2: {inv}")
        if any(b % a for a, b in zip(inv, inv[1:])):
            raise ValueError(f"invariant factors violate divisibility: {inv}")
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    @property
    def order(self) -> int:
        """Order of the torsion part."""
        return prod(self.invariant_factors)

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    def torsion(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(self.invariant_factors)

    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def zero(self) -> AbelianElement:
        return AbelianElement(self, (0,) * self.ngens)

    def element(self, coords: Sequence[int]) -> AbelianElement:
        return AbelianElement(self, tuple(coords))

    def generators(self) -> list[AbelianElement]:
        return [AbelianElement(self, tuple(int(i == j) for j in range(self.ngens)))
                for i in range(self.ngens)]

    def elements(self) -> Iterator[AbelianElement]:
        """All elements, in lexicographic coordinate order (finite groups only)."""
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite group")
        for coords in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield AbelianElement(self, coords)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True)
class AbelianElement:
    """Element of a ``FiniteAbelianGroup`` in canonical coordinates."""

    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        g = self.group
        if len(self.coords) != g.ngens:
            raise ValueError(f"expected {g.ngens} coordinates, got {len(self.coords)}")
        k = len(g.invariant_factors)
        canon = tuple(int(x) % g.invariant_factors[i] if i < k else int(x)
                      for i, x in enumerate(self.coords))
        object.__setattr__(self, "coords", canon)

    @property
    def torsion_coords(self) -> tuple[int, ...]:
        return self.coords[:len(self.group.invariant_factors)]

    @property
    def free_coords(self) -> tuple[int, ...]:
        return self.coords[len(self.group.invariant_factors):]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_torsion(self) -> bool:
        return not any(self.free_coords)

    def order(self) -> int:
        if not self.is_torsion():
            raise ValueError("element of infinite order")
        n = 1
        for x, d in zip(self.torsion_coords, self.group.invariant_factors):
            n = n * (d // gcd(x, d)) // gcd(n, d // gcd(x, d))
        return n

    def _check(self, other: AbelianElement) -> None:
        if other.group != self.group:
            raise ValueError("elements of different groups")

    def __add__(self, other: AbelianElement) -> AbelianElement:
        self._check(other)
        return AbelianElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: AbelianElement) -> AbelianElement:
        self._check(other)
        return AbelianElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> AbelianElement:
        return AbelianElement(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> AbelianElement:
        return AbelianElement(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.coords)) + ")"


@dataclass(frozen=True)
class Cokernel:
    """``Z^n / (column span of A)`` with an explicit projection and section.

    With ``U_inv @ A @ V_inv = D`` the coordinates of ``v`` are read off
    ``U_inv @ v``: unit diagonal positions are dropped, positions with
    ``d > 1`` are reduced mod ``d``, positions past the rank are free.
    """

    relations: IntMatrix
    snf: SmithDecomposition = field(repr=False)
    group: FiniteAbelianGroup
    torsion_rows: tuple[int, ...]
    free_rows: tuple[int, ...]

    @property
    def ambient_rank(self) -> int:
        return self.relations.rows

    def project(self, v: Sequence[int]) -> AbelianElement:
        w = self.snf.U_inv.apply(tuple(v))
        return AbelianElement(self.group, tuple(w[i] for i in self.torsion_rows + self.free_rows))

    def lift(self, e: AbelianElement) -> Vector:
        if e.group != self.group:
            raise ValueError("element of a different group")
        w = [0] * self.ambient_rank
        for i, x in zip(self.torsion_rows + self.free_rows, e.coords):
            w[i] = x
        return self.snf.U.apply(tuple(w))

    def contains(self, v: Sequence[int]) -> bool:
        """Whether ``v`` lies in the column span of the relations."""
        return self.project(v).is_zero()


def cokernel(A: IntMatrix) -> Cokernel:
    """Presentation of ``Z^rows / A Z^cols``."""
    snf = smith_normal_form(A)
    diag = snf.diagonal
    rank = snf.rank
    torsion_rows = tuple(i for i in range(rank) if diag[i] > 1)
    free_rows = tuple(range(rank, A.rows))
    group = FiniteAbelianGroup(tuple(diag[i] for i in torsion_rows), len(free_rows))
    return Cokernel(A, snf, group, torsion_rows, free_rows)


@dataclass(frozen=True)
class Subquotient:
    """``span(K) / span(R)`` for a saturated basis ``K`` (columns) and
    relations ``R`` whose columns lie in ``span(K)``.

    Vectors of ``span(K)`` are mapped to ``K``-coordinates, then into the
    cokernel of the relations' ``K``-coordinates.
    """

    basis: IntMatrix
    relations: IntMatrix
    basis_snf: SmithDecomposition = field(repr=False)
    inner: Cokernel = field(repr=False)

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.inner.group

    def coordinates(self, v: Sequence[int]) -> Vector:
        return solve_integer(self.basis, v, self.basis_snf)

    def in_span(self, v: Sequence[int]) -> bool:
        try:
            self.coordinates(v)
        except NoSolution:
            return False
        return True

    def project(self, v: Sequence[int]) -> AbelianElement:
        return self.inner.project(self.coordinates(v))

    def lift(self, e: AbelianElement) -> Vector:
        return self.basis.apply(self.inner.lift(e))


def subquotient(basis: IntMatrix, relations: IntMatrix) -> Subquotient:
    snf = smith_normal_form(basis)
    if snf.rank != basis.cols or any(d != 1 for d in snf.invariant_factors):
        raise ValueError("subquotient basis must be a saturated basis (unit invariant factors)")
    coords = [solve_integer(basis, relations.column(j), snf) for j in range(relations.cols)]
    rel = IntMatrix.from_columns(coords, basis.cols)
    return Subquotient(basis, relations, snf, cokernel(rel))


def subgroup_order(group: FiniteAbelianGroup, gens: Sequence[AbelianElement]) -> int:
    """Order of the subgroup of the torsion part generated by ``gens``."""
    if not group.is_finite:
        raise ValueError("subgroup_order needs a finite group")
    k = len(group.invariant_factors)
    if k == 0:
        return 1
    cols = [e.coords for e in gens] + [tuple(d if i == j else 0 for i in range(k))
                                       for j, d in enumerate(group.invariant_factors)]
    quotient = cokernel(IntMatrix.from_columns(cols, k)).group
    return group.order // quotient.order
