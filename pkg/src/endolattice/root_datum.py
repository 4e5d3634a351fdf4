"""Root data, Weyl groups, based automorphisms and Frobenius twists.

Conventions used throughout the package:

* ``X`` is the character lattice ``Z^rank``; roots are integer vectors in
  ``X`` and coroots integer vectors in the dual lattice ``X_*``, with the
  pairing the plain dot product of coordinates.
* Matrices act on column vectors of ``X``. A matrix ``g`` on ``X`` acts on
  ``X_*`` by ``g^{-T}``, the transpose-inverse, which preserves the pairing.
* Weyl words are lists of 1-based simple-root labels (Bourbaki numbering
  for the named types) and ``[i, j]`` means ``s_i @ s_j``.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Iterable, Sequence

from .lattice_core import IntMatrix, NoSolution, Vector, dot, kernel_basis, solve_rational

ROOT_CAP = 10000
ORDER_CAP = 10000
WEYL_CAP = 100000


class RootDatumError(ValueError):
    """Invalid root-datum input: bad Cartan data, non-closure, non-reduced, ..."""


# ---------------------------------------------------------------------------
# Cartan matrices, entry [i][j] = <alpha_i, alpha_j^vee>, Bourbaki labels.


def cartan_matrix_of_type(letter: str, n: int) -> list[list[int]]:
    letter = letter.upper()
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        A[i][j], A[j][i] = aij, aji

    if letter == "A" and n >= 1:
        for i in range(n - 1):
            link(i, i + 1)
    elif letter in ("B", "C") and n >= 2:
        for i in range(n - 2):
            link(i, i + 1)
        if letter == "B":
            link(n - 2, n - 1, -2, -1)
        else:
            link(n - 2, n - 1, -1, -2)
    elif letter == "D" and n >= 4:
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif letter == "E" and n in (6, 7, 8):
        for i, j in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]:
            if i <= n and j <= n:
                link(i - 1, j - 1)
    elif letter == "F" and n == 4:
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif letter == "G" and n == 2:
        link(0, 1, -1, -3)
    else:
        raise RootDatumError(f"unknown Cartan type {letter}{n}")
    return A


def weyl_order_of_type(letter: str, n: int) -> int:
    letter = letter.upper()
    if letter == "A":
        return factorial(n + 1)
    if letter in ("B", "C"):
        return 2 ** n * factorial(n)
    if letter == "D":
        return 2 ** (n - 1) * factorial(n)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
            ("F", 4): 1152, ("G", 2): 12, ("T", n): 1}[(letter, n)]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootDatum:
    """A reduced root datum with a chosen base.

    ``roots[i]`` and ``coroots[i]`` correspond; ``simple_indices`` picks the
    base out of ``roots``.
    """

    rank: int
    roots: tuple[Vector, ...]
    coroots: tuple[Vector, ...]
    simple_indices: tuple[int, ...]
    name: str = ""
    factors: tuple[tuple[str, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        roots = tuple(tuple(int(x) for x in r) for r in self.roots)
        coroots = tuple(tuple(int(x) for x in r) for r in self.coroots)
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "coroots", coroots)
        object.__setattr__(self, "simple_indices", tuple(self.simple_indices))
        self._validate()

    def _validate(self) -> None:
        if len(self.roots) != len(self.coroots):
            raise RootDatumError("roots and coroots differ in number")
        if any(len(v) != self.rank for v in self.roots + self.coroots):
            raise RootDatumError("vector of wrong length")
        if len(set(self.roots)) != len(self.roots):
            raise RootDatumError("repeated root")
        for a, av in zip(self.roots, self.coroots):
            if dot(a, av) != 2:
                raise RootDatumError(f"<{a}, {av}> != 2")
        index = self.root_index
        for a in self.roots:
            if tuple(-x for x in a) not in index:
                raise RootDatumError(f"root {a} without its negative")
            if tuple(2 * x for x in a) in index:
                raise RootDatumError(f"non-reduced: {a} and twice it are both roots")
        for a, av in zip(self.roots, self.coroots):
            for b, bv in zip(self.roots, self.coroots):
                k = dot(b, av)
                image = tuple(x - k * y for x, y in zip(b, a))
                j = index.get(image)
                if j is None:
                    raise RootDatumError(f"roots not closed under reflection in {a}")
                kv = dot(a, bv)
                if self.coroots[j] != tuple(x - kv * y for x, y in zip(bv, av)):
                    raise RootDatumError("root/coroot bijection not reflection-equivariant")
        for c in self.simple_coefficients:
            if not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
                raise RootDatumError("simple system is not a base")

    # -- derived data ----------------------------------------------------

    @cached_property
    def root_index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def coroot_index(self) -> dict[Vector, int]:
        return {r: i for i, r in enumerate(self.coroots)}

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_indices)

    @property
    def simple_roots(self) -> tuple[Vector, ...]:
        return tuple(self.roots[i] for i in self.simple_indices)

    @property
    def simple_coroots(self) -> tuple[Vector, ...]:
        return tuple(self.coroots[i] for i in self.simple_indices)

    @cached_property
    def simple_coefficients(self) -> tuple[tuple[int, ...], ...]:
        """Coordinates of each root in the simple roots."""
        if not self.simple_indices:
            if self.roots:
                raise RootDatumError("roots present but no simple roots")
            return ()
        S = IntMatrix.from_columns(self.simple_roots, self.rank)
        out = []
        for r in self.roots:
            try:
                c = solve_rational(S, r)
            except NoSolution:
                raise RootDatumError(f"root {r} outside the span of the simple roots") from None
            if any(x.denominator != 1 for x in c):
                raise RootDatumError(f"root {r} is not an integral combination of simple roots")
            out.append(tuple(int(x) for x in c))
        return tuple(out)

    @cached_property
    def positive(self) -> tuple[bool, ...]:
        return tuple(any(x > 0 for x in c) for c in self.simple_coefficients)

    @property
    def positive_indices(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.positive) if p)

    def height(self, i: int) -> int:
        return sum(self.simple_coefficients[i])

    def cartan_matrix(self) -> list[list[int]]:
        return [[dot(a, av) for av in self.simple_coroots] for a in self.simple_roots]

    def negative_of(self, i: int) -> int:
        return self.root_index[tuple(-x for x in self.roots[i])]

    def root_matrix(self) -> IntMatrix:
        """Roots as the columns of a ``rank x |R|`` matrix."""
        return IntMatrix.from_columns(self.roots, self.rank)

    def coroot_matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.coroots, self.rank)

    def simple_reflection(self, label: int) -> IntMatrix:
        """``s_label`` on ``X``: ``x - <x, a^vee> a`` for the 1-based simple label."""
        if not 1 <= label <= self.semisimple_rank:
            raise RootDatumError(f"simple label {label} out of range 1..{self.semisimple_rank}")
        i = self.simple_indices[label - 1]
        a, av = self.roots[i], self.coroots[i]
        n = self.rank
        return IntMatrix(n, n, tuple(int(r == c) - a[r] * av[c] for r in range(n) for c in range(n)))

    def reflection(self, i: int) -> IntMatrix:
        a, av = self.roots[i], self.coroots[i]
        n = self.rank
        return IntMatrix(n, n, tuple(int(r == c) - a[r] * av[c] for r in range(n) for c in range(n)))

    def root_permutation(self, g: IntMatrix) -> tuple[int, ...]:
        """Indices ``perm`` with ``g @ roots[i] == roots[perm[i]]``.

        Also checks that ``g^{-T}`` carries each coroot to the matching coroot.
        Raises ``RootDatumError`` if ``g`` does not preserve the datum.
        """
        perm = []
        for r in self.roots:
            j = self.root_index.get(g.apply(r))
            if j is None:
                raise RootDatumError(f"matrix does not permute the roots (image of {r})")
            perm.append(j)
        gT = g.T
        for i, j in enumerate(perm):
            if gT.apply(self.coroots[j]) != self.coroots[i]:
                raise RootDatumError("matrix does not respect the root/coroot bijection")
        return tuple(perm)

    def __str__(self) -> str:
        return self.name or f"RootDatum(rank={self.rank}, |R|={len(self.roots)})"


# ---------------------------------------------------------------------------


def _validate_cartan(simple_roots, simple_coroots) -> None:
    l = len(simple_roots)
    for i in range(l):
        for j in range(l):
            aij = dot(simple_roots[i], simple_coroots[j])
            if i == j and aij != 2:
                raise RootDatumError(f"<alpha_{i + 1}, alpha_{i + 1}^vee> = {aij} != 2")
            if i != j:
                aji = dot(simple_roots[j], simple_coroots[i])
                if aij > 0 or (aij == 0) != (aji == 0):
                    raise RootDatumError(f"invalid Cartan entries at ({i + 1},{j + 1})")


def generate_roots(simple_roots: Sequence[Sequence[int]], simple_coroots: Sequence[Sequence[int]],
                   cap: int = ROOT_CAP) -> tuple[list[Vector], list[Vector]]:
    """Close the simple roots/coroots under the simple reflections.

    Returns ``(roots, coroots)``: positive roots by increasing height, then
    their negatives in the same order; the simple roots come first.
    Raises ``RootDatumError`` if the closure exceeds ``cap`` roots.
    """
    simple_roots = [tuple(int(x) for x in r) for r in simple_roots]
    simple_coroots = [tuple(int(x) for x in r) for r in simple_coroots]
    if len(simple_roots) != len(simple_coroots):
        raise RootDatumError("different numbers of simple roots and coroots")
    _validate_cartan(simple_roots, simple_coroots)
    pairs = {a: av for a, av in zip(simple_roots, simple_coroots)}
    queue = deque(pairs.items())
    while queue:
        b, bv = queue.popleft()
        for a, av in zip(simple_roots, simple_coroots):
            k = dot(b, av)
            image = tuple(x - k * y for x, y in zip(b, a))
            if image in pairs:
                continue
            kv = dot(a, bv)
            pairs[image] = tuple(x - kv * y for x, y in zip(bv, av))
            if len(pairs) > cap:
                raise RootDatumError(f"root closure exceeds {cap} roots; Cartan data not of finite type")
            queue.append((image, pairs[image]))
    if not simple_roots:
        return [], []
    n = len(simple_roots[0])
    S = IntMatrix.from_columns(simple_roots, n)
    keyed = []
    for r, rv in pairs.items():
        c = solve_rational(S, r)
        if all(x >= 0 for x in c):
            keyed.append(((sum(c), tuple(-x for x in c)), r, rv))
    keyed.sort()
    pos = [(r, rv) for _, r, rv in keyed]
    roots = [r for r, _ in pos] + [tuple(-x for x in r) for r, _ in pos]
    coroots = [rv for _, rv in pos] + [tuple(-x for x in rv) for _, rv in pos]
    if len(roots) != len(pairs):
        raise RootDatumError("closure is not symmetric under negation")
    return roots, coroots


def datum_from_simple(simple_roots, simple_coroots, rank: int | None = None,
                      name: str = "", factors=()) -> RootDatum:
    roots, coroots = generate_roots(simple_roots, simple_coroots)
    if rank is None:
        if not roots:
            raise RootDatumError("rank must be given when there are no roots")
        rank = len(roots[0])
    l = len(list(simple_roots))
    return RootDatum(rank, tuple(roots), tuple(coroots), tuple(range(l)), name, tuple(factors))


_SEPARATOR = re.compile(r"\s*(?:×|\*|[xX](?=\s*[ABCDEFGTabcdefgt]\d))\s*")
_FACTOR = re.compile(r"^\s*([ABCDEFGT])(\d+)(?::(sc|ad))?\s*$", re.IGNORECASE)


def _simple_factor(letter: str, n: int, isogeny: str):
    """(rank, simple roots, simple coroots) of one factor in catalog coordinates."""
    if letter == "T":
        return n, [], []
    if n > 8:
        raise RootDatumError(f"rank {n} > 8 not supported")
    A = cartan_matrix_of_type(letter, n)
    if isogeny == "sc":
        roots = [A[i][:] for i in range(n)]
        coroots = [[int(i == j) for j in range(n)] for i in range(n)]
    else:
        roots = [[int(i == j) for j in range(n)] for i in range(n)]
        coroots = [[A[i][j] for i in range(n)] for j in range(n)]
    return n, roots, coroots


def build_named(spec: str) -> RootDatum:
    """Root datum from a string such as ``"A2:sc"``, ``"G2"``, ``"A1:sc x A1:ad"``
    or ``"B2 x T1"``.

    Factors are separated by ``x``, ``*`` or ``×``; each simple factor takes
    its own isogeny tag (default ``sc``). ``sc`` uses the fundamental-weight
    basis of ``X`` (simple coroots are the standard basis of ``X_*``); ``ad``
    uses the simple-root basis. ``Tn`` is an ``n``-dimensional split torus.
    """
    parts = [p for p in _SEPARATOR.split(spec.strip()) if p]
    if not parts:
        raise RootDatumError(f"empty datum spec {spec!r}")
    rank = 0
    simple_roots: list[list[int]] = []
    simple_coroots: list[list[int]] = []
    factors = []
    blocks = []
    for p in parts:
        m = _FACTOR.match(p)
        if not m:
            raise RootDatumError(f"unknown datum factor {p!r} in {spec!r}")
        letter, n, iso = m.group(1).upper(), int(m.group(2)), (m.group(3) or "sc").lower()
        if letter == "T" and m.group(3):
            raise RootDatumError("torus factors take no isogeny tag")
        if n < 1:
            raise RootDatumError(f"rank must be positive in {p!r}")
        blocks.append(_simple_factor(letter, n, iso))
        factors.append((letter, n))
    total = sum(b[0] for b in blocks)
    offset = 0
    for n, roots, coroots in blocks:
        for r in roots:
            simple_roots.append([0] * offset + list(r) + [0] * (total - offset - n))
        for r in coroots:
            simple_coroots.append([0] * offset + list(r) + [0] * (total - offset - n))
        offset += n
    rank = total
    name = " x ".join(p.strip() for p in parts)
    return datum_from_simple(simple_roots, simple_coroots, rank, name, factors)


def named_weyl_order(datum: RootDatum) -> int:
    if not datum.factors:
        raise ValueError("datum has no catalog type information")
    out = 1
    for letter, n in datum.factors:
        out *= weyl_order_of_type(letter, n)
    return out


def dual_datum(datum: RootDatum) -> RootDatum:
    """Swap roots and coroots (and the roles of ``X`` and ``X_*``)."""
    name = datum.name[5:-1] if datum.name.startswith("dual(") else (f"dual({datum.name})" if datum.name else "")
    return RootDatum(datum.rank, datum.coroots, datum.roots, datum.simple_indices, name, datum.factors)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylElement:
    """Weyl group element as a matrix on ``X`` with a word that produces it."""

    matrix: IntMatrix
    word: tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.word)

    def dual_action(self) -> IntMatrix:
        return self.matrix.inverse().T


def weyl_from_word(datum: RootDatum, word: Iterable[int]) -> WeylElement:
    word = tuple(int(i) for i in word)
    g = IntMatrix.identity(datum.rank)
    for i in word:
        g = g @ datum.simple_reflection(i)
    return WeylElement(g, word)


def weyl_group(datum: RootDatum, cap: int = WEYL_CAP) -> list[WeylElement]:
    """All Weyl group elements by breadth-first closure; words are reduced."""
    gens = [datum.simple_reflection(i) for i in range(1, datum.semisimple_rank + 1)]
    ident = IntMatrix.identity(datum.rank)
    seen = {ident: ()}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for label, s in enumerate(gens, start=1):
            h = g @ s
            if h not in seen:
                seen[h] = seen[g] + (label,)
                if len(seen) > cap:
                    raise RootDatumError(f"Weyl group larger than cap {cap}")
                queue.append(h)
    return [WeylElement(g, w) for g, w in seen.items()]


def is_weyl_element(datum: RootDatum, g: IntMatrix) -> tuple[int, ...] | None:
    """A reduced word for ``g`` if it lies in the Weyl group, else ``None``.

    Uses descent: while some positive simple root is sent negative, peel off
    that simple reflection on the right.
    """
    word = []
    h = g
    for _ in range(len(datum.roots) + 1):
        try:
            perm = datum.root_permutation(h)
        except RootDatumError:
            return None
        for label, i in enumerate(datum.simple_indices, start=1):
            if not datum.positive[perm[i]]:
                h = h @ datum.simple_reflection(label)
                word.append(label)
                break
        else:
            if h == IntMatrix.identity(datum.rank):
                return tuple(reversed(word))
            return None
    return None


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasedAutomorphism:
    """Finite-order automorphism of ``X`` preserving roots, coroots and the base."""

    matrix: IntMatrix
    order: int
    simple_permutation: tuple[int, ...] = ()

    def dual_action(self) -> IntMatrix:
        return self.matrix.inverse().T


def based_automorphism(datum: RootDatum, matrix: IntMatrix, cap: int = ORDER_CAP) -> BasedAutomorphism:
    """Validate ``matrix`` as a based automorphism of ``datum``."""
    if matrix.shape != (datum.rank, datum.rank):
        raise RootDatumError("automorphism has the wrong shape")
    if abs(matrix.det()) != 1:
        raise RootDatumError("automorphism is not invertible over Z")
    try:
        order = matrix.order(cap)
    except ValueError:
        raise RootDatumError(f"automorphism order exceeds {cap}") from None
    perm = datum.root_permutation(matrix)
    simple = set(datum.simple_indices)
    if any(perm[i] not in simple for i in datum.simple_indices):
        raise RootDatumError("matrix moves the base: not a based automorphism")
    labels = {idx: k for k, idx in enumerate(datum.simple_indices, start=1)}
    sperm = tuple(labels[perm[i]] for i in datum.simple_indices)
    return BasedAutomorphism(matrix, order, sperm)


def automorphism_from_permutation(datum: RootDatum, perm: Sequence[int]) -> BasedAutomorphism:
    """The based automorphism sending simple root ``i`` to simple root ``perm[i-1]``
    (1-based labels) and fixing the subspace killed by all coroots."""
    l = datum.semisimple_rank
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(1, l + 1)):
        raise RootDatumError(f"{perm} is not a permutation of 1..{l}")
    n = datum.rank
    central = kernel_basis(IntMatrix.from_columns(datum.simple_coroots, n).T) if l else IntMatrix.identity(n)
    src = list(datum.simple_roots) + central.columns()
    dst = [datum.simple_roots[p - 1] for p in perm] + central.columns()
    B = IntMatrix.from_columns(src, n)
    Binv = B.rational_inverse()
    Bp = IntMatrix.from_columns(dst, n)
    M = [[sum(Fraction(Bp[i, k]) * Binv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in M for x in row):
        raise RootDatumError(f"permutation {perm} does not lift to an integral automorphism")
    return based_automorphism(datum, IntMatrix.from_rows([[int(x) for x in row] for row in M]))


def based_automorphisms(datum: RootDatum) -> list[BasedAutomorphism]:
    """Based automorphisms induced by Dynkin-diagram symmetries, identity first.

    Only the central part fixed pointwise is considered, which is the whole
    group for semisimple data.
    """
    A = datum.cartan_matrix()
    l = len(A)
    out = []
    for perm in itertools.permutations(range(l)):
        if any(A[perm[i]][perm[j]] != A[i][j] for i in range(l) for j in range(l)):
            continue
        try:
            out.append(automorphism_from_permutation(datum, [p + 1 for p in perm]))
        except RootDatumError:
            continue
    return out


@dataclass(frozen=True)
class FrobeniusTwist:
    """``a = w @ theta`` together with its multiplicative order."""

    w: WeylElement
    theta: BasedAutomorphism
    matrix: IntMatrix
    order: int


def frobenius_twist(datum: RootDatum, w: WeylElement, theta: BasedAutomorphism,
                    cap: int = ORDER_CAP) -> FrobeniusTwist:
    a = w.matrix @ theta.matrix
    try:
        order = a.order(cap)
    except ValueError:
        raise RootDatumError(f"twist order exceeds {cap}") from None
    datum.root_permutation(a)
    return FrobeniusTwist(w, theta, a, order)


def identity_automorphism(datum: RootDatum) -> BasedAutomorphism:
    return BasedAutomorphism(IntMatrix.identity(datum.rank), 1, tuple(range(1, datum.semisimple_rank + 1)))


def inversion_set(datum: RootDatum, a: IntMatrix) -> frozenset[int]:
    """Indices of positive roots sent to negative roots by ``a``."""
    perm = datum.root_permutation(a)
    return frozenset(i for i in datum.positive_indices if not datum.positive[perm[i]])


def determinant(a: IntMatrix) -> int:
    d = a.det()
    if d not in (1, -1):
        raise RootDatumError(f"determinant {d} of a finite-order lattice automorphism must be +-1")
    return d
