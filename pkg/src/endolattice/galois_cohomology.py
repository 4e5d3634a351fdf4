"""Tate cohomology of a finite cyclic group acting on a lattice.

``Gamma = <sigma>`` of declared order ``m``. For a lattice ``L`` with
operator ``sigma`` the Tate groups used here are

* ``H^-1 = ker N / (sigma - 1) L``, which for a cyclic group is also
  ``H^1`` (a 1-cocycle is determined by its value at ``sigma``, which must
  lie in ``ker N``),
* ``H^0 = L^Gamma / N L``,

with ``N = 1 + sigma + ... + sigma^(m-1)``.

The dual lattice ``L* = Hom(L, Z)`` carries ``sigma^{-T}``. Multiplicative
groups ``T(E)`` and ``E^x`` of an unramified extension are replaced by their
valuation lattices (``X_*(T)`` and ``Z``): unit cohomology vanishes for
unramified extensions, so every class computed here is unaffected.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .lattice_core import (
    AbelianElement,
    Cokernel,
    FiniteAbelianGroup,
    IntMatrix,
    QmodZ,
    Subquotient,
    Vector,
    cokernel,
    dot,
    kernel_basis,
    solve_rational,
    subgroup_order,
    subquotient,
    vec_add,
    vec_neg,
)


class CohomologyError(ValueError):
    """Invalid cohomological input (non-cocycle, non-torsion class, ...)."""


@dataclass(frozen=True)
class GammaLattice:
    """``Z^rank`` with an operator ``sigma`` satisfying ``sigma^m = 1``."""

    sigma: IntMatrix
    m: int

    def __post_init__(self):
        if not self.sigma.is_square:
            raise CohomologyError("sigma must be square")
        if self.m < 1:
            raise CohomologyError("declared order m must be >= 1")
        if self.sigma ** self.m != IntMatrix.identity(self.rank):
            raise CohomologyError(f"sigma^{self.m} is not the identity")

    @property
    def rank(self) -> int:
        return self.sigma.rows

    @functools.cached_property
    def _powers(self) -> tuple[IntMatrix, ...]:
        out = [IntMatrix.identity(self.rank)]
        for _ in range(1, self.m):
            out.append(out[-1] @ self.sigma)
        return tuple(out)

    def power(self, k: int) -> IntMatrix:
        return self._powers[k % self.m]

    def dual(self) -> GammaLattice:
        """``Hom(L, Z)`` with the contragredient action ``sigma^{-T}``."""
        return self._dual

    @functools.cached_property
    def _dual(self) -> GammaLattice:
        return GammaLattice(self.sigma.inverse().T, self.m)

    def is_equivariant(self, f: IntMatrix, target: GammaLattice) -> bool:
        return target.sigma @ f == f @ self.sigma


@functools.lru_cache(maxsize=4096)
def norm_operator(M: GammaLattice) -> IntMatrix:
    N = IntMatrix.zeros(M.rank, M.rank)
    for P in M._powers:
        N = N + P
    return N


def augmentation(M: GammaLattice) -> IntMatrix:
    """``sigma - 1``; its image is the augmentation submodule ``I L``."""
    return M.sigma - IntMatrix.identity(M.rank)


@dataclass(frozen=True)
class TateGroup:
    """A Tate group of ``M`` realised as a subquotient of ``Z^rank``."""

    lattice: GammaLattice
    degree: str
    presentation: Subquotient

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.presentation.group

    def contains_cycle(self, v: Sequence[int]) -> bool:
        return self.presentation.in_span(v)

    def project(self, v: Sequence[int]) -> AbelianElement:
        if not self.presentation.in_span(v):
            raise CohomologyError(f"{tuple(v)} is not a cycle for {self.degree}")
        return self.presentation.project(v)

    def lift(self, e: AbelianElement) -> Vector:
        return self.presentation.lift(e)

    def classes(self) -> list[CohomologyClass]:
        return [CohomologyClass(self, self.lift(e)) for e in self.group.elements()]

    def __len__(self) -> int:
        return self.group.order


@dataclass(frozen=True)
class CohomologyClass:
    """A class of a ``TateGroup`` given by a representative cycle."""

    parent: TateGroup
    representative: Vector

    def __post_init__(self):
        rep = tuple(int(x) for x in self.representative)
        object.__setattr__(self, "representative", rep)
        if not self.parent.contains_cycle(rep):
            raise CohomologyError(f"{rep} is not a cycle for {self.parent.degree}")

    @property
    def element(self) -> AbelianElement:
        return self.parent.project(self.representative)

    def is_zero(self) -> bool:
        return self.element.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return self.parent == other.parent and self.element == other.element

    def __hash__(self) -> int:
        return hash((self.parent.degree, self.element))

    def __neg__(self) -> CohomologyClass:
        return CohomologyClass(self.parent, vec_neg(self.representative))

    def __add__(self, other: CohomologyClass) -> CohomologyClass:
        return CohomologyClass(self.parent, vec_add(self.representative, other.representative))


@functools.lru_cache(maxsize=4096)
def _kernel_mod_augmentation(M: GammaLattice, degree: str) -> TateGroup:
    K = kernel_basis(norm_operator(M))
    return TateGroup(M, degree, subquotient(K, augmentation(M)))


def tate_h_minus1(M: GammaLattice) -> TateGroup:
    """``ker N / (sigma - 1) L``."""
    return _kernel_mod_augmentation(M, "H^-1")


def h1_torus_model(M: GammaLattice) -> TateGroup:
    """``H^1(Gamma, T)`` for the torus with cocharacter lattice ``M``.

    With valuations in place of ``T(E)``, a cocycle is determined by its
    value at ``sigma`` in ``ker N``, and coboundaries are ``(sigma - 1) L``.
    Same group as ``tate_h_minus1``, different provenance label.
    """
    return _kernel_mod_augmentation(M, "H^1(Gamma,T)")


def h1_lattice(M: GammaLattice) -> TateGroup:
    """``H^1(Gamma, L)``, classes represented by the cocycle value at ``sigma``."""
    return _kernel_mod_augmentation(M, "H^1")


@functools.lru_cache(maxsize=4096)
def tate_h0(M: GammaLattice) -> TateGroup:
    """``L^Gamma / N L``."""
    fixed = kernel_basis(augmentation(M))
    return TateGroup(M, "H^0", subquotient(fixed, norm_operator(M)))


@dataclass(frozen=True)
class Coinvariants:
    """``L / (sigma - 1) L`` with its torsion subgroup."""

    lattice: GammaLattice
    presentation: Cokernel

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.presentation.group

    @property
    def torsion(self) -> FiniteAbelianGroup:
        return self.group.torsion()

    def project(self, v: Sequence[int]) -> AbelianElement:
        return self.presentation.project(v)

    def lift(self, e: AbelianElement) -> Vector:
        return self.presentation.lift(e)

    def torsion_element(self, e: AbelianElement) -> AbelianElement:
        """View a torsion element of ``X_Gamma`` inside ``[X_Gamma]_tor``."""
        if not e.is_torsion():
            raise CohomologyError("element of infinite order in the coinvariants")
        return self.torsion.element(e.torsion_coords)

    def torsion_lift(self, t: AbelianElement) -> Vector:
        return self.lift(self.group.element(t.coords + (0,) * self.group.free_rank))

    def torsion_classes(self) -> list[Vector]:
        """One representative vector per element of ``[L_Gamma]_tor``."""
        return [self.torsion_lift(t) for t in self.torsion.elements()]

    def is_torsion_vector(self, v: Sequence[int]) -> bool:
        return self.project(v).is_torsion()


@functools.lru_cache(maxsize=4096)
def coinvariants(M: GammaLattice) -> Coinvariants:
    """``L_Gamma``; verifies that its torsion part is exactly the image of ``ker N``."""
    co = Coinvariants(M, cokernel(augmentation(M)))
    h = tate_h_minus1(M)
    K = h.presentation.basis
    images = [co.project(K.column(j)) for j in range(K.cols)]
    if any(not e.is_torsion() for e in images):
        raise CohomologyError("ker N does not map into the torsion of the coinvariants")
    gens = [co.torsion_element(e) for e in images]
    if subgroup_order(co.torsion, gens) != co.torsion.order or co.torsion.order != h.group.order:
        raise CohomologyError("torsion of the coinvariants differs from H^-1")
    return co


# ---------------------------------------------------------------------------
# Cocycles, the Tate-Nakayama map and its DeBacker-Reeder variant.


@dataclass(frozen=True)
class Cocycle:
    """A 1-cocycle ``Gamma -> L`` as the table ``k -> c(sigma^k)``."""

    lattice: GammaLattice
    values: tuple[Vector, ...]

    def __call__(self, k: int) -> Vector:
        return self.values[k % self.lattice.m]

    def check(self) -> None:
        M = self.lattice
        for a in range(M.m):
            for b in range(M.m):
                lhs = self((a + b) % M.m)
                rhs = vec_add(self(a), M.power(a).apply(self(b)))
                if lhs != rhs:
                    raise CohomologyError(f"cocycle identity fails at (sigma^{a}, sigma^{b})")


def cocycle_from_value(M: GammaLattice, value_at: Literal["sigma", "Fi"], lam: Sequence[int]) -> Cocycle:
    """The unique cocycle with value ``lam`` at ``sigma`` or at ``Fi = sigma^{-1}``.

    From ``0 = c(sigma Fi) = c(sigma) + sigma c(Fi)`` the value at ``sigma``
    of the ``Fi``-normalised cocycle is ``-sigma lam``.
    """
    lam = tuple(int(x) for x in lam)
    if any(norm_operator(M).apply(lam)):
        raise CohomologyError(f"N({lam}) != 0: no cocycle with this value")
    if value_at == "sigma":
        at_sigma = lam
    elif value_at == "Fi":
        at_sigma = vec_neg(M.sigma.apply(lam))
    else:
        raise ValueError(f"value_at must be 'sigma' or 'Fi', got {value_at!r}")
    values = [(0,) * M.rank]
    for _ in range(1, M.m):
        values.append(vec_add(at_sigma, M.sigma.apply(values[-1])))
    c = Cocycle(M, tuple(values))
    c.check()
    return c


def _torsion_vector(M: GammaLattice, lam) -> Vector:
    co = coinvariants(M)
    if isinstance(lam, AbelianElement):
        if lam.group == co.torsion:
            return co.torsion_lift(lam)
        lam = co.lift(lam)
    lam = tuple(int(x) for x in lam)
    if not co.is_torsion_vector(lam):
        raise CohomologyError(f"{lam} is not torsion in the coinvariants")
    return lam


def tn_map(M: GammaLattice, lam) -> CohomologyClass:
    """Tate-Nakayama: ``[lam]`` goes to the class of the cocycle with ``z(sigma) = lam(pi)``."""
    lam = _torsion_vector(M, lam)
    c = cocycle_from_value(M, "sigma", lam)
    return CohomologyClass(h1_torus_model(M), c(1))


def dr_map(M: GammaLattice, lam) -> CohomologyClass:
    """DeBacker-Reeder: the class of the cocycle with value ``lam(pi)`` at ``Fi``."""
    lam = _torsion_vector(M, lam)
    c = cocycle_from_value(M, "Fi", lam)
    return CohomologyClass(h1_torus_model(M), c(1))


# ---------------------------------------------------------------------------
# Pairings. ``c`` lives on ``L`` (the sigma-module), ``mu`` on ``L*``.


def _rep(x) -> Vector:
    return x.representative if isinstance(x, CohomologyClass) else tuple(int(v) for v in x)


def _check_cycle(M: GammaLattice, v: Vector, what: str) -> None:
    if any(norm_operator(M).apply(v)):
        raise CohomologyError(f"{what} representative {v} is not in ker N")


def pairing_standard(M: GammaLattice, c, mu) -> QmodZ:
    """Pairing through ``T^Gamma``: solve ``(sigma - 1) z = c(sigma)`` over Q,
    return ``<mu, z>`` mod Z."""
    c, mu = _rep(c), _rep(mu)
    _check_cycle(M, c, "H^1")
    _check_cycle(M.dual(), mu, "H^-1")
    try:
        z = solve_rational(augmentation(M), c)
    except Exception as exc:  # pragma: no cover - impossible for c in ker N
        raise CohomologyError("(sigma - 1) z = c(sigma) inconsistent") from exc
    return QmodZ.of(dot(mu, z))


def pairing_cup(M: GammaLattice, c, mu) -> QmodZ:
    """``(1/m) sum_k <sigma*^k mu, c(sigma^k)>`` mod Z."""
    c, mu = _rep(c), _rep(mu)
    _check_cycle(M, c, "H^1")
    D = M.dual()
    _check_cycle(D, mu, "H^-1")
    cocycle = cocycle_from_value(M, "sigma", c)
    total = 0
    mu_k = mu
    for k in range(M.m):
        total += dot(mu_k, cocycle(k))
        mu_k = D.sigma.apply(mu_k)
    return QmodZ.of(Fraction(total, M.m))


@dataclass(frozen=True)
class TwoCocycleZ:
    """Valuations of a 2-cochain ``Gamma x Gamma -> E^x``: ``values[a][b]`` at ``(sigma^a, sigma^b)``."""

    values: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.values)

    def __call__(self, a: int, b: int) -> int:
        return self.values[a % self.m][b % self.m]

    def is_cocycle(self) -> bool:
        m = self.m
        return all(self(y, z) - self(x + y, z) + self(x, y + z) - self(x, y) == 0
                   for x in range(m) for y in range(m) for z in range(m))


def fundamental_class(m: int) -> TwoCocycleZ:
    """Valuation table of the fundamental class: ``pi`` exactly when ``a + b >= m``."""
    return TwoCocycleZ(tuple(tuple(int(a + b >= m) for b in range(m)) for a in range(m)))


def coboundary(g: Sequence[int]) -> TwoCocycleZ:
    """``(dg)(a, b) = g(b) - g(a + b) + g(a)`` for a 1-cochain ``g`` with trivial action."""
    m = len(g)
    return TwoCocycleZ(tuple(tuple(g[b] - g[(a + b) % m] + g[a] for b in range(m)) for a in range(m)))


def invariant_map(b: TwoCocycleZ, m: int | None = None) -> QmodZ:
    """``inv(b) = (1/m) sum_k b(sigma, sigma^k)`` mod Z."""
    m = m or b.m
    if b.m != m:
        raise CohomologyError(f"table is {b.m}x{b.m}, expected {m}x{m}")
    if not b.is_cocycle():
        raise CohomologyError("2-cocycle identity violated")
    return QmodZ.of(Fraction(sum(b(1, k) for k in range(m)), m))


def cup_with_torus_cocycle(M: GammaLattice, a, h) -> TwoCocycleZ:
    """``(tau, upsilon) -> <a(tau), tau z(upsilon)>`` in valuations.

    ``a`` is a class of ``H^1(Gamma, X^*(T))`` on ``M``; ``h`` is the
    ``H^-1`` representative on ``X_*(T) = M*`` sent to ``H^1(Gamma, T)`` by
    Tate-Nakayama, i.e. ``z(sigma) = h(pi)``.
    """
    a, h = _rep(a), _rep(h)
    D = M.dual()
    ca = cocycle_from_value(M, "sigma", a)
    z = cocycle_from_value(D, "sigma", h)
    table = tuple(tuple(dot(ca(t), D.power(t).apply(z(u))) for u in range(M.m)) for t in range(M.m))
    return TwoCocycleZ(table)


def pairing_cft(M: GammaLattice, a, h) -> QmodZ:
    """``inv(a cup TN(h))``."""
    a, h = _rep(a), _rep(h)
    _check_cycle(M, a, "H^1")
    _check_cycle(M.dual(), h, "H^-1")
    return invariant_map(cup_with_torus_cocycle(M, a, h), M.m)


PAIRINGS = {
    "standard": pairing_standard,
    "cup": pairing_cup,
    "cft": pairing_cft,
}


def pairing_matrix_is_perfect(M: GammaLattice, pairing=pairing_cup) -> bool:
    """Whether ``H^1(L) -> Hom(H^-1(L*), Q/Z)`` induced by ``pairing`` is bijective."""
    left = h1_lattice(M)
    right = tate_h_minus1(M.dual())
    if left.group.order != right.group.order:
        return False
    gens = [right.lift(e) for e in right.group.generators()]
    for e in left.group.elements():
        if e.is_zero():
            continue
        c = left.lift(e)
        if all(pairing(M, c, g).is_zero() for g in gens):
            return False
    return True
