"""Combinatorics of a depth-zero L-packet parameter.

A parameter is recorded by its twist ``a = w theta`` acting on ``X^*(T0)``.
The cocharacter lattice ``X = X_*(T0^w)`` carries ``sigma = a^{-T}``;
``X-bar`` is ``X`` modulo the coroot lattice. Points of the dual torus are
rational vectors ``r`` of ``X^*(T0) (x) Q`` standing for ``exp(2 pi i r)``.

The column ``X_w -> [X_Gamma]_tor -> [X-bar_Gamma]_tor`` of the parameter
diagram is computed with cokernels; its top row pairs these groups with
``pi_0`` of the centralizer and of the Galois-fixed centre through the dot
product ``<lambda, r>``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .galois_cohomology import (
    Coinvariants,
    GammaLattice,
    TateGroup,
    augmentation,
    coinvariants,
    dr_map,
    h1_lattice,
    pairing_cup,
    tn_map,
)
from .lattice_core import (
    AbelianElement,
    Cokernel,
    FiniteAbelianGroup,
    IntMatrix,
    QmodZ,
    Vector,
    cokernel,
    dot,
    kernel_basis,
    smith_normal_form,
    solve_rational,
)
from .root_datum import BasedAutomorphism, FrobeniusTwist, RootDatum, WeylElement, frobenius_twist


class PacketError(ValueError):
    """Precondition failure for a packet computation."""


@dataclass(frozen=True)
class ParameterCombinatorics:
    G: RootDatum
    twist: FrobeniusTwist
    X: GammaLattice

    @property
    def m(self) -> int:
        return self.X.m

    @property
    def a(self) -> IntMatrix:
        return self.twist.matrix

    @functools.cached_property
    def character_lattice(self) -> GammaLattice:
        """``X^*(T0)`` with ``a``; the dual of ``X``."""
        return GammaLattice(self.a, self.m)

    def coinvariants(self) -> Coinvariants:
        return self._coinvariants

    @functools.cached_property
    def _coinvariants(self) -> Coinvariants:
        return coinvariants(self.X)

    def central_coinvariants(self) -> Cokernel:
        return self._central_coinvariants

    @functools.cached_property
    def _central_coinvariants(self) -> Cokernel:
        """``X-bar_Gamma = X / (coroot lattice + (sigma - 1) X)``."""
        return cokernel(self.G.coroot_matrix().hstack(augmentation(self.X)))


def parameter(G: RootDatum, w: WeylElement, theta: BasedAutomorphism,
              m: int | None = None) -> ParameterCombinatorics:
    """Build the combinatorial data of a parameter with twist ``w theta``.

    ``m`` defaults to the order of ``w theta``; an override must be a multiple.
    """
    tw = frobenius_twist(G, w, theta)
    m = m or tw.order
    if m % tw.order:
        raise PacketError(f"declared order {m} is not a multiple of the twist order {tw.order}")
    sigma = tw.matrix.inverse().T
    # coroot lattice must be sigma-stable for X-bar to be a Gamma-module
    cset = set(G.coroots)
    if any(sigma.apply(c) not in cset for c in G.coroots):
        raise PacketError("twist does not preserve the coroots")
    return ParameterCombinatorics(G, tw, GammaLattice(sigma, m))


# ---------------------------------------------------------------------------


def membership_Xw(pc: ParameterCombinatorics, lam: Sequence[int]) -> bool:
    """Whether ``lam`` maps to a torsion element of ``X_Gamma``."""
    return pc.coinvariants().is_torsion_vector(tuple(lam))


@dataclass(frozen=True)
class TrselpResult:
    ok: bool
    fixed_basis: tuple[Vector, ...]
    offending: Vector | None = None


def trselp_validate(pc: ParameterCombinatorics) -> TrselpResult:
    """``T0^w / Z`` anisotropic: every fixed vector of ``X (x) Q`` is orthogonal to all roots."""
    fixed = kernel_basis(augmentation(pc.X)).columns()
    for v in fixed:
        if any(dot(r, v) for r in pc.G.roots):
            return TrselpResult(False, tuple(fixed), v)
    return TrselpResult(True, tuple(fixed))


@dataclass(frozen=True)
class ComponentGroup:
    """``pi_0(T0-hat^{w theta})`` presented as ``H^1`` of ``X^*(T0)`` with ``a``."""

    tate: TateGroup

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.tate.group


def component_group(pc: ParameterCombinatorics) -> ComponentGroup:
    cg = ComponentGroup(h1_lattice(pc.character_lattice))
    tor = pc.coinvariants().torsion
    if cg.group.order != tor.order:
        raise PacketError(f"|C_phi| = {cg.group.order} but |[X_Gamma]_tor| = {tor.order}")
    return cg


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualTorusPoint:
    """``t = exp(2 pi i r)`` in ``T0-hat``, fixed by ``w theta``."""

    r: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(Fraction(x) for x in self.r))

    def is_fixed(self, a: IntMatrix) -> bool:
        return all((x - y).denominator == 1 for x, y in zip(a.apply(self.r), self.r))

    def is_central(self, G: RootDatum) -> bool:
        return all(Fraction(dot(self.r, c)).denominator == 1 for c in G.coroots)

    def __str__(self) -> str:
        return "(" + ", ".join(str(x) for x in self.r) + ")"


def dual_torus_point(pc: ParameterCombinatorics, r: Sequence) -> DualTorusPoint:
    t = DualTorusPoint(tuple(Fraction(x) for x in r))
    if len(t.r) != pc.G.rank:
        raise PacketError("point has the wrong length")
    if not t.is_fixed(pc.a):
        raise PacketError(f"point {t} is not fixed by w theta modulo X^*")
    return t


def _require_Xw(pc: ParameterCombinatorics, lam) -> Vector:
    lam = tuple(int(x) for x in lam)
    if not membership_Xw(pc, lam):
        raise PacketError(f"{lam} is not in X_w")
    return lam


def character_eval(pc: ParameterCombinatorics, lam: Sequence[int], t: DualTorusPoint) -> QmodZ:
    """``rho_lambda(t) = <lambda, r>`` mod Z."""
    lam = _require_Xw(pc, lam)
    if not t.is_fixed(pc.a):
        raise PacketError(f"point {t} is not fixed by w theta modulo X^*")
    return QmodZ.of(dot(lam, t.r))


def central_restriction(pc: ParameterCombinatorics, lam: Sequence[int]) -> AbelianElement:
    """Image of ``lam`` in ``[X-bar_Gamma]_tor``."""
    lam = _require_Xw(pc, lam)
    co = pc.central_coinvariants()
    e = co.project(lam)
    if not e.is_torsion():  # pragma: no cover - torsion maps to torsion
        raise PacketError("image in X-bar_Gamma is not torsion")
    return co.group.torsion().element(e.torsion_coords)


def central_pairing(pc: ParameterCombinatorics, u: AbelianElement, t: DualTorusPoint) -> QmodZ:
    """Pair a class of ``[X-bar_Gamma]_tor`` with a central fixed point via its
    canonical lift."""
    if not t.is_central(pc.G):
        raise PacketError(f"point {t} is not central")
    co = pc.central_coinvariants()
    lift = co.lift(co.group.element(u.coords + (0,) * co.group.free_rank))
    return QmodZ.of(dot(lift, t.r))


def packet_fiber(pc: ParameterCombinatorics, u: AbelianElement) -> list[AbelianElement]:
    """Classes of ``[X_Gamma]_tor`` over ``u`` in ``[X-bar_Gamma]_tor``."""
    co = pc.coinvariants()
    out = []
    for e in co.torsion.elements():
        if central_restriction(pc, co.torsion_lift(e)) == u:
            out.append(e)
    return out


def packet_fibers(pc: ParameterCombinatorics) -> dict[AbelianElement, list[AbelianElement]]:
    """All fibers over ``[X-bar_Gamma]_tor``, including empty ones."""
    target = pc.central_coinvariants().group.torsion()
    return {u: packet_fiber(pc, u) for u in target.elements()}


def central_points(pc: ParameterCombinatorics) -> list[DualTorusPoint]:
    """Representatives of the central points fixed by ``w theta``, modulo ``X^*``.

    Central means ``<r, c>`` is integral for every coroot ``c``. For
    semisimple data the list is all of ``Z(G-hat)^Gamma``; central torus
    directions are sampled at multiples of ``1/m``.
    """
    G = pc.G
    n = G.rank
    CT = G.coroot_matrix().T
    snf = smith_normal_form(CT)
    diag = snf.diagonal
    ranges = []
    for i in range(n):
        d = diag[i] if i < len(diag) else 0
        ranges.append([Fraction(k, d) for k in range(d)] if d else [Fraction(k, pc.m) for k in range(pc.m)])
    V_inv = snf.V_inv
    seen = set()
    out = []
    for y in itertools.product(*ranges):
        r = V_inv.apply(y)
        key = tuple(x - (x.numerator // x.denominator) for x in r)
        if key in seen:
            continue
        seen.add(key)
        t = DualTorusPoint(key)
        if t.is_fixed(pc.a):
            out.append(t)
    return out


def component_points(pc: ParameterCombinatorics) -> list[DualTorusPoint]:
    """One fixed point of ``T0-hat`` per element of ``C_phi``.

    A class with cocycle value ``c`` at ``sigma`` comes from the point ``r``
    solving ``(a - 1) r = c`` over Q.
    """
    cg = component_group(pc)
    aug = pc.a - IntMatrix.identity(pc.G.rank)
    return [DualTorusPoint(solve_rational(aug, cg.tate.lift(e))) for e in cg.group.elements()]


def diagram_commutes(pc: ParameterCombinatorics, lam: Sequence[int], t: DualTorusPoint) -> bool:
    """``rho_lambda(t)`` agrees with pairing the central restriction of ``lambda``
    against ``t``."""
    return character_eval(pc, lam, t) == central_pairing(pc, central_restriction(pc, lam), t)


def point_cocycle_value(pc: ParameterCombinatorics, t: DualTorusPoint) -> Vector:
    """``a r - r``: value at ``sigma`` of the cocycle ``tau -> tau z - z`` with ``z = r``."""
    diff = [x - y for x, y in zip(pc.a.apply(t.r), t.r)]
    if any(x.denominator != 1 for x in diff):
        raise PacketError(f"point {t} is not fixed by w theta modulo X^*")
    return tuple(int(x) for x in diff)


def kottwitz_sign_check(pc: ParameterCombinatorics, lam: Sequence[int], t: DualTorusPoint,
                        normalization: Literal["DR", "TN"] = "DR") -> bool:
    """Whether the inverse of ``<t, DR(lambda)>`` equals ``rho_lambda(t)``.

    The left side pairs the class of ``t`` in ``H^1(Gamma, X^*(T))`` with the
    cohomology class of ``lambda`` through the cup product. With ``"TN"`` the
    unsigned Tate-Nakayama map is used instead of ``DR``.
    """
    lam = _require_Xw(pc, lam)
    c = point_cocycle_value(pc, t)
    cls = dr_map(pc.X, lam) if normalization == "DR" else tn_map(pc.X, lam)
    value = pairing_cup(pc.character_lattice, c, cls.representative)
    return -value == character_eval(pc, lam, t)


def xw_representatives(pc: ParameterCombinatorics, shifts: bool = True) -> list[Vector]:
    """Representatives of every class of ``[X_Gamma]_tor``, plus each shifted by
    ``(sigma - 1) e_i`` when ``shifts`` is set."""
    co = pc.coinvariants()
    reps = co.torsion_classes()
    if not shifts:
        return reps
    aug = augmentation(pc.X)
    out = list(reps)
    for v in reps:
        for j in range(aug.cols):
            out.append(tuple(x + y for x, y in zip(v, aug.column(j))))
    return out
