"""Endoscopic root subsystems and the three endoscopic signs.

The torsion element ``s = exp(2 pi i q)`` of the dual torus is recorded by
``q`` in ``X^*(T0) (x) Q`` modulo ``X^*(T0)``. The roots of the dual
endoscopic group are the coroots ``a^vee`` of ``G`` with ``<q, a^vee>``
integral.

The sign attached to the Weil indices is not computed analytically; it is
represented by ``(-1)^N`` with ``N`` the number of symmetric orbits, and the
residue-field computation behind the ``-1`` per symmetric orbit is checked
separately by :func:`gauss_sum_norm`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, lcm
from typing import Sequence

from .lattice_core import IntMatrix, dot, rational_kernel_dim, rational_rank
from .root_datum import (
    BasedAutomorphism,
    RootDatum,
    RootDatumError,
    WeylElement,
    determinant,
    frobenius_twist,
    identity_automorphism,
    inversion_set,
    weyl_from_word,
)


class EndoscopyError(ValueError):
    """Invalid endoscopic input."""


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionDualElement:
    """``q`` reduced to ``[0, 1)^rank``; ``order`` is the least ``k`` with ``k q`` integral."""

    q: tuple[Fraction, ...]

    def __post_init__(self):
        red = tuple(Fraction(x) - (Fraction(x).numerator // Fraction(x).denominator) for x in self.q)
        object.__setattr__(self, "q", red)

    @property
    def order(self) -> int:
        return lcm(*(x.denominator for x in self.q)) if self.q else 1

    def is_trivial(self) -> bool:
        return not any(self.q)

    def __str__(self) -> str:
        return "(" + ", ".join(str(x) for x in self.q) + ")"


def _is_integral(vec) -> bool:
    return all(Fraction(x).denominator == 1 for x in vec)


@dataclass(frozen=True)
class EndoscopicDatum:
    parent: RootDatum
    q: TorsionDualElement
    omega: WeylElement
    theta: BasedAutomorphism
    h_indices: tuple[int, ...]
    h_datum: RootDatum = field(compare=False, repr=False)

    @property
    def h_coroots(self) -> tuple:
        return tuple(self.parent.coroots[i] for i in self.h_indices)

    @property
    def twist(self) -> IntMatrix:
        return self.omega.matrix @ self.theta.matrix


def _subsystem_datum(G: RootDatum, indices: Sequence[int], name: str) -> RootDatum:
    """Root datum on ``X`` with roots ``G.roots[indices]``; base from G's positivity."""
    idx = list(indices)
    roots = [G.roots[i] for i in idx]
    pos = [i for i in idx if G.positive[i]]
    posset = {G.roots[i] for i in pos}
    simple_vecs = []
    for i in pos:
        a = G.roots[i]
        if not any(tuple(x - y for x, y in zip(a, G.roots[j])) in posset for j in pos if j != i):
            simple_vecs.append(a)
    local = {G.roots[i]: k for k, i in enumerate(idx)}
    simple_local = tuple(sorted(local[a] for a in simple_vecs))
    return RootDatum(G.rank, tuple(roots), tuple(G.coroots[i] for i in idx), simple_local, name)


def endoscopic_subsystem(G: RootDatum, q: TorsionDualElement | Sequence,
                         omega: WeylElement | None = None,
                         theta: BasedAutomorphism | None = None) -> EndoscopicDatum:
    """Roots of the dual endoscopic group: coroots ``a^vee`` with ``<q, a^vee>`` integral."""
    if not isinstance(q, TorsionDualElement):
        q = TorsionDualElement(tuple(Fraction(x) for x in q))
    if len(q.q) != G.rank:
        raise EndoscopyError(f"q has length {len(q.q)}, datum rank is {G.rank}")
    omega = omega or weyl_from_word(G, ())
    theta = theta or identity_automorphism(G)
    h = tuple(i for i, av in enumerate(G.coroots) if Fraction(dot(q.q, av)).denominator == 1)
    H = _subsystem_datum(G, h, f"H[{G.name}; q={q}]")
    return EndoscopicDatum(G, q, omega, theta, h, H)


def validate_gamma_fixed(datum: EndoscopicDatum) -> bool:
    """``omega theta`` fixes ``q`` modulo ``X^*`` and preserves the roots of ``H-hat``."""
    a = datum.twist
    image = a.apply(datum.q.q)
    if not _is_integral(x - y for x, y in zip(image, datum.q.q)):
        return False
    dual = a.inverse().T
    hset = set(datum.h_coroots)
    return all(dual.apply(c) in hset for c in datum.h_coroots)


def _fixed_central_space(coroots, action: IntMatrix) -> IntMatrix:
    """Stacked linear conditions cutting out ``{v : <v, c> = 0 for c in coroots, action v = v}``."""
    n = action.rows
    rows = [list(c) for c in coroots]
    rows += (action - IntMatrix.identity(n)).to_rows()
    return IntMatrix.from_rows(rows, n)


def is_elliptic(datum: EndoscopicDatum) -> bool:
    """``(Z(H-hat)^Gamma)^0`` is contained in ``Z(G-hat)``, compared as rational subspaces."""
    G = datum.parent
    h_conditions = _fixed_central_space(datum.h_coroots, datum.twist)
    g_conditions = _fixed_central_space(G.coroots, datum.theta.matrix)
    dim_h = rational_kernel_dim(h_conditions)
    dim_g = rational_kernel_dim(g_conditions)
    # G-side space is always inside the H-side one; equal iff dims agree and
    # adding the G conditions to the H ones does not cut the space down.
    both = h_conditions.vstack(g_conditions)
    return dim_h == dim_g and rational_kernel_dim(both) == dim_h


def split_rank(action: IntMatrix) -> int:
    """``dim_Q ker(action - 1)``."""
    return action.rows - rational_rank(action - IntMatrix.identity(action.rows))


def eps_relative_rank(G: RootDatum, theta: BasedAutomorphism, omega: WeylElement) -> int:
    rG = split_rank(theta.matrix)
    rH = split_rank(omega.matrix @ theta.matrix)
    return (-1) ** ((rG - rH) % 2)


def eps_L_unramified(theta: BasedAutomorphism, omega: WeylElement) -> int:
    """``det(theta^-1) * det((omega theta)^-1)^-1``."""
    a = omega.matrix @ theta.matrix
    d_theta = determinant(theta.matrix.inverse())
    d_a = determinant(a.inverse())
    return d_theta * d_a  # d_a is +-1, its own inverse


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    indices: tuple[int, ...]
    symmetric: bool


@dataclass(frozen=True)
class OrbitReport:
    orbits: tuple[Orbit, ...]

    @property
    def n_symmetric(self) -> int:
        return sum(1 for o in self.orbits if o.symmetric)


def classify_orbits(G: RootDatum, a: IntMatrix) -> OrbitReport:
    """Orbits of ``<a>`` on the roots, each tagged symmetric (``O = -O``) or asymmetric."""
    try:
        perm = G.root_permutation(a)
    except RootDatumError as exc:
        raise EndoscopyError(str(exc)) from None
    seen = set()
    orbits = []
    for start in range(len(G.roots)):
        if start in seen:
            continue
        orb = []
        i = start
        while i not in seen:
            seen.add(i)
            orb.append(i)
            i = perm[i]
        oset = set(orb)
        neg = {G.negative_of(i) for i in orb}
        if neg == oset:
            symmetric = True
        elif not (neg & oset):
            symmetric = False
        else:  # pragma: no cover - excluded by the orbit dichotomy
            raise EndoscopyError(f"orbit {orb} neither symmetric nor asymmetric")
        orbits.append(Orbit(tuple(orb), symmetric))
    return OrbitReport(tuple(orbits))


@dataclass(frozen=True)
class OrbitDiagnostic:
    orbit: Orbit
    descents: int  # |O_+| : alpha > 0, a alpha < 0
    ascents: int   # |O_-| : alpha < 0, a alpha > 0
    meets_S: int   # |S' cap O|


@dataclass(frozen=True)
class ClaimsReport:
    S_size: int
    S_symmetric_size: int
    orbits: tuple[OrbitDiagnostic, ...]
    claim1: bool
    claim2: bool
    balanced: bool

    @property
    def ok(self) -> bool:
        return self.claim1 and self.claim2 and self.balanced


def parity_claims(G: RootDatum, theta: BasedAutomorphism, omega: WeylElement) -> ClaimsReport:
    """Per-orbit parity diagnostics for ``S' = {alpha > 0 : omega theta alpha < 0}``.

    ``claim1``: ``|S'|`` and ``|S'`` restricted to symmetric orbits agree mod 2.
    ``claim2``: every symmetric orbit meets ``S'`` an odd number of times.
    ``balanced``: every orbit has as many descents as ascents.
    """
    a = omega.matrix @ theta.matrix
    perm = G.root_permutation(a)
    S = inversion_set(G, a)
    report = classify_orbits(G, a)
    diags = []
    sym_total = 0
    for orb in report.orbits:
        desc = sum(1 for i in orb.indices if G.positive[i] and not G.positive[perm[i]])
        asc = sum(1 for i in orb.indices if not G.positive[i] and G.positive[perm[i]])
        meets = sum(1 for i in orb.indices if i in S)
        if orb.symmetric:
            sym_total += meets
        diags.append(OrbitDiagnostic(orb, desc, asc, meets))
    claim1 = (len(S) - sym_total) % 2 == 0
    claim2 = all(d.meets_S % 2 == 1 for d in diags if d.orbit.symmetric)
    balanced = all(d.descents == d.ascents for d in diags)
    return ClaimsReport(len(S), sym_total, tuple(diags), claim1, claim2, balanced)


def det_equals_symmetric_parity(G: RootDatum, theta: BasedAutomorphism,
                                omega: WeylElement) -> tuple[int, int, bool]:
    """``(det(omega), (-1)^N, equal)`` with ``N`` the symmetric ``<omega theta>``-orbits."""
    d = determinant(omega.matrix)
    n = classify_orbits(G, omega.matrix @ theta.matrix).n_symmetric
    sign = (-1) ** (n % 2)
    return d, sign, d == sign


@dataclass(frozen=True)
class SignReport:
    eps_relative_rank: int
    det_omega: int
    eps_L: int
    minus_one_to_N: int
    n_symmetric: int

    @property
    def signs(self) -> tuple[int, int, int, int]:
        return (self.eps_relative_rank, self.det_omega, self.eps_L, self.minus_one_to_N)

    @property
    def all_equal(self) -> bool:
        return len(set(self.signs)) == 1


def three_signs(G: RootDatum, theta: BasedAutomorphism, omega: WeylElement) -> SignReport:
    frobenius_twist(G, omega, theta)  # validates finite order and root permutation
    n = classify_orbits(G, omega.matrix @ theta.matrix).n_symmetric
    return SignReport(
        eps_relative_rank=eps_relative_rank(G, theta, omega),
        det_omega=determinant(omega.matrix),
        eps_L=eps_L_unramified(theta, omega),
        minus_one_to_N=(-1) ** (n % 2),
        n_symmetric=n,
    )


# ---------------------------------------------------------------------------
# Residue-field reduction of the Weil index of a symmetric orbit.


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, isqrt(p) + 1))


def least_nonresidue(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return c
    raise EndoscopyError(f"no quadratic non-residue mod {p}")


def norm_counts(p: int) -> list[int]:
    """``counts[t] = #{k in F_{p^2} : N(k) = t}`` with ``F_{p^2} = F_p[x]/(x^2 - c)``."""
    c = least_nonresidue(p)
    counts = [0] * p
    for a in range(p):
        for b in range(p):
            counts[(a * a - c * b * b) % p] += 1
    return counts


def cyclotomic_to_integer(coeffs: Sequence[int]) -> int:
    """Rational integer equal to ``sum_e coeffs[e] zeta_p^e``, ``p = len(coeffs)`` prime.

    The only relation among ``1, zeta, ..., zeta^(p-1)`` is that they sum
    to zero, so the value is rational iff ``coeffs[1:]`` are all equal, and
    then it equals ``coeffs[0] - coeffs[1]``.
    """
    if len(set(coeffs[1:])) > 1:
        raise EndoscopyError("cyclotomic sum is not a rational integer")
    return coeffs[0] - (coeffs[1] if len(coeffs) > 1 else 0)


def gauss_sum_norm(p: int, psi_index: int) -> int:
    """``sum_{k in F_{p^2}} psi(N(k))`` with ``psi(t) = zeta_p^(psi_index t)``, exactly."""
    if p % 2 == 0 or not _is_prime(p) or p > 101:
        raise EndoscopyError(f"p must be an odd prime <= 101, got {p}")
    if psi_index % p == 0:
        raise EndoscopyError("psi_index must be a nonzero residue class")
    coeffs = [0] * p
    for t, n in enumerate(norm_counts(p)):
        coeffs[(psi_index * t) % p] += n
    return cyclotomic_to_integer(coeffs)
