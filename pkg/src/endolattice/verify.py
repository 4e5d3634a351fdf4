"""Exhaustive and randomized verification suites.

Every suite returns a list of :class:`Check` results. A failing check
always carries a concrete counterexample in ``witness``. Case descriptors
are plain strings and tuples so suites can be spread over worker
processes.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .endoscopy import gauss_sum_norm, parity_claims, three_signs
from .galois_cohomology import (
    GammaLattice,
    augmentation,
    coboundary,
    cocycle_from_value,
    coinvariants,
    dr_map,
    fundamental_class,
    h1_lattice,
    invariant_map,
    pairing_cft,
    pairing_cup,
    pairing_matrix_is_perfect,
    pairing_standard,
    tate_h0,
    tate_h_minus1,
    tn_map,
)
from .lattice_core import AbelianElement, IntMatrix, QmodZ, vec_add, vec_neg
from .packets import (
    central_points,
    component_group,
    component_points,
    diagram_commutes,
    kottwitz_sign_check,
    packet_fibers,
    parameter,
    trselp_validate,
    xw_representatives,
)
from .root_datum import based_automorphisms, build_named, weyl_group

SIGN_SYSTEMS = ("A1", "A1xA1", "A2", "B2", "G2", "A3", "B3", "C3")
ISOGENIES = ("sc", "ad")
MAX_RANK = 3
MAX_ORDER = 6
MAX_PRIME = 101
SUITES = ("signs", "claims", "gauss", "pairings", "anticom", "invariant", "diagram")
MAX_WITNESSES = 5


@dataclass
class Check:
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": to_exact(self.witness)}


def to_exact(x: Any) -> Any:
    """JSON-ready copy with rationals as ``"num/den"`` strings, never floats."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, QmodZ):
        return str(x)
    if isinstance(x, AbelianElement):
        return list(x.coords)
    if isinstance(x, IntMatrix):
        return x.to_rows()
    if isinstance(x, dict):
        return {str(k): to_exact(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_exact(v) for v in x]
    if isinstance(x, float):
        raise TypeError("floats are not allowed in reports")
    return str(x)


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class _Tally:
    """Counts cases and keeps the first few counterexamples."""

    def __init__(self):
        self.cases = 0
        self.failures: list[dict] = []
        self.n_failed = 0

    def record(self, ok: bool, witness: Callable[[], dict]) -> None:
        self.cases += 1
        if not ok:
            self.n_failed += 1
            if len(self.failures) < MAX_WITNESSES:
                self.failures.append(witness())

    def check(self, name: str, **extra) -> Check:
        w = {"cases": self.cases, **extra}
        if self.n_failed:
            w["failed"] = self.n_failed
            w["counterexamples"] = self.failures
        return Check(name, self.n_failed == 0 and self.cases > 0, w)


# ---------------------------------------------------------------------------
# Catalogs


def sign_catalog(max_rank: int = MAX_RANK) -> list[str]:
    """Datum strings for the exhaustive sign suites, both isogeny types."""
    out = []
    for system in SIGN_SYSTEMS:
        factors = system.split("x")
        rank = sum(int(f[1:]) for f in factors)
        if rank > max_rank:
            continue
        for iso in ISOGENIES:
            out.append(" x ".join(f"{f}:{iso}" for f in factors))
    return out


def signed_permutation_matrices(n: int) -> list[IntMatrix]:
    mats = []
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            rows = [[0] * n for _ in range(n)]
            for j, (i, s) in enumerate(zip(perm, signs)):
                rows[i][j] = s
            mats.append(IntMatrix.from_rows(rows))
    return mats


def signed_permutation_lattices(max_rank: int = MAX_RANK, max_order: int = MAX_ORDER) -> list[GammaLattice]:
    """Every signed permutation action of rank <= max_rank, with every declared
    order m <= max_order that the action's order divides."""
    out = []
    for n in range(1, max_rank + 1):
        for s in signed_permutation_matrices(n):
            k = s.order()
            for m in range(k, max_order + 1, k):
                out.append(GammaLattice(s, m))
    return out


def random_unimodular(n: int, rng: random.Random, steps: int = 6) -> IntMatrix:
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n == 1:
            rows[0][0] *= rng.choice((1, -1))
            continue
        i, j = rng.sample(range(n), 2)
        k = rng.choice((-2, -1, 1, 2))
        rows[i] = [a + k * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix.from_rows(rows)


def random_conjugates(count: int, seed: int, max_rank: int = MAX_RANK,
                      max_order: int = MAX_ORDER) -> list[GammaLattice]:
    rng = random.Random(seed)
    base = signed_permutation_lattices(max_rank, max_order)
    out = []
    for _ in range(count):
        M = rng.choice(base)
        g = random_unimodular(M.rank, rng)
        out.append(GammaLattice(g @ M.sigma @ g.inverse(), M.m))
    return out


def lattice_catalog(max_rank: int, max_order: int, seed: int, n_random: int) -> list[GammaLattice]:
    return signed_permutation_lattices(max_rank, max_order) + random_conjugates(n_random, seed, max_rank, max_order)


def _lattice_key(M: GammaLattice) -> dict:
    return {"sigma": M.sigma.to_rows(), "m": M.m}


# ---------------------------------------------------------------------------
# Sign suites


def _sign_case(name: str) -> tuple[str, int, list[dict], list[dict]]:
    G = build_named(name)
    W = weyl_group(G)
    sign_fail, det_fail = [], []
    n = 0
    for theta in based_automorphisms(G):
        for w in W:
            n += 1
            rep = three_signs(G, theta, w)
            if not rep.all_equal:
                sign_fail.append({"theta": theta.simple_permutation, "omega": w.word, "signs": rep.signs,
                                  "N": rep.n_symmetric})
            if rep.det_omega != rep.minus_one_to_N:
                det_fail.append({"theta": theta.simple_permutation, "omega": w.word,
                                 "det": rep.det_omega, "N": rep.n_symmetric})
    return name, n, sign_fail, det_fail


def suite_signs(max_rank: int = MAX_RANK, jobs: int = 1) -> list[Check]:
    checks = []
    for name, n, sign_fail, det_fail in _map(_sign_case, sign_catalog(max_rank), jobs):
        checks.append(Check(f"signs[{name}]", not sign_fail and n > 0,
                            {"cases": n, **({"counterexamples": sign_fail[:MAX_WITNESSES]} if sign_fail else {})}))
        checks.append(Check(f"det_parity[{name}]", not det_fail and n > 0,
                            {"cases": n, **({"counterexamples": det_fail[:MAX_WITNESSES]} if det_fail else {})}))
    return checks


def _claims_case(name: str) -> tuple[str, int, list[dict]]:
    G = build_named(name)
    fails = []
    n = 0
    for theta in based_automorphisms(G):
        for w in weyl_group(G):
            n += 1
            rep = parity_claims(G, theta, w)
            if not rep.ok:
                fails.append({"theta": theta.simple_permutation, "omega": w.word,
                              "claim1": rep.claim1, "claim2": rep.claim2, "balanced": rep.balanced,
                              "per_orbit": [(d.orbit.indices, d.orbit.symmetric, d.meets_S) for d in rep.orbits]})
    return name, n, fails


def suite_claims(max_rank: int = MAX_RANK, jobs: int = 1) -> list[Check]:
    out = []
    for name, n, fails in _map(_claims_case, sign_catalog(max_rank), jobs):
        w = {"cases": n}
        if fails:
            w["counterexamples"] = fails[:MAX_WITNESSES]
        out.append(Check(f"claims[{name}]", not fails and n > 0, w))
    return out


def suite_gauss(primes: Iterable[int] = (3, 5, 7, 11, 13)) -> list[Check]:
    out = []
    for p in primes:
        values = {j: gauss_sum_norm(p, j) for j in range(1, p)}
        bad = {j: v for j, v in values.items() if v != -p}
        out.append(Check(f"gauss[p={p}]", not bad, {"p": p, "values": sorted(set(values.values())),
                                                    **({"counterexamples": bad} if bad else {})}))
    return out


# ---------------------------------------------------------------------------
# Cohomology suites


def _class_reps(M: GammaLattice):
    left = h1_lattice(M)
    right = tate_h_minus1(M.dual())
    return [left.lift(e) for e in left.group.elements()], [right.lift(e) for e in right.group.elements()]


def _pairings_case(args) -> dict:
    sigma_rows, m, seed = args
    M = GammaLattice(IntMatrix.from_rows(sigma_rows), m)
    D = M.dual()
    rng = random.Random(seed)
    cs, mus = _class_reps(M)
    res = {"equal": [0, []], "well_defined": [0, []], "functorial": [0, []], "perfect": [0, []]}

    def rec(key, ok, wit):
        res[key][0] += 1
        if not ok and len(res[key][1]) < MAX_WITNESSES:
            res[key][1].append({**_lattice_key(M), **wit})

    aug, daug = augmentation(M), augmentation(D)
    endos = [M.sigma, M.sigma + IntMatrix.identity(M.rank), M.sigma @ M.sigma - M.sigma.scale(2)]
    for c in cs:
        for mu in mus:
            v1, v2, v3 = pairing_standard(M, c, mu), pairing_cup(M, c, mu), pairing_cft(M, c, mu)
            rec("equal", v1 == v2 == v3, {"c": c, "mu": mu, "standard": v1, "cup": v2, "cft": v3})
            nu = tuple(rng.randint(-3, 3) for _ in range(M.rank))
            xi = tuple(rng.randint(-3, 3) for _ in range(M.rank))
            c2 = vec_add(c, aug.apply(nu))
            mu2 = vec_add(mu, daug.apply(xi))
            shifted = (pairing_standard(M, c2, mu2), pairing_cup(M, c2, mu2), pairing_cft(M, c2, mu2))
            rec("well_defined", all(s == v1 for s in shifted), {"c": c, "mu": mu, "nu": nu, "xi": xi,
                                                                "shifted": shifted, "value": v1})
            for f in endos:
                lhs = pairing_cup(M, f.apply(c), mu)
                rhs = pairing_cup(M, c, f.T.apply(mu))
                rec("functorial", lhs == rhs, {"c": c, "mu": mu, "f": f, "lhs": lhs, "rhs": rhs})
    perfect = pairing_matrix_is_perfect(M) and len(cs) == len(mus)
    rec("perfect", perfect, {"h1_order": len(cs), "h_minus1_dual_order": len(mus)})
    return res


def suite_pairings(max_rank: int = MAX_RANK, max_order: int = MAX_ORDER, seed: int = 0,
                   n_random: int = 200, jobs: int = 1) -> list[Check]:
    lattices = lattice_catalog(max_rank, max_order, seed, n_random)
    args = [(M.sigma.to_rows(), M.m, seed * 100003 + i) for i, M in enumerate(lattices)]
    results = _map(_pairings_case, args, jobs)
    checks = []
    for key in ("equal", "well_defined", "functorial", "perfect"):
        n = sum(r[key][0] for r in results)
        fails = [w for r in results for w in r[key][1]]
        wit = {"cases": n, "lattices": len(lattices)}
        if fails:
            wit["counterexamples"] = fails[:MAX_WITNESSES]
        checks.append(Check(f"pairings.{key}", not fails and n > 0, wit))
    checks.extend(_induced_and_trivial(max_order))
    return checks


def regular_representation(m: int) -> GammaLattice:
    """``Z[Z/m]`` with sigma the cyclic shift."""
    rows = [[int(i == (j + 1) % m) for j in range(m)] for i in range(m)]
    return GammaLattice(IntMatrix.from_rows(rows), m)


def _induced_and_trivial(max_order: int) -> list[Check]:
    t = _Tally()
    for m in range(1, max_order + 1):
        R = regular_representation(m)
        ok = tate_h_minus1(R).group.order == 1 and tate_h0(R).group.order == 1
        t.record(ok, lambda: {"m": m, "module": "regular"})
        T = GammaLattice(IntMatrix.identity(1), m)
        h0 = tate_h0(T).group
        ok = h0.invariant_factors == ((m,) if m > 1 else ()) and tate_h_minus1(T).group.order == 1
        t.record(ok, lambda: {"m": m, "module": "trivial", "H0": str(h0)})
    return [t.check("cohomology.induced_and_trivial")]


def _anticom_case(args) -> dict:
    sigma_rows, m = args
    M = GammaLattice(IntMatrix.from_rows(sigma_rows), m)
    co = coinvariants(M)
    res = {"anticom": [0, []], "normalization": [0, []], "tn_dr_iso": [0, []]}
    images_dr, images_tn = set(), set()
    for lam in co.torsion_classes():
        dr = dr_map(M, lam)
        tn_neg = tn_map(M, vec_neg(lam))
        res["anticom"][0] += 1
        if dr != tn_neg and len(res["anticom"][1]) < MAX_WITNESSES:
            res["anticom"][1].append({**_lattice_key(M), "lambda": lam, "dr": dr.element, "tn_neg": tn_neg.element})
        z_fi = cocycle_from_value(M, "Fi", lam)
        expected = vec_neg(M.sigma.apply(lam))
        res["normalization"][0] += 1
        if z_fi(1) != expected and len(res["normalization"][1]) < MAX_WITNESSES:
            res["normalization"][1].append({**_lattice_key(M), "lambda": lam, "z_sigma": z_fi(1)})
        images_dr.add(dr.element)
        images_tn.add(tn_map(M, lam).element)
    n = co.torsion.order
    res["tn_dr_iso"][0] += 1
    if not (len(images_dr) == len(images_tn) == n == tate_h_minus1(M).group.order):
        res["tn_dr_iso"][1].append({**_lattice_key(M), "torsion": n, "dr_images": len(images_dr),
                                    "tn_images": len(images_tn)})
    return res


def suite_anticom(max_rank: int = MAX_RANK, max_order: int = MAX_ORDER, seed: int = 0,
                  n_random: int = 200, jobs: int = 1) -> list[Check]:
    lattices = lattice_catalog(max_rank, max_order, seed, n_random)
    results = _map(_anticom_case, [(M.sigma.to_rows(), M.m) for M in lattices], jobs)
    checks = []
    for key in ("anticom", "normalization", "tn_dr_iso"):
        n = sum(r[key][0] for r in results)
        fails = [w for r in results for w in r[key][1]]
        wit = {"cases": n, "lattices": len(lattices)}
        if fails:
            wit["counterexamples"] = fails[:MAX_WITNESSES]
        checks.append(Check(f"anticom.{key}", not fails and n > 0, wit))
    return checks


def suite_invariant(max_order: int = MAX_ORDER, seed: int = 0, n_random: int = 1000) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for m in range(1, max_order + 1):
        fc = invariant_map(fundamental_class(m), m)
        checks.append(Check(f"invariant.fundamental[m={m}]", fc == QmodZ(1, m), {"m": m, "inv": fc}))
        t = _Tally()
        for _ in range(n_random):
            g = [rng.randint(-50, 50) for _ in range(m)]
            v = invariant_map(coboundary(g), m)
            t.record(v.is_zero(), lambda: {"m": m, "cochain": g, "inv": v})
        checks.append(t.check(f"invariant.coboundary[m={m}]"))
    return checks


# ---------------------------------------------------------------------------
# Parameter diagram and the Kottwitz sign


def _diagram_case(name: str) -> dict:
    G = build_named(name)
    W = weyl_group(G)
    res = {k: [0, []] for k in ("diagram", "order", "fibers", "kottwitz_dr")}
    tn_failures = 0
    trselp = 0
    for theta in based_automorphisms(G):
        for w in W:
            pc = parameter(G, w, theta)
            if not trselp_validate(pc).ok:
                continue
            trselp += 1
            key = {"datum": name, "theta": theta.simple_permutation, "w": w.word}

            def rec(k, ok, wit):
                res[k][0] += 1
                if not ok and len(res[k][1]) < MAX_WITNESSES:
                    res[k][1].append({**key, **wit})

            tor = pc.coinvariants().torsion
            try:
                cg = component_group(pc).group
                rec("order", True, {})
            except ValueError as exc:
                rec("order", False, {"error": str(exc)})
                continue
            fibers = packet_fibers(pc)
            sizes = {len(f) for f in fibers.values() if f}
            rec("fibers", len(sizes) <= 1 and sum(len(f) for f in fibers.values()) == tor.order,
                {"sizes": sorted(sizes), "C_phi": str(cg)})
            reps = xw_representatives(pc)
            for lam in reps:
                for t in central_points(pc):
                    rec("diagram", diagram_commutes(pc, lam, t), {"lambda": lam, "r": t.r})
                for t in component_points(pc):
                    rec("kottwitz_dr", kottwitz_sign_check(pc, lam, t, "DR"), {"lambda": lam, "r": t.r})
                    if not kottwitz_sign_check(pc, lam, t, "TN"):
                        tn_failures += 1
    res["tn_failures"] = tn_failures
    res["trselp"] = trselp
    return res


def suite_diagram(max_rank: int = MAX_RANK, jobs: int = 1) -> list[Check]:
    names = sign_catalog(max_rank)
    results = _map(_diagram_case, names, jobs)
    checks = []
    for key, label in (("order", "diagram.component_order"), ("fibers", "diagram.fibers"),
                       ("diagram", "diagram.commutes"), ("kottwitz_dr", "kottwitz.dr_passes")):
        n = sum(r[key][0] for r in results)
        fails = [w for r in results for w in r[key][1]]
        wit = {"cases": n, "trselp_parameters": sum(r["trselp"] for r in results)}
        if fails:
            wit["counterexamples"] = fails[:MAX_WITNESSES]
        checks.append(Check(label, not fails and n > 0, wit))
    tn = sum(r["tn_failures"] for r in results)
    checks.append(Check("kottwitz.tn_fails_somewhere", tn > 0, {"tn_failures": tn}))
    return checks


def run_suite(suite: str, max_rank: int = MAX_RANK, max_order: int = MAX_ORDER,
              primes: Sequence[int] = (3, 5, 7, 11, 13), seed: int = 0, jobs: int = 1,
              n_random: int = 200, n_coboundaries: int = 1000) -> list[Check]:
    if max_rank > MAX_RANK or max_rank < 1:
        raise ValueError(f"--max-rank must be in 1..{MAX_RANK}")
    if max_order > MAX_ORDER or max_order < 1:
        raise ValueError(f"--max-order must be in 1..{MAX_ORDER}")
    if any(p > MAX_PRIME for p in primes):
        raise ValueError(f"primes must be <= {MAX_PRIME}")
    if suite == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, max_rank, max_order, primes, seed, jobs, n_random, n_coboundaries))
        return out
    if suite == "signs":
        return suite_signs(max_rank, jobs)
    if suite == "claims":
        return suite_claims(max_rank, jobs)
    if suite == "gauss":
        return suite_gauss(primes)
    if suite == "pairings":
        return suite_pairings(max_rank, max_order, seed, n_random, jobs)
    if suite == "anticom":
        return suite_anticom(max_rank, max_order, seed, n_random, jobs)
    if suite == "invariant":
        return suite_invariant(max_order, seed, n_coboundaries)
    if suite == "diagram":
        return suite_diagram(max_rank, jobs)
    raise ValueError(f"unknown suite {suite!r}")
