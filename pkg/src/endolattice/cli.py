"""Command line front end.

Exit codes: 0 when every check passes, 1 when some check fails (the report
carries a witness), 2 on malformed or invalid input.

Reports are JSON objects ``{"header": ..., "body": ...}``. The header holds
the timestamp and tool version; the body is a deterministic function of the
input and flags, serialised with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .endoscopy import (
    EndoscopyError,
    classify_orbits,
    endoscopic_subsystem,
    is_elliptic,
    parity_claims,
    three_signs,
    validate_gamma_fixed,
)
from .galois_cohomology import (
    CohomologyError,
    GammaLattice,
    coinvariants,
    h1_lattice,
    pairing_cft,
    pairing_cup,
    pairing_matrix_is_perfect,
    pairing_standard,
    tate_h0,
    tate_h_minus1,
)
from .lattice_core import IntMatrix
from .packets import (
    PacketError,
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
from .root_datum import (
    RootDatum,
    RootDatumError,
    automorphism_from_permutation,
    based_automorphism,
    build_named,
    datum_from_simple,
    identity_automorphism,
    weyl_from_word,
    weyl_order_of_type,
)
from .verify import MAX_ORDER, MAX_PRIME, MAX_RANK, SUITES, Check, run_suite, to_exact

log = logging.getLogger("endolattice")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SCHEMA_VERSION = 1


class InputError(ValueError):
    """Malformed or invalid input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Input parsing

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+))?\s*$")


def _locate(source: str | None, literal: str) -> str:
    """``line:col`` of the first JSON string literal equal to ``literal``."""
    if not source:
        return ""
    idx = source.find(json.dumps(literal))
    if idx < 0:
        return ""
    line = source.count("\n", 0, idx) + 1
    col = idx - (source.rfind("\n", 0, idx) + 1) + 1
    return f"{line}:{col}: "


def parse_rational(value: Any, where: str, source: str | None = None) -> Fraction:
    """An int or a ``"num/den"`` string. Floats are rejected to keep inputs exact."""
    if isinstance(value, bool):
        raise InputError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"{where}: expected an integer or a \"num/den\" string, got {value!r}")
    m = _RATIONAL.match(value)
    if not m:
        raise InputError(f"{_locate(source, value)}{where}: malformed rational {value!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        col = value.index("/") + 2
        raise InputError(f"{_locate(source, value)}{where}: zero denominator in {value!r} "
                         f"(character {col})")
    return Fraction(num, den)


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where}: expected an integer, got {value!r}")
    return value


def _int_list(value: Any, where: str) -> list[int]:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list of integers")
    return [_int(x, f"{where}[{i}]") for i, x in enumerate(value)]


def _int_matrix(value: Any, where: str) -> list[list[int]]:
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: expected a non-empty list of rows")
    rows = [_int_list(r, f"{where}[{i}]") for i, r in enumerate(value)]
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"{where}: rows have different lengths")
    return rows


@dataclass
class LatticeJob:
    sigma: list[list[int]]
    m: int


@dataclass
class InputSpec:
    version: int
    datum: Any
    theta: Any = None
    omega: list[int] = field(default_factory=list)
    w: list[int] | None = None
    q: list[Fraction] | None = None
    m_override: int | None = None
    lattice_jobs: list[LatticeJob] = field(default_factory=list)

    def echo(self) -> dict:
        out: dict[str, Any] = {"version": self.version, "datum": self.datum, "theta": self.theta,
                               "omega": self.omega, "w": self.w if self.w is not None else self.omega}
        if self.q is not None:
            out["q"] = self.q
        if self.m_override is not None:
            out["m_override"] = self.m_override
        if self.lattice_jobs:
            out["lattice_jobs"] = [{"sigma": j.sigma, "m": j.m} for j in self.lattice_jobs]
        return to_exact(out)


_KNOWN_KEYS = {"version", "datum", "theta", "omega", "w", "q", "m_override", "lattice_jobs", "comment"}


def parse_input(data: Any, source: str | None = None) -> InputSpec:
    if not isinstance(data, dict):
        raise InputError("top level must be a JSON object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise InputError(f"unknown field(s): {', '.join(unknown)}")
    if "version" not in data:
        raise InputError("missing required field \"version\"")
    if data["version"] != SCHEMA_VERSION:
        raise InputError(f"unsupported version {data['version']!r}; expected {SCHEMA_VERSION}")
    if "datum" not in data:
        raise InputError("missing required field \"datum\"")
    datum = data["datum"]
    if isinstance(datum, dict):
        for key in ("rank", "simple_roots", "simple_coroots"):
            if key not in datum:
                raise InputError(f"datum: missing {key!r}")
        _int(datum["rank"], "datum.rank")
        _int_matrix(datum["simple_roots"], "datum.simple_roots")
        _int_matrix(datum["simple_coroots"], "datum.simple_coroots")
    elif not isinstance(datum, str):
        raise InputError("datum: expected a catalog name or {rank, simple_roots, simple_coroots}")
    theta = data.get("theta")
    if isinstance(theta, dict):
        if set(theta) != {"matrix"}:
            raise InputError("theta: expected {\"matrix\": [[...], ...]}")
        _int_matrix(theta["matrix"], "theta.matrix")
    elif theta is not None:
        _int_list(theta, "theta")
    spec = InputSpec(version=SCHEMA_VERSION, datum=datum, theta=theta)
    spec.omega = _int_list(data.get("omega", []), "omega")
    if data.get("w") is not None:
        spec.w = _int_list(data["w"], "w")
    if data.get("q") is not None:
        if not isinstance(data["q"], list):
            raise InputError("q: expected a list of rationals")
        spec.q = [parse_rational(x, f"q[{i}]", source) for i, x in enumerate(data["q"])]
    if data.get("m_override") is not None:
        spec.m_override = _int(data["m_override"], "m_override")
        if spec.m_override < 1:
            raise InputError("m_override: must be positive")
    jobs = data.get("lattice_jobs", [])
    if not isinstance(jobs, list):
        raise InputError("lattice_jobs: expected a list")
    for i, job in enumerate(jobs):
        if not isinstance(job, dict) or "sigma" not in job or "m" not in job:
            raise InputError(f"lattice_jobs[{i}]: expected {{\"sigma\": [[...]], \"m\": int}}")
        spec.lattice_jobs.append(LatticeJob(_int_matrix(job["sigma"], f"lattice_jobs[{i}].sigma"),
                                            _int(job["m"], f"lattice_jobs[{i}].m")))
    return spec


def load_input(path: str) -> InputSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    try:
        return parse_input(data, source)
    except InputError as exc:
        raise InputError(f"{path}:{exc}") from None


def build_datum(spec: InputSpec) -> RootDatum:
    d = spec.datum
    if isinstance(d, str):
        return build_named(d)
    return datum_from_simple(d["simple_roots"], d["simple_coroots"], d["rank"], "explicit")


def build_theta(G: RootDatum, theta):
    if theta is None:
        return identity_automorphism(G)
    if isinstance(theta, dict):
        return based_automorphism(G, IntMatrix.from_rows(theta["matrix"]))
    return automorphism_from_permutation(G, theta)


# ---------------------------------------------------------------------------
# Reports


def make_report(command: str, echo: dict, checks: list[Check], results: dict | None = None) -> dict:
    ordered = sorted(checks, key=lambda c: c.name)
    failed = [c.name for c in ordered if not c.passed]
    body = {
        "command": command,
        "input": echo,
        "checks": [c.to_json() for c in ordered],
        "summary": {"total": len(ordered), "passed": len(ordered) - len(failed),
                    "failed": len(failed), "failed_checks": failed},
    }
    if results is not None:
        body["results"] = to_exact(results)
    header = {"tool": "endolattice", "version": __version__,
              "generated": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return {"header": header, "body": body}


def dump_body(report: dict) -> str:
    """Canonical serialisation of the deterministic part of a report."""
    return json.dumps(report["body"], sort_keys=True, separators=(",", ":"))


def write_report(report: dict, path: str | None) -> None:
    if not path:
        return
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _short(witness: dict, limit: int = 100) -> str:
    text = json.dumps(to_exact(witness), sort_keys=True)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def print_checks(checks: Sequence[Check], out) -> None:
    for c in sorted(checks, key=lambda c: c.name):
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {_short(c.witness)}", file=out)
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed", file=out)


# ---------------------------------------------------------------------------
# analyze


def analyze(spec: InputSpec) -> tuple[list[Check], dict]:
    """Run every analysis the input supports; raise InputError on invalid data."""
    try:
        G = build_datum(spec)
        theta = build_theta(G, spec.theta)
        omega = weyl_from_word(G, spec.omega)
        w = weyl_from_word(G, spec.w if spec.w is not None else spec.omega)
    except (RootDatumError, ValueError) as exc:
        raise InputError(str(exc)) from None
    checks: list[Check] = []
    results: dict[str, Any] = {"datum": {"name": G.name, "rank": G.rank, "roots": len(G.roots),
                                         "cartan": G.cartan_matrix()},
                               "theta": {"simple_permutation": theta.simple_permutation, "order": theta.order}}

    a = omega.matrix @ theta.matrix
    try:
        signs = three_signs(G, theta, omega)
    except (RootDatumError, ValueError) as exc:
        raise InputError(str(exc)) from None
    sign_w = {"eps_relative_rank": signs.eps_relative_rank, "det_omega": signs.det_omega,
              "eps_L": signs.eps_L, "minus_one_to_N": signs.minus_one_to_N, "N": signs.n_symmetric}
    results["signs"] = sign_w
    checks.append(Check("three_signs", signs.all_equal, sign_w))
    checks.append(Check("det_parity", signs.det_omega == signs.minus_one_to_N,
                        {"det_omega": signs.det_omega, "N": signs.n_symmetric}))
    orbits = classify_orbits(G, a)
    results["orbits"] = [{"roots": [G.roots[i] for i in o.indices], "symmetric": o.symmetric}
                         for o in orbits.orbits]
    claims = parity_claims(G, theta, omega)
    checks.append(Check("parity_claims", claims.ok,
                        {"S": claims.S_size, "S_symmetric": claims.S_symmetric_size,
                         "claim1": claims.claim1, "claim2": claims.claim2, "balanced": claims.balanced}))

    if spec.q is not None:
        try:
            ed = endoscopic_subsystem(G, spec.q, omega, theta)
        except EndoscopyError as exc:
            raise InputError(str(exc)) from None
        fixed = validate_gamma_fixed(ed)
        results["endoscopy"] = {"q": list(ed.q.q), "order": ed.q.order, "h_roots": len(ed.h_indices),
                                "h_simple_roots": ed.h_datum.simple_roots,
                                "gamma_fixed": fixed, "elliptic": is_elliptic(ed) if fixed else None}
        checks.append(Check("gamma_fixed", fixed, {"q": list(ed.q.q), "twist": a}))

    try:
        pc = parameter(G, w, theta, spec.m_override)
    except (PacketError, RootDatumError) as exc:
        raise InputError(str(exc)) from None
    tr = trselp_validate(pc)
    co = pc.coinvariants()
    packet: dict[str, Any] = {"w": w.word, "m": pc.m, "trselp": tr.ok,
                              "X_Gamma": str(co.group), "X_Gamma_torsion": str(co.torsion),
                              "Xbar_Gamma": str(pc.central_coinvariants().group)}
    if not tr.ok:
        packet["trselp_offending_vector"] = tr.offending
        log.warning("parameter is not TRSELP: fixed vector %s pairs with a root", tr.offending)
    try:
        cg = component_group(pc)
        packet["C_phi"] = str(cg.group)
        packet["C_phi_order"] = cg.group.order
        checks.append(Check("component_group_order", True,
                            {"C_phi": cg.group.order, "X_Gamma_torsion": co.torsion.order}))
    except PacketError as exc:
        checks.append(Check("component_group_order", False, {"error": str(exc)}))
        cg = None
    fibers = packet_fibers(pc)
    packet["packet_size"] = co.torsion.order
    packet["fibers"] = [{"u": u.coords, "members": [e.coords for e in members]}
                        for u, members in sorted(fibers.items(), key=lambda kv: kv[0].coords)]
    sizes = sorted({len(v) for v in fibers.values()})
    checks.append(Check("fibers_equal_size", len(sizes) == 1, {"sizes": sizes}))
    reps = xw_representatives(pc)
    bad = [(lam, t.r) for lam in reps for t in central_points(pc) if not diagram_commutes(pc, lam, t)]
    checks.append(Check("diagram_commutes", not bad, {"cases": len(reps), "counterexamples": bad[:5]}
                        if bad else {"cases": len(reps)}))
    if cg is not None:
        pts = component_points(pc)
        bad = [(lam, t.r) for lam in reps for t in pts if not kottwitz_sign_check(pc, lam, t, "DR")]
        checks.append(Check("kottwitz_sign_dr", not bad,
                            {"cases": len(reps) * len(pts), **({"counterexamples": bad[:5]} if bad else {})}))
    results["packet"] = packet

    jobs_out = []
    for i, job in enumerate(spec.lattice_jobs):
        try:
            M = GammaLattice(IntMatrix.from_rows(job.sigma), job.m)
        except (CohomologyError, ValueError) as exc:
            raise InputError(f"lattice_jobs[{i}]: {exc}") from None
        jobs_out.append(_lattice_job(M, i, checks))
    if jobs_out:
        results["lattice_jobs"] = jobs_out
    return checks, results


def _lattice_job(M: GammaLattice, i: int, checks: list[Check]) -> dict:
    left, right = h1_lattice(M), tate_h_minus1(M.dual())
    bad = []
    pairs = 0
    for e in left.group.elements():
        for f in right.group.elements():
            c, mu = left.lift(e), right.lift(f)
            vals = (pairing_standard(M, c, mu), pairing_cup(M, c, mu), pairing_cft(M, c, mu))
            pairs += 1
            if len(set(vals)) != 1:
                bad.append({"c": c, "mu": mu, "standard": vals[0], "cup": vals[1], "cft": vals[2]})
    checks.append(Check(f"lattice_jobs[{i}].pairings_equal", not bad,
                        {"pairs": pairs, **({"counterexamples": bad[:5]} if bad else {})}))
    checks.append(Check(f"lattice_jobs[{i}].perfect", pairing_matrix_is_perfect(M),
                        {"H1": left.group.order, "H_minus1_dual": right.group.order}))
    return {"H_minus1": str(tate_h_minus1(M).group), "H0": str(tate_h0(M).group),
            "coinvariants": str(coinvariants(M).group), "H1": str(left.group)}


def cmd_analyze(args) -> int:
    spec = load_input(args.file)
    checks, results = analyze(spec)
    report = make_report("analyze", spec.echo(), checks, results)
    out = sys.stdout if args.json != "-" else sys.stderr
    r = results
    s = r["signs"]
    print(f"datum {r['datum']['name']}  rank {r['datum']['rank']}  roots {r['datum']['roots']}", file=out)
    print(f"signs: eps_rel={s['eps_relative_rank']} det={s['det_omega']} eps_L={s['eps_L']} "
          f"(-1)^N={s['minus_one_to_N']} (N={s['N']})", file=out)
    if "endoscopy" in r:
        e = r["endoscopy"]
        print(f"endoscopy: |R_H|={e['h_roots']} gamma_fixed={e['gamma_fixed']} elliptic={e['elliptic']}",
              file=out)
    p = r["packet"]
    print(f"packet: m={p['m']} trselp={p['trselp']} C_phi={p.get('C_phi', '?')} "
          f"size={p['packet_size']} fibers={len(p['fibers'])} "
          f"sizes={[len(f['members']) for f in p['fibers']]}", file=out)
    print_checks(checks, out)
    write_report(report, args.json)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify and catalog


def _primes(text: str) -> list[int]:
    try:
        primes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed prime list {text!r}") from None
    if not primes:
        raise argparse.ArgumentTypeError("empty prime list")
    return primes


def cmd_verify(args) -> int:
    if not 1 <= args.max_rank <= MAX_RANK:
        raise InputError(f"--max-rank must be in 1..{MAX_RANK}")
    if not 1 <= args.max_order <= MAX_ORDER:
        raise InputError(f"--max-order must be in 1..{MAX_ORDER}")
    for p in args.primes:
        if p > MAX_PRIME:
            raise InputError(f"--primes: {p} exceeds {MAX_PRIME}")
    try:
        checks = run_suite(args.suite, args.max_rank, args.max_order, args.primes, args.seed,
                           args.jobs, args.random_lattices, args.coboundaries)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    echo = {"suite": args.suite, "max_rank": args.max_rank, "max_order": args.max_order,
            "primes": args.primes, "seed": args.seed, "random_lattices": args.random_lattices,
            "coboundaries": args.coboundaries}
    report = make_report("verify", echo, checks)
    out = sys.stdout if args.json != "-" else sys.stderr
    print_checks(checks, out)
    write_report(report, args.json)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


_CATALOG_TYPES = ([("A", n) for n in range(1, 9)] + [("B", n) for n in range(2, 9)]
                  + [("C", n) for n in range(3, 9)] + [("D", n) for n in range(4, 9)]
                  + [("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)])
_TRIVIAL_CENTRE = {("E", 8), ("F", 4), ("G", 2)}


def catalog_entries() -> list[tuple[str, int, int]]:
    """``(name, rank, |W|)`` for every built-in simple type, in a fixed order."""
    out = []
    for letter, n in _CATALOG_TYPES:
        order = weyl_order_of_type(letter, n)
        if (letter, n) in _TRIVIAL_CENTRE:
            out.append((f"{letter}{n}", n, order))
        else:
            out.extend((f"{letter}{n}:{iso}", n, order) for iso in ("sc", "ad"))
    return out


def cmd_catalog(args) -> int:
    needle = (args.filter or "").lower()
    for name, rank, order in catalog_entries():
        if needle in name.lower():
            print(f"{name:8s} rank={rank} |W|={order}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="endolattice", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyse one input spec file")
    p.add_argument("file")
    p.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--max-rank", type=int, default=MAX_RANK)
    p.add_argument("--max-order", type=int, default=MAX_ORDER)
    p.add_argument("--primes", type=_primes, default=[3, 5, 7, 11, 13])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--random-lattices", type=int, default=200,
                   help="random unimodular conjugates added to the lattice catalog")
    p.add_argument("--coboundaries", type=int, default=1000, help="random coboundaries per m")
    p.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list built-in root data")
    p.add_argument("--filter", default="", help="case-insensitive substring")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
