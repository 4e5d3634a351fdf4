import json
from pathlib import Path

import pytest

from endolattice.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, InputError, catalog_entries, main, parse_rational
from endolattice.root_datum import build_named, weyl_group

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def write(tmp_path, data, name="spec.json"):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
    return str(p)


def no_floats(x):
    if isinstance(x, float):
        return False
    if isinstance(x, dict):
        return all(no_floats(v) for v in x.values())
    if isinstance(x, list):
        return all(no_floats(v) for v in x)
    return True


def run_json(args, tmp_path):
    out = tmp_path / "report.json"
    code = main([*args, "--json", str(out)])
    return code, json.loads(out.read_text())


def test_sl2_elliptic_sample(tmp_path):
    code, report = run_json(["analyze", str(SAMPLES / "sl2_elliptic.json")], tmp_path)
    assert code == EXIT_OK
    body = report["body"]
    assert set(body["results"]["signs"].values()) == {-1, 1}  # N = 1 is the only +1 entry
    assert [body["results"]["signs"][k] for k in ("eps_relative_rank", "det_omega", "eps_L",
                                                   "minus_one_to_N")] == [-1, -1, -1, -1]
    packet = body["results"]["packet"]
    assert packet["C_phi"] == "Z/2"
    assert packet["packet_size"] == 2
    assert len(packet["fibers"]) == 1
    assert body["results"]["endoscopy"]["elliptic"] is True
    assert body["summary"]["failed"] == 0


def test_pgl2_sample_has_two_fibers(tmp_path):
    code, report = run_json(["analyze", str(SAMPLES / "pgl2_elliptic.json")], tmp_path)
    assert code == EXIT_OK
    packet = report["body"]["results"]["packet"]
    assert packet["C_phi"] == "Z/2"
    assert [len(f["members"]) for f in packet["fibers"]] == [1, 1]
    assert set(report["body"]["results"]["signs"].values()) <= {-1, 1}


def test_identity_omega_gives_plus_signs(tmp_path):
    code, report = run_json(["analyze", str(SAMPLES / "a2_split.json")], tmp_path)
    assert code == EXIT_OK
    s = report["body"]["results"]["signs"]
    assert [s[k] for k in ("eps_relative_rank", "det_omega", "eps_L", "minus_one_to_N")] == [1, 1, 1, 1]


def test_zero_denominator_reports_position(capsys):
    code = main(["analyze", str(SAMPLES / "bad_rational.json")])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT
    assert "bad_rational.json:5:9" in err and "zero denominator" in err and "q[0]" in err


@pytest.mark.parametrize("data,fragment", [
    ("{not json", "invalid JSON"),
    ({"datum": "A1"}, "version"),
    ({"version": 2, "datum": "A1"}, "unsupported version"),
    ({"version": 1}, "datum"),
    ({"version": 1, "datum": "Q7"}, "Q7"),
    ({"version": 1, "datum": "A1", "q": [0.5]}, "q[0]"),
    ({"version": 1, "datum": "A1", "q": ["1/x"]}, "malformed rational"),
    ({"version": 1, "datum": "A2", "omega": [3]}, "out of range"),
    ({"version": 1, "datum": "A2", "theta": [1, 1]}, "permutation"),
    ({"version": 1, "datum": "A2", "theta": {"matrix": [[-1, 0], [0, -1]]}}, "base"),
    ({"version": 1, "datum": "A1", "omega": [1], "m_override": 3}, "multiple"),
    ({"version": 1, "datum": "A1", "lattice_jobs": [{"sigma": [[-1]], "m": 3}]}, "lattice_jobs[0]"),
    ({"version": 1, "datum": "A1", "bogus": 1}, "unknown field"),
])
def test_input_errors_exit_2(tmp_path, capsys, data, fragment):
    code = main(["analyze", write(tmp_path, data)])
    assert code == EXIT_INPUT
    assert fragment in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["analyze", "/nonexistent/spec.json"]) == EXIT_INPUT


def test_failing_check_exits_1(tmp_path):
    spec = {"version": 1, "datum": "A1:sc", "omega": [1], "q": ["1/3"]}
    code, report = run_json(["analyze", write(tmp_path, spec)], tmp_path)
    assert code == EXIT_FAIL
    failed = [c for c in report["body"]["checks"] if not c["passed"]]
    assert [c["name"] for c in failed] == ["gamma_fixed"]
    assert failed[0]["witness"]["q"] == ["1/3"]


def test_explicit_datum_and_matrix_theta(tmp_path):
    spec = {"version": 1, "datum": {"rank": 2, "simple_roots": [[2, -1], [-1, 2]],
                                     "simple_coroots": [[1, 0], [0, 1]]},
            "theta": {"matrix": [[0, 1], [1, 0]]}, "omega": [1, 2, 1], "q": ["1/2", "1/2"]}
    code, report = run_json(["analyze", write(tmp_path, spec)], tmp_path)
    assert code == EXIT_OK
    assert report["body"]["results"]["theta"]["simple_permutation"] == [2, 1]
    assert report["body"]["results"]["endoscopy"]["h_roots"] == 2


def test_report_round_trip_and_determinism(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    path = str(SAMPLES / "sl2_elliptic.json")
    main(["analyze", path, "--json", str(a)])
    main(["analyze", path, "--json", str(b)])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert json.dumps(ra["body"], sort_keys=True) == json.dumps(rb["body"], sort_keys=True)
    assert "generated" in ra["header"] and "generated" not in json.dumps(ra["body"])
    assert no_floats(ra)
    assert ra["body"]["input"]["q"] == ["1/2"]


def test_verify_gauss(tmp_path):
    code, report = run_json(["verify", "gauss", "--primes", "3,5,7"], tmp_path)
    assert code == EXIT_OK
    values = {c["witness"]["p"]: c["witness"]["values"] for c in report["body"]["checks"]}
    assert values == {3: [-3], 5: [-5], 7: [-7]}


def test_verify_signs_rank_two(tmp_path):
    code, report = run_json(["verify", "signs", "--max-rank", "2"], tmp_path)
    assert code == EXIT_OK
    cases = sum(c["witness"]["cases"] for c in report["body"]["checks"] if c["name"].startswith("signs["))
    # sum over rank <= 2 systems of |based automorphisms| * |W|, for sc and ad
    assert cases == 2 * (1 * 2 + 2 * 4 + 2 * 6 + 1 * 8 + 1 * 12)


def test_verify_anticom_seed(tmp_path):
    code, report = run_json(["verify", "anticom", "--seed", "7", "--random-lattices", "40"], tmp_path)
    assert code == EXIT_OK and no_floats(report)


def test_verify_parallel_matches_serial(tmp_path):
    c1, r1 = run_json(["verify", "claims", "--max-rank", "2"], tmp_path)
    c2, r2 = run_json(["verify", "claims", "--max-rank", "2", "--jobs", "2"], tmp_path)
    assert c1 == c2 == EXIT_OK
    assert r1["body"] == r2["body"]


def test_verify_seed_determinism(tmp_path):
    args = ["verify", "pairings", "--max-rank", "2", "--max-order", "4", "--random-lattices", "20",
            "--seed", "5"]
    _, r1 = run_json(args, tmp_path)
    _, r2 = run_json(args, tmp_path)
    assert r1["body"] == r2["body"]


@pytest.mark.parametrize("args", [["verify", "signs", "--max-rank", "4"],
                                  ["verify", "pairings", "--max-order", "7"],
                                  ["verify", "gauss", "--primes", "103"],
                                  ["verify", "gauss", "--primes", "9"],
                                  ["verify", "gauss", "--primes", "x"],
                                  ["verify", "nonsense"],
                                  []])
def test_verify_bounds(args):
    assert main(args) == EXIT_INPUT


def test_catalog(capsys):
    assert main(["catalog"]) == EXIT_OK
    full = capsys.readouterr().out.splitlines()
    assert main(["catalog", "--filter", ""]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == full
    orders = {line.split()[0]: line.split()[-1] for line in full}
    assert orders["A1:sc"] == "|W|=2" and orders["A2:ad"] == "|W|=6" and orders["G2"] == "|W|=12"
    assert main(["catalog", "--filter", "e"]) == EXIT_OK
    assert all(l.startswith("E") for l in capsys.readouterr().out.splitlines())


def test_catalog_orders_match_enumeration():
    for name, rank, order in catalog_entries():
        if rank <= 3:
            assert len(weyl_group(build_named(name))) == order


def test_parse_rational():
    assert parse_rational("3/6", "x") == parse_rational(1, "y") / 2
    assert parse_rational(" -2 ", "x") == -2
    with pytest.raises(InputError):
        parse_rational("1/0", "x")
    with pytest.raises(InputError):
        parse_rational(True, "x")
