"""Command-line driver: subcommand behavior and exit codes."""

import itertools
import json
from fractions import Fraction

import pytest

from scencover.cli import main
from scencover.serialize import dumps_document


def run(argv):
    return main([str(a) for a in argv])


def k_of_n_doc(n=3, k=2):
    rows = [
        {"assignment": list(a), "weight": 1}
        for a in itertools.product("01", repeat=n)
        if a.count("1") >= k or a.count("0") >= n - k + 1
    ]
    return {
        "version": 1,
        "n": n,
        "states": ["0", "1"],
        "sample": rows,
        "costs": ["1"] * n,
        "utility": {"kind": "k_of_n", "k": k},
    }


def write_doc(path, doc):
    path.write_text(dumps_document(doc))
    return path


def brute_force_optimum(doc):
    """Independent exhaustive strategy search, written directly against the
    JSON document (no solver-library reuse)."""
    n = doc["n"]
    k = doc["utility"]["k"]
    costs = [Fraction(c) for c in doc["costs"]]
    rows = [(tuple(r["assignment"]), r["weight"]) for r in doc["sample"]]
    total = sum(w for _, w in rows)

    def done(fixed):
        ones = sum(1 for s in fixed.values() if s == "1")
        zeros = sum(1 for s in fixed.values() if s == "0")
        return ones >= k or zeros >= n - k + 1

    def best(fixed, consistent):
        if done(fixed):
            return Fraction(0)
        wsum = sum(w for a, w in consistent)
        if wsum == 0:
            return Fraction(0)
        options = []
        for i in range(n):
            if i in fixed:
                continue
            value = costs[i]
            for s in ("0", "1"):
                sub = [(a, w) for a, w in consistent if a[i] == s]
                if sub:
                    sw = sum(w for _, w in sub)
                    value += Fraction(sw, wsum) * best({**fixed, i: s}, sub)
            options.append(value)
        return min(options)

    return best({}, rows)


def test_solve_optimal_matches_hand_enumeration(tmp_path):
    doc = k_of_n_doc()
    infile = write_doc(tmp_path / "inst.json", doc)
    out = tmp_path / "report.json"
    assert run(["solve", "--algorithm", "optimal", "--in", infile,
                "--out", out]) == 0
    report = json.loads(out.read_text())
    assert Fraction(report["expected_cost"]["exact"]) == brute_force_optimum(doc)
    assert report["validation"] == "ok"


def test_solve_scenario_mixed_at_least_optimal(tmp_path):
    doc = k_of_n_doc()
    infile = write_doc(tmp_path / "inst.json", doc)
    out = tmp_path / "report.json"
    assert run(["solve", "--algorithm", "scenario-mixed", "--in", infile,
                "--out", out]) == 0
    report = json.loads(out.read_text())
    assert Fraction(report["expected_cost"]["exact"]) >= brute_force_optimum(doc)


def test_solve_malformed_row_exits_2(tmp_path, capsys):
    doc = k_of_n_doc()
    doc["sample"][0]["assignment"] = ["0", "0", "marmot"]
    infile = write_doc(tmp_path / "bad.json", doc)
    assert run(["solve", "--algorithm", "mixed", "--in", infile,
                "--out", tmp_path / "o.json"]) == 2
    assert "sample row 1" in capsys.readouterr().err


def test_solve_oracle_refusal_exits_3(tmp_path):
    infile = tmp_path / "big.json"
    assert run(["gen", "--seed", 5, "--n", 7, "--family", "coverage",
                "--out", infile]) == 0
    assert run(["solve", "--algorithm", "optimal", "--in", infile,
                "--out", tmp_path / "o.json"]) == 3


def test_gen_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run(["gen", "--seed", 11, "--n", 4, "--family", "or",
                    "--out", out]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_empty_sample(tmp_path):
    assert run(["gen", "--seed", 1, "--n", 3, "--family", "coverage",
                "--sample-size", 0, "--out", tmp_path / "z.json"]) == 2


def test_gen_output_passes_checks(tmp_path):
    f = tmp_path / "c.json"
    assert run(["gen", "--seed", 21, "--n", 4, "--family", "coverage",
                "--out", f]) == 0
    for prop in ("goal", "monotone", "submodular"):
        assert run(["check", "--property", prop, "--in", f]) == 0


def test_check_rho_on_count_elimination_combination(tmp_path, capsys):
    f = tmp_path / "gs.json"
    assert run(["gen", "--seed", 9, "--n", 3, "--family", "g_S",
                "--out", f]) == 0
    assert run(["check", "--property", "rho", "--in", f]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    rho = Fraction(line.split()[2])
    assert rho >= Fraction(1, 2)


def test_check_adaptive_submodular_on_weight_combination(tmp_path):
    f = tmp_path / "gw.json"
    assert run(["gen", "--seed", 9, "--n", 3, "--family", "g_W",
                "--out", f]) == 0
    assert run(["check", "--property", "adaptive-submodular", "--in", f]) == 0


def test_check_monotone_broken_table_exits_1(tmp_path, capsys):
    values = {}
    for b in itertools.product(("0", "1", "*"), repeat=2):
        unknowns = sum(1 for s in b if s == "*")
        values[",".join(b)] = 2 if "*" not in b else 2 - unknowns
    # anti-monotone tweak: make one refinement lose value
    values["1,*"] = 2
    values["1,0"] = 0
    doc = {
        "version": 1,
        "n": 2,
        "states": ["0", "1"],
        "sample": [{"assignment": ["1", "1"], "weight": 1}],
        "costs": ["1", "1"],
        "utility": {"kind": "table", "goal": 2, "values": values},
    }
    # keep the goal on the sample row
    doc["utility"]["values"]["1,1"] = 2
    f = write_doc(tmp_path / "table.json", doc)
    assert run(["check", "--property", "monotone", "--in", f]) == 1
    assert "witness" in capsys.readouterr().out


def test_bench_directory(tmp_path, capsys):
    d = tmp_path / "instances"
    d.mkdir()
    for seed, family in ((1, "coverage"), (2, "k_of_n"), (3, "g_S")):
        assert run(["gen", "--seed", seed, "--n", 3, "--family", family,
                    "--out", d / ("i%d.json" % seed)]) == 0
    out = tmp_path / "bench.json"
    assert run(["bench", "--dir", d, "--algorithms",
                "mixed,scenario-mixed,scenario-adaptive", "--out", out]) == 0
    table = json.loads(out.read_text())
    assert len(table["rows"]) == 3
    for row in table["rows"]:
        opt = Fraction(row["optimal"])
        for algorithm in table["algorithms"]:
            assert row[algorithm]["pass"]
            assert Fraction(row[algorithm]["cost"]) >= opt


def test_bench_empty_directory(tmp_path):
    d = tmp_path / "none"
    d.mkdir()
    assert run(["bench", "--dir", d, "--algorithms", "mixed",
                "--out", tmp_path / "b.json"]) == 0


def test_bench_oracle_skipped_row(tmp_path):
    d = tmp_path / "big"
    d.mkdir()
    assert run(["gen", "--seed", 4, "--n", 7, "--family", "coverage",
                "--out", d / "big.json"]) == 0
    out = tmp_path / "bench.json"
    assert run(["bench", "--dir", d, "--algorithms", "scenario-adaptive",
                "--out", out]) == 0
    row = json.loads(out.read_text())["rows"][0]
    assert row["optimal"] == "oracle skipped"
    assert row["scenario-adaptive"]["pass"] is None


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--algorithm", "nonsense", "--in", "x", "--out", "y"])
    assert exc.value.code == 2
