"""Command-line interface: exit codes, text reports, JSON determinism."""

import json

import pytest

from stratalg import builtin_model, model_to_json
from stratalg.cli import main

APPENDIX_REPORT = """\
The operation is not associative. 16 mismatches found:
  (i,j,k,l)=(1,1,2,0): 0 != -145
  (i,j,k,l)=(1,1,2,1): 0 != 80
  (i,j,k,l)=(1,1,2,2): 16 != 121
  (i,j,k,l)=(1,2,1,0): -167 != 145
  (i,j,k,l)=(1,2,1,1): -74 != -72
  (i,j,k,l)=(1,2,2,0): -109 != 0
  (i,j,k,l)=(1,2,2,1): 49 != 8
  (i,j,k,l)=(1,2,2,2): 80 != 0
  (i,j,k,l)=(2,1,1,0): 167 != 0
  (i,j,k,l)=(2,1,1,1): 82 != 0
  (i,j,k,l)=(2,1,1,2): 121 != 16
  (i,j,k,l)=(2,1,2,0): 109 != -123
  (i,j,k,l)=(2,1,2,2): -72 != -74
  (i,j,k,l)=(2,2,1,0): 0 != 123
  (i,j,k,l)=(2,2,1,1): 8 != 49
  (i,j,k,l)=(2,2,1,2): 0 != 82
"""


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_check_assoc_associative(capsys):
    rc, out, err = run(capsys, ["check-assoc", "--builtin", "basic3"])
    assert rc == 0
    assert out == "The operation is associative.\n"
    assert err == ""


def test_check_assoc_mismatch_listing(capsys):
    rc, out, _ = run(capsys, ["check-assoc", "--builtin", "parametric3",
                              "--params", "16,8,5,3,7,11"])
    assert rc == 1
    assert out == APPENDIX_REPORT


def test_check_assoc_json(capsys):
    rc, out, _ = run(capsys, ["check-assoc", "--builtin", "parametric3",
                              "--params", "16,8,5,3,7,11", "--json"])
    assert rc == 1
    obj = json.loads(out)
    assert obj["associative"] is False
    assert len(obj["mismatches"]) == 16
    assert obj["mismatches"][0] == {"i": 1, "j": 1, "k": 2, "l": 0,
                                    "lhs": "0", "rhs": "-145"}


def test_check_assoc_rejects_affine(capsys):
    rc, out, err = run(capsys, ["check-assoc", "--builtin", "nonlinear3",
                                "--params", "2,3,5,1,4,6"])
    assert rc == 2
    assert out == ""
    assert "axioms" in err  # points at the right command


def test_usage_errors(capsys, tmp_path):
    rc, _, err = run(capsys, ["check-assoc"])
    assert rc == 2 and "--builtin" in err
    rc, _, err = run(capsys, ["check-assoc", "--model", "/no/such/file"])
    assert rc == 2 and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc, _, err = run(capsys, ["check-assoc", "--model", str(bad)])
    assert rc == 2
    rc, _, err = run(capsys, ["axioms", "--builtin", "basic3",
                              "--field", "fp:6"])
    assert rc == 2 and "not prime" in err
    rc, _, err = run(capsys, ["axioms", "--builtin", "basic3",
                              "--field", "zp:7"])
    assert rc == 2 and "field spec" in err
    rc, _, err = run(capsys, ["check-assoc", "--builtin", "parametric3"])
    assert rc == 2 and "params" in err


def test_axioms_text_report(capsys):
    rc, out, _ = run(capsys, ["axioms", "--builtin", "basic3",
                              "--samples", "60"])
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "model basic3 over Q (seed 0, samples 60)"
    assert lines[1] == "  SA1: holds"
    assert lines[2] == "  SA2: holds-on-samples"
    assert lines[3] == "  SA3: holds"
    assert lines[4] == "  SA4: degenerate"
    assert lines[5] == "classification: symmetric"


def test_axioms_json_deterministic(capsys):
    argv = ["axioms", "--builtin", "parametric3", "--params", "2,3,5,1,4,6",
            "--field", "fp:19", "--samples", "30", "--seed", "9", "--json"]
    rc1, out1, _ = run(capsys, argv)
    rc2, out2, _ = run(capsys, argv)
    assert rc1 == rc2 == 0
    assert out1 == out2
    obj = json.loads(out1)
    assert obj["classification"] == "fully"
    assert obj["seed"] == 9


def test_strata_declared_text(capsys):
    rc, out, _ = run(capsys, ["strata", "--builtin", "basic3",
                              "--field", "fp:7"])
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == ("partition (declared-ratio) of F_7^3: 8 strata, "
                        "342 vectors, 0 exceptional")
    assert "  inf: 48" in lines
    assert "  3: 42" in lines


def test_strata_discovered_with_agreement(capsys):
    rc, out, _ = run(capsys, ["strata", "--builtin", "nonlinear3",
                              "--params", "2,3,5,1,4,6", "--field", "fp:19",
                              "--discover"])
    assert rc == 0
    assert ("agrees with declared rule on non-exceptional vectors: True"
            in out.splitlines()[-1])
    rc, out, _ = run(capsys, ["strata", "--builtin", "nonlinear3",
                              "--params", "2,3,5,1,4,6", "--field", "fp:19",
                              "--discover", "--json"])
    obj = json.loads(out)
    assert obj["provenance"] == "discovered"
    assert obj["declared_rule_agreement"]["agrees_on_non_exceptional"] is True
    assert len(obj["exceptional"]) == 18


def test_strata_full_members(capsys):
    rc, out, _ = run(capsys, ["strata", "--builtin", "basic3",
                              "--field", "fp:5", "--json", "--full"])
    obj = json.loads(out)
    sizes = {s["label"]: s["size"] for s in obj["strata"]}
    assert sizes["inf"] == 24
    for s in obj["strata"]:
        assert len(s["members"]) == s["size"]


def test_strata_needs_prime_field(capsys):
    rc, _, err = run(capsys, ["strata", "--builtin", "basic3"])
    assert rc == 2
    assert "fp:P" in err


def test_orbit_trajectory_text(capsys):
    rc, out, _ = run(capsys, ["orbit", "--builtin", "parametric3",
                              "--params", "2,3,1,4,1,2", "--field", "fp:5",
                              "--start", "0,1,2", "--q", "1,0,1",
                              "--steps", "10"])
    assert rc == 0
    assert out == "3 -> zero\ntruncated: zero product\n"


def test_orbit_trajectory_cycle_and_json(capsys):
    argv = ["orbit", "--builtin", "parametric3", "--params", "2,3,1,4,1,2",
            "--field", "fp:5", "--start", "1,2,1", "--q", "0,3,4",
            "--steps", "30"]
    rc, out, _ = run(capsys, argv)
    assert rc == 0
    assert "cycle: enters at step" in out
    rc, out, _ = run(capsys, argv + ["--json"])
    lines = [json.loads(l) for l in out.splitlines()]
    assert lines[0]["type"] == "trajectory"
    assert lines[0]["cycle"] is not None
    assert all("stratum" in l for l in lines[1:])


def test_orbit_requires_q_with_start(capsys):
    rc, _, err = run(capsys, ["orbit", "--builtin", "basic3",
                              "--field", "fp:5", "--start", "1,2,1"])
    assert rc == 2
    assert "--q" in err


def test_orbit_graph_text_dot_json(capsys, tmp_path):
    base = ["orbit", "--builtin", "parametric3", "--params", "2,3,1,4,1,2",
            "--field", "fp:5"]
    rc, out, _ = run(capsys, base)
    assert rc == 0
    assert out.startswith("transition graph (exhaustive, seed 0): 6 strata")
    assert "cross-stratum returns:" in out
    rc, out, _ = run(capsys, base + ["--dot"])
    assert out.splitlines()[0] == "digraph transitions {"
    assert '"3" -> ' in out
    target = tmp_path / "graph.json"
    rc, out, _ = run(capsys, base + ["--json", "--output", str(target)])
    assert out == ""
    obj = json.loads(target.read_text())
    assert obj["mode"] == "exhaustive"
    assert obj["pairs"] == 124 ** 2


def test_kex_text_and_exit_code(capsys):
    rc, out, _ = run(capsys, ["kex", "--builtin", "parametric3",
                              "--params", "2,3,1,4,1,2", "--field", "fp:5",
                              "--seed", "1", "--lengths", "1,2", "--recover"])
    assert rc == 0
    assert out == ("seed 1, lengths 1,2, stratum 0\n"
                   "AGREED\n"
                   "brute force: tried 15500 chains, 97 consistent, "
                   "recovered true key: True\n")


def test_kex_json(capsys):
    argv = ["kex", "--builtin", "nonlinear3", "--params", "2,3,5,1,4,6",
            "--field", "fp:19", "--seed", "4", "--json"]
    rc, out, _ = run(capsys, argv)
    assert rc == 0
    obj = json.loads(out)
    assert obj["agreed"] is True
    assert obj["seed"] == 4
    assert [m["sender"] for m in obj["messages"]] == ["setup", "alice", "bob"]
    rc2, out2, _ = run(capsys, argv)
    assert out2 == out  # reruns are byte-identical


def test_kex_bad_lengths(capsys):
    rc, _, err = run(capsys, ["kex", "--builtin", "basic3",
                              "--field", "fp:5", "--lengths", "3"])
    assert rc == 2
    assert "lengths" in err


def test_identities_table(capsys):
    rc, out, _ = run(capsys, ["identities", "--builtin", "parametric4"])
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].startswith("commutator_direction_4d")
    assert lines[0].rstrip().endswith("MATCHES")
    differs = [l for l in lines if "DIFFERS" in l]
    assert len(differs) == 1
    assert differs[0].startswith("associator_reduced_4d ")
    assert "co-stratal" in differs[0]
    rc, out, _ = run(capsys, ["identities", "--builtin", "parametric3",
                              "--json"])
    rows = json.loads(out)
    assert all(r["matches"] for r in rows)


def test_model_file_round_trip(capsys, tmp_path):
    model = builtin_model("parametric3", params=(16, 8, 5, 3, 7, 11))
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_json(model)))
    rc, out, _ = run(capsys, ["check-assoc", "--model", str(path)])
    assert rc == 1
    assert out == APPENDIX_REPORT
    # builtin reference files work too
    ref = tmp_path / "ref.json"
    ref.write_text(json.dumps({"builtin": "basic3"}))
    rc, out, _ = run(capsys, ["check-assoc", "--model", str(ref)])
    assert rc == 0
    assert out == "The operation is associative.\n"
