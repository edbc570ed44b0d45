import json
import subprocess
import sys

import pytest

from netent.cli import main

Z22 = {"table": [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]],
       "subgroups": [[0, 1], [0, 2], [0, 3], [0]]}
Z23 = {"table": [[a ^ b for b in range(8)] for a in range(8)],
       "subgroups": [[0, 1], [0, 2], [0, 4], [0]]}
BROKEN = {"table": Z22["table"], "subgroups": [[0, 1], [0, 2], [0, 1, 2, 3], [0, 1, 2, 3]]}
VERDICT_EXIT = {"holds": 0, "provable": 0, "solved": 0, "computed": 0,
                "violated": 1, "not-provable": 1, "unsolvable": 1, "error": 2}


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)
    return _write


def run_json(capsys, *argv):
    code = main(["--json", *argv])
    out = capsys.readouterr().out
    payload = json.loads(out)
    assert payload["exit_code"] == code == VERDICT_EXIT[payload["verdict"]]
    return code, payload, out


def test_check_pg13_ingleton(capsys):
    code, payload, _ = run_json(capsys, "check", "builtin:pg13", "--family", "ingleton")
    assert code == 1
    assert payload["ingleton"]["sides"] == {"positive": "log2:570306048", "negative": "log2:641594304"}
    assert payload["ingleton"]["margin"] == "log2:8/9"


def test_check_zy_gap(capsys):
    assert run_json(capsys, "check", "builtin:zy-gap", "--family", "gamma")[0] == 0
    code, payload, _ = run_json(capsys, "check", "builtin:zy-gap", "--family", "zy", "--permutations")
    assert code == 1 and payload["zy"]["margin"] == "-1" and payload["zy"]["witness_roles"] == [3, 4, 1, 2]
    code, payload, _ = run_json(capsys, "check", "builtin:zy-gap", "--family", "all")
    assert code == 1 and payload["report"]["gamma"]["holds"]


def test_check_negative_entry(capsys, write):
    values = {k: "1" for k in ("1", "2", "3", "4", "12", "13", "14", "23", "24", "34",
                               "123", "124", "134", "234", "1234")}
    values["1"] = "-1"
    path = write("neg.json", {"n": 4, "values": values})
    assert run_json(capsys, "check", path, "--family", "gamma")[0] == 1


@pytest.mark.parametrize("content", ["{not json", json.dumps({"n": 4})])
def test_check_malformed(capsys, write, content):
    path = write("bad.json", content)
    assert run_json(capsys, "check", path)[0] == 2


def test_prove(capsys, write):
    path = write("sub.json", {"n": 3, "coeffs": {"12": 1, "13": 1, "1": -1, "123": -1}, "name": "submod"})
    code, payload, _ = run_json(capsys, "prove", path)
    assert code == 0 and payload["result"]["multipliers"] == {"I(2;3|1)": "1"}
    code, payload, _ = run_json(capsys, "prove", "builtin:ingleton")
    assert code == 1 and payload["result"]["counterexample_value"] == "-1"
    code, payload, _ = run_json(capsys, "prove", "builtin:zy")
    assert code == 1 and "counterexample" in payload["result"]
    assert run_json(capsys, "prove", write("x.json", {"coeffs": {}}))[0] == 2


def test_group_vector(capsys, write):
    code, payload, _ = run_json(capsys, "group-vector", write("g.json", Z22))
    assert code == 0 and payload["condition1"] is True
    assert len(payload["vector"]["values"]) == 15
    whole = {"table": Z22["table"], "subgroups": [[0, 1, 2, 3]] * 4}
    _, payload, _ = run_json(capsys, "group-vector", write("w.json", whole))
    assert set(payload["vector"]["values"].values()) == {"1"}
    corrupt = {"table": [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 2, 1]], "subgroups": []}
    code, payload, _ = run_json(capsys, "group-vector", write("c.json", corrupt))
    assert code == 2 and payload["error"].split(":")[0] in {"closure", "inverse", "associativity", "identity"}


def test_group_vector_output_round_trips_into_check(capsys, write):
    _, payload, _ = run_json(capsys, "group-vector", write("g.json", Z22))
    vec = write("v.json", payload["vector"])
    code, again, _ = run_json(capsys, "check", vec)
    assert code == 0 and again["report"]["ingleton"]["holds"]


@pytest.mark.parametrize("group", [Z22, Z23])
def test_solve_verify(capsys, write, group):
    code, payload, _ = run_json(capsys, "solve", write("g.json", group), "--verify", "--emit-network")
    assert code == 0
    assert "15/15 entropies match" in payload["summary"]
    assert len(payload["decoder_table_sizes"]) == 17
    assert len(payload["network"]["manifest"]) == 17


def test_solve_condition1_failure(capsys, write):
    code, payload, _ = run_json(capsys, "solve", write("b.json", BROKEN))
    assert code == 1 and "34" in payload["condition1_gaps"]


def test_demo(capsys):
    code, payload, _ = run_json(capsys, "demo", "pg13")
    assert code == 1
    assert any("abelian network codes" in s for s in payload["classification"]["narrative"])
    code, payload, _ = run_json(capsys, "demo", "zy-gap")
    assert code == 1 and payload["classification"]["solvability"] == "not asymptotically solvable"
    code, payload, _ = run_json(capsys, "demo", "zy-gap", "--a", "0")
    assert code == 0
    assert run_json(capsys, "demo", "nope")[0] == 2
    assert run_json(capsys, "demo", "zy-gap", "--a", "x")[0] == 2


def test_json_is_deterministic(capsys, write):
    path = write("g.json", Z22)
    outs = [run_json(capsys, "solve", path, "--verify")[2] for _ in range(2)]
    assert outs[0] == outs[1]


def test_quiet_and_text_modes(capsys):
    assert main(["check", "builtin:pg13", "--family", "ingleton", "--quiet"]) == 1
    assert capsys.readouterr().out == ""
    assert main(["check", "builtin:pg13", "--family", "ingleton"]) == 1
    assert "log2:570306048 < log2:641594304" in capsys.readouterr().out


def test_usage_error_exit_code():
    assert main(["bogus"]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "netent", "demo", "zy-gap", "--a", "0", "--quiet"])
    assert res.returncode == 0
