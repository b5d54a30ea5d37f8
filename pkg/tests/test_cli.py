import io
import json
import subprocess
import sys
from importlib.resources import files

import pytest

from modalbench.cli import run
from modalbench.semantics import KripkeModel, model_from_json, model_to_json


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def script(name):
    return str(files("modalbench").joinpath("data/scripts", name))


def test_parse():
    assert call("parse", "-f", "[&2 1]p") == (0, "[&1 2]p\n", "")
    code, out, _ = call("parse", "-f", "[1][+2]p", "--json")
    assert json.loads(out) == {"formula": "[1][+2]p", "language": "Lcapucl", "modal_depth": 2}


def test_usage_errors():
    assert call("parse", "-f", "[&]p")[0] == 2
    assert call("nosuch")[0] == 2
    assert call("closure", "-l", "CQ", "-f", "p")[0] == 2
    assert call("closure", "-l", "CK", "-f", "[2]p", "-i", "1")[0] == 2
    assert call("build", "-l", "CK", "-f", "p", "-d", "-1")[0] == 2
    assert call("prove", "-s", "AX_CK", "-p", "/nonexistent/script.txt")[0] == 2


def test_valid_and_invalid():
    assert call("valid", "-l", "CT", "-f", "[&1 2]p -> p")[:2] == (0, "valid\n")
    code, out, _ = call("valid", "-l", "CD", "-f", "[&1 2]p -> ~[&1 2]~p", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "invalid" and len(doc["witness"]["model"]["states"]) == 2


def test_sat_unknown_exit_code():
    code, out, _ = call("sat", "-l", "CK", "-f", "~[1]p", "--engine", "oracle", "-b", "1")
    assert code == 0 and out.startswith("sat")
    # two indices with four states overflows the oracle budget
    code, out, _ = call("sat", "-l", "CK", "-f", "[+1 2]p & ~[1]p", "--engine", "oracle", "-b", "4")
    assert code == 3 and out.startswith("unknown")


def test_prove():
    assert call("prove", "-s", "AX_CD", "-p", script("ducl_cd.txt"))[:2] == (0, "ok\n")
    code, out, _ = call("prove", "-s", "AX_CD", "-p", script("dcap.txt"))
    assert code == 1 and out.startswith("rejected")


def test_prove_goal_flag():
    assert call("prove", "-s", "AX_CT", "-p", script("tucl_ct.txt"), "-g", "[+1 2]p -> p")[0] == 0
    assert call("prove", "-s", "AX_CT", "-p", script("tucl_ct.txt"), "-g", "[+1]p -> p")[0] == 1


def test_closure_and_atoms():
    code, out, _ = call("closure", "-l", "CK", "-f", "[1]p")
    assert out.split() == ["[&1]p", "[1]p", "p", "~[&1]p", "~[1]p", "~p"]
    code, out, _ = call("atoms", "-l", "CT", "-f", "[1]p", "--json")
    atoms = json.loads(out)
    assert code == 0 and all("p" in a["members"] for a in atoms if "[1]p" in a["members"])


def test_build_emits_model_json():
    code, out, _ = call("build", "-l", "CK", "-f", "[&1 2]p", "-d", "1")
    m = model_from_json(out)
    assert code == 0 and "0" in m.states and any(s.count(":") == 2 for s in m.states)


def test_audit_exit_codes():
    code, out, _ = call("audit", "-l", "CS4", "-f", "[&1]p", "-i", "1 2", "--json")
    assert code == 0 and all(r["ok"] for r in json.loads(out))
    code, out, _ = call("audit", "-l", "CS4", "-f", "[&1]p", "-i", "1 2", "--relation", "literal")
    assert code == 1 and "canonicity: 1 violations" in out


def test_check_model(tmp_path):
    m = KripkeModel(["a", "b"], {1: [("a", "b")]}, {"p": ["b"]})
    path = tmp_path / "m.json"
    path.write_text(model_to_json(m))
    assert call("check-model", "-m", str(path), "-f", "[1]p") == (0, "a: true\nb: true\n", "")
    code, out, _ = call("check-model", "-m", str(path), "-f", "p", "--frame", "T")
    assert code == 1 and "not reflexive" in out
    path.write_text("{not json")
    assert call("check-model", "-m", str(path), "-f", "p")[0] == 2


def test_oracle_compare_small():
    code, out, _ = call("oracle-compare", "--max-size", "2", "-b", "3", "--json")
    summary = json.loads(out)
    assert code == 0 and [s["logic"] for s in summary] == ["CK", "CT", "CB"]
    assert all(s["disagreements"] == [] for s in summary)


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "modalbench", "parse", "-f", "p & q"],
                          capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout == "~(p -> ~q)\n"
