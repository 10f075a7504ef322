import json
import subprocess
import sys

import pytest

from k3frob import __version__
from k3frob.cli import main

X66_LINES = [
    "ordinary if p ≡ 1 modulo 66",
    "supersingular of Artin invariant 1 if p ≡ 65 modulo 66",
    "height 2 if p ≡ 23, 43 modulo 66",
    "height 5 if p ≡ 25, 31, 37, 49 modulo 66",
    "supersingular of Artin invariant 5 if p ≡ 17, 29, 35, 41 modulo 66",
    "height 10 if p ≡ 5, 7, 13, 19, 47, 53, 59, 61 modulo 66",
]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    doc = json.loads(out)
    assert set(doc) == {"command", "inputs", "outputs", "provenance", "version"}
    assert doc["version"] == __version__
    return doc


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--order", "66", "--prime", "131")
    assert code == 0
    assert "supersingular of Artin invariant 1 (certified)" in out
    code, out, _ = run(capsys, "predict", "--order", "66", "--prime", "7")
    assert code == 0 and out.splitlines()[0].endswith("height 10")


def test_predict_errors(capsys):
    code, out, err = run(capsys, "predict", "--order", "66", "--prime", "3")
    assert code == 1 and out == "" and "NotCoprime" in err
    code, _, err = run(capsys, "predict", "--order", "23", "--prime", "3")
    assert code == 2 and "InapplicableHeight" in err


def test_predict_json(capsys):
    doc = run_json(capsys, "predict", "--order", "66", "--prime", "17")
    assert doc["command"] == "predict"
    assert doc["outputs"]["kind"] == "Supersingular"
    assert doc["outputs"]["artin_invariant"] == 5


def test_table_66(capsys):
    code, out, _ = run(capsys, "table", "--order", "66")
    assert code == 0
    lines = out.splitlines()
    assert lines[:6] == X66_LINES


def test_table_12(capsys):
    doc = run_json(capsys, "table", "--order", "12")
    residues = sorted(r for g in doc["outputs"]["groups"] for r in g["residues"])
    assert residues == [1, 5, 7, 11]


def test_table_rejects_order_2(capsys):
    code, _, err = run(capsys, "table", "--order", "2")
    assert code == 1 and err


def test_verify_certifies_height_2(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--surface", "x66", "--prime", "23", "--max-degree", "2",
                       "--cache", str(tmp_path))
    assert code == 0
    assert out.splitlines()[-1] == "verdict: certifying height 2"


def test_verify_json_and_warm_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("K3FROB_CACHE", str(tmp_path))
    cold = run_json(capsys, "verify", "--surface", "x66", "--prime", "67")
    warm = run_json(capsys, "verify", "--surface", "x66", "--prime", "67")
    assert cold["provenance"]["cache_hits"] == [] and warm["provenance"]["cache_hits"] == [1]
    assert cold["outputs"] == warm["outputs"]
    assert warm["outputs"]["records"][0]["v"] == 0


def test_verify_from_file(capsys, tmp_path):
    path = tmp_path / "x66.json"
    path.write_text(json.dumps({"label": "x66", "N": 66, "a4": [], "a6": [0, -1] + [0] * 10 + [1],
                                "bad_primes": [2, 3, 11]}))
    code, out, _ = run(capsys, "verify", "--surface", str(path), "--prime", "67")
    assert code == 0 and "certifying height 1" in out


def test_verify_p13(capsys):
    code, out, _ = run(capsys, "verify", "--surface", "x66", "--prime", "13", "--max-degree", "2")
    assert code == 0
    assert out.splitlines()[-1] == (
        "verdict: consistent with height 10; certification out of reach at desk scale")


def test_verify_exit_codes(capsys):
    assert run(capsys, "verify", "--surface", "x66", "--prime", "11")[0] == 3
    assert run(capsys, "verify", "--surface", "x66", "--prime", "1009", "--max-degree", "2",
               "--method", "brute")[0] == 4
    assert run(capsys, "verify", "--surface", "missing.json", "--prime", "7")[0] == 1


def test_admissible(capsys):
    doc = run_json(capsys, "admissible", "--prime", "131", "--sigma", "1")
    assert 66 in doc["outputs"]["orders"]


def test_lattice(capsys):
    doc = run_json(capsys, "lattice", "--name", "K3")
    out = doc["outputs"]
    assert out["rank"] == 22 and out["discriminant"] == -1 and out["signature"] == [3, 19]
    with pytest.raises(SystemExit):
        main(["lattice", "--name", "D4"])


def test_orbit(capsys):
    doc = run_json(capsys, "orbit", "--order", "66", "--prime", "17", "--depth", "5")
    res = doc["outputs"]["residues"]
    assert len(res) == 10
    assert sorted((-a) % 66 for a in res) == sorted(res)


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "k3frob.cli", "table", "--order", "66"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[:6] == X66_LINES
    assert proc.stderr == ""
