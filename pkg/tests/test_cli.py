import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from radtree import io as rio
from radtree import schemas
from radtree.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "sample_inputs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


COMMAND_ARGS = {
    "check": ["--input", SAMPLES / "standard_b2.json"],
    "reduce": ["--input", SAMPLES / "standard_b2.json"],
    "reconstruct": ["--input", SAMPLES / "interfaces.json"],
    "transfer": ["--input", SAMPLES / "kronig_penney.json", "--z", "3+0.5j"],
    "bands": ["--input", SAMPLES / "kronig_penney.json", "--emax", "50"],
    "weyl": ["--input", SAMPLES / "kronig_penney.json", "--energy", "2", "--energy", "10.5"],
    "reflectionless": ["--input", SAMPLES / "kronig_penney.json", "--energy", "2"],
    "eigs-halfline": ["--input", SAMPLES / "free.json", "--right-end", "3.5", "--emax", "20"],
    "eigs-tree": ["--input", SAMPLES / "standard_b2.json", "--depth", "2", "--emax", "40"],
    "compare": ["--input", SAMPLES / "standard_b2.json", "--depth", "2", "--emax", "40"],
    "examples": ["--format", "json"],
}


@pytest.mark.parametrize("command", sorted(COMMAND_ARGS))
def test_json_output_validates(capsys, command):
    code, out, _ = run(capsys, "--command", command, *COMMAND_ARGS[command])
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schemas.envelope(command))
    assert doc["rows"]


@pytest.mark.parametrize("command", ["bands", "eigs-tree", "compare"])
def test_csv_output(capsys, command):
    code, out, _ = run(capsys, command, *COMMAND_ARGS[command], "--format", "csv")
    assert code == 0
    lines = out.split("\r\n")
    assert lines[-1] == ""
    header = lines[0].split(",")
    assert header == list(schemas.ROWS[command]["properties"])
    assert all(len(line.split(",")) == len(header) for line in lines[1:-1])


def test_examples_text(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0
    lines = out.strip().splitlines()
    assert all(line.startswith("PASS ") for line in lines)
    assert sum("reduce(" in line for line in lines) >= 4


def test_compare_prints_pass_line(capsys):
    code, _, err = run(capsys, "compare", "--input", SAMPLES / "standard_b2.json",
                       "--depth", "3", "--emax", "100")
    assert code == 0
    assert err.startswith("PASS compare depth=3 max_mismatch=")


def test_free_bands_single_row(capsys):
    code, out, _ = run(capsys, "bands", "--input", SAMPLES / "free.json", "--emax", "75")
    assert json.loads(out)["rows"] == [{"band": 0, "lower": 0, "upper": 75}]


def test_transfer_degenerate_image(capsys, tmp_path):
    path = write(tmp_path, "h.json", {"cell": {"gaps": [1], "couplings": [{"a": 2, "q": -2, "c": 0}]}})
    code, out, _ = run(capsys, "transfer", "--input", path, "--z", "0", "--start", "0.5", "--end", "1.5")
    rows = json.loads(out)["rows"]
    # at z = 0: [[1, 1/2], [0, 1]] [[0, -1], [1, 0]] [[1, 1/2], [0, 1]]
    got = [[rows[2 * i + j]["re"] for j in range(2)] for i in range(2)]
    assert code == 0 and got == [[0.5, -0.75], [1, 0.5]]


def test_deterministic_bytes(capsys, tmp_path):
    outs = []
    for threads in ("1", "4"):
        dest = tmp_path / f"bands_{threads}.json"
        code, _, _ = run(capsys, "bands", "--input", SAMPLES / "kronig_penney.json", "--emax", "80",
                         "--threads", threads, "--output", dest)
        assert code == 0
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]


def test_env_thread_fallback(capsys, monkeypatch):
    monkeypatch.setenv("TREESPEC_THREADS", "3")
    code, out_env, _ = run(capsys, *["eigs-tree"] + COMMAND_ARGS["eigs-tree"])
    monkeypatch.delenv("TREESPEC_THREADS")
    code2, out_plain, _ = run(capsys, *["eigs-tree"] + COMMAND_ARGS["eigs-tree"])
    assert code == code2 == 0 and out_env == out_plain


def test_module_entry_point():
    args = [sys.executable, "-m", "radtree", "--command", "bands",
            "--input", str(SAMPLES / "kronig_penney.json"), "--emax", "30"]
    a = subprocess.run(args, capture_output=True, check=True).stdout
    b = subprocess.run(args, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b'{"command": "bands"')


@pytest.mark.parametrize("config", ["gen_periodic.json", "gen_power2.json", "gen_fibonacci.json"])
def test_gen_seq_round_trip(capsys, tmp_path, config):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for dest in (first, second):
        assert run(capsys, "gen-seq", "--input", SAMPLES / config, "--output", dest)[0] == 0
    assert first.read_bytes() == second.read_bytes()
    doc = json.loads(first.read_text())
    jsonschema.validate(doc, schemas.TREE_SPEC)
    # parsing and re-emitting is a fixed point
    assert rio.dumps(rio.tree_spec_doc(rio.parse_tree_spec(doc))) == first.read_text()
    # and downstream commands see identical data
    for cmd in ("check", "reduce"):
        x = run(capsys, cmd, "--input", first)
        y = run(capsys, cmd, "--input", second)
        assert x == y and x[0] == 0


def test_gen_seq_power2_flags_condition_d(capsys, tmp_path):
    dest = tmp_path / "p.json"
    run(capsys, "gen-seq", "--input", SAMPLES / "gen_power2.json", "--output", dest)
    code, out, _ = run(capsys, "check", "--input", dest)
    summary = json.loads(out)["summary"]
    assert summary["condition_b"] and not summary["condition_d"]


def test_gen_seq_keeps_exact_rationals(capsys, tmp_path):
    dest = tmp_path / "p.json"
    run(capsys, "gen-seq", "--input", SAMPLES / "gen_power2.json", "--output", dest)
    doc = json.loads(dest.read_text())
    assert doc["generations"][0]["beta"] == "-2/3"
    code, out, _ = run(capsys, "reduce", "--input", dest, "--format", "csv")
    assert "\r\n1,2,-2,0,0\r\n" in out


# -- errors ----------------------------------------------------------------------

def _error(err):
    doc = json.loads(err)
    jsonschema.validate(doc, schemas.ERROR)
    return doc


@pytest.mark.parametrize("argv", [
    [],
    ["bands"],
    ["bands", "--input", "/nonexistent.json"],
    ["bands", "--input", str(SAMPLES / "free.json"), "--emin", "5", "--emax", "1"],
    ["bands", "--input", str(SAMPLES / "free.json"), "--threads", "0"],
    ["transfer", "--input", str(SAMPLES / "free.json")],
    ["eigs-tree", "--input", str(SAMPLES / "standard_b2.json"), "--depth", "9"],
])
def test_validation_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert _error(err)["exit_code"] == 1


def test_bad_json_and_bad_spec(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", "--input", bad)[0] == 1
    spec = write(tmp_path, "s.json", {"gaps": [1, 1], "generations": [{"b": 2.5}]})
    assert run(capsys, "check", "--input", spec)[0] == 1


def test_unknown_flag_exit_1(capsys):
    code, _, err = run(capsys, "bands", "--bogus")
    assert code == 1 and "--bogus" in _error(err)["message"]


def test_decoupled_exit_2_with_generation(capsys, tmp_path):
    doc = {"points": [1, 2, 3], "couplings": [{"a": 1}, {"a": 1}, {"a": 2, "q": 2}]}
    path = write(tmp_path, "h.json", doc)
    code, out, err = run(capsys, "transfer", "--input", path, "--z", "1", "--start", "0.5", "--end", "3.5")
    e = _error(err)
    assert code == 2 and e["error"] == "Decoupled" and e["generation"] == 3


def test_degenerate_denominator_exit_2(capsys, tmp_path):
    spec = {"gaps": [1, 1, 1], "generations": [{"b": 2}, {"alpha": -36, "beta": 1, "b": 4}]}
    code, _, err = run(capsys, "reduce", "--input", write(tmp_path, "s.json", spec))
    e = _error(err)
    assert code == 2 and e["error"] == "DegenerateDenominator" and e["generation"] == 2
