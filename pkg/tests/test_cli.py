import json
import math
import shutil
import subprocess
import sys

import pytest

from fsx.cli import main
from fsx.corpus import TestFunction, render
from fsx.lattice import Grid, read_fsx
from fsx.quasinorms import HerzParams, herz_norm


@pytest.fixture
def gauss_file(tmp_path):
    path = tmp_path / "g.fsx"
    assert main(["corpus", "render", "--kind", "gaussian", "--params", '{"a": "1"}',
                 "--grid", '{"dim": 1, "K": 4, "N": 1024}', "--out", str(path)]) == 0
    return path


def test_corpus_render_writes_fsx1(gauss_file):
    f = read_fsx(str(gauss_file))
    assert f.grid == Grid(1, 4, 1024)
    ref = render(TestFunction.make("gaussian", a=1.0), f.grid)
    assert (f.values == ref.values).all()


def test_corpus_list(capsys):
    assert main(["corpus", "list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "gaussian" in out and "power_cutoff" in out
    assert sum(line.startswith("default[1]") for line in out) == 20


def test_norm_on_fsx_and_descriptor(gauss_file, tmp_path, capsys):
    params = '{"alpha": "1/4", "p": "2", "q": "2"}'
    assert main(["norm", "--space", "herz", "--params", params, "--input", str(gauss_file)]) == 0
    a = float(capsys.readouterr().out)
    desc = tmp_path / "g.json"
    desc.write_text(json.dumps({"corpus": "gaussian", "params": {"a": "1"}, "grid": {"dim": 1, "K": 4, "N": 1024}}))
    assert main(["norm", "--space", "herz", "--params", params, "--input", str(desc), "--json"]) == 0
    b = json.loads(capsys.readouterr().out)
    assert a == b["value"]
    expected = herz_norm(read_fsx(str(gauss_file)), HerzParams(0.25, 2, 2)).value
    assert a == expected


@pytest.mark.parametrize("space,params", [
    ("lebesgue", {"p": "2"}), ("wlp", {"alpha": "1", "p": "1"}), ("morrey", {"u": "2", "p": "4"}),
    ("kb", {"p": "2", "q": "2", "s": "1", "beta": "2"}), ("kf", {"p": "2", "q": "2", "s": "1", "beta": "2"}),
    ("nm", {"u": "2", "p": "4", "s": "1", "beta": "2"}), ("em", {"u": "2", "p": "4", "s": "1", "beta": "2"}),
    ("bessel", {"p": "2", "q": "2", "s": "1"}), ("sobolev", {"p": "2", "q": "2", "m": "1"}),
    ("kb-diff", {"p": "2", "q": "2", "s": "1", "beta": "2"}), ("kf-diff", {"p": "2", "q": "2", "s": "1", "beta": "2"}),
    ("kb-supdiff", {"p": "2", "q": "2", "s": "1"}),
])
def test_every_space_evaluates(gauss_file, space, params, capsys):
    assert main(["norm", "--space", space, "--params", json.dumps(params), "--input", str(gauss_file)]) == 0
    v = float(capsys.readouterr().out)
    assert math.isfinite(v) and v > 0


def test_norm_missing_parameter_is_usage_error(gauss_file, capsys):
    assert main(["norm", "--space", "herz", "--params", '{"p": "2"}', "--input", str(gauss_file)]) == 2
    assert "missing parameter" in capsys.readouterr().err


def test_bad_input_file_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.fsx"
    bad.write_bytes(b"FSX1\x01")
    assert main(["decompose", "--input", str(bad)]) == 2
    assert main(["decompose", "--input", str(tmp_path / "missing.fsx")]) == 2


def test_decompose_writes_blocks(gauss_file, tmp_path, capsys):
    bdir = tmp_path / "blocks"
    assert main(["decompose", "--input", str(gauss_file), "--blocks-dir", str(bdir)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["blocks"][0]["j"] == 0
    assert len(list(bdir.iterdir())) == len(out["blocks"])
    total = sum(read_fsx(e["file"]).values for e in out["blocks"])
    assert abs(total - read_fsx(str(gauss_file)).values).max() <= 1e-10


def test_admissible_exit_codes(capsys):
    good = {"n": 1, "alpha1": 0, "alpha2": 0, "r": 2, "tau": 2, "s": 1, "q": 1}
    assert main(["admissible", "--theorem", "L1", "--params", json.dumps(good)]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "admissible"
    assert main(["admissible", "--theorem", "L1", "--params", json.dumps(dict(good, q=3))]) == 1
    assert main(["admissible", "--theorem", "L1", "--params", '{"n": 1}']) == 2


def test_sweep_json(tmp_path, capsys):
    grid = tmp_path / "sweep.json"
    grid.write_text(json.dumps({"base": {"n": 1, "alpha1": 0, "alpha2": 0, "r": 2, "tau": 2},
                                "axes": {"s": ["1", "2"], "q": ["1", "3"]}}))
    assert main(["sweep", "--theorem", "L1", "--grid", str(grid)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["counts"] == {"admissible": 2, "inadmissible": 2}
    assert [r["params"]["q"] for r in out["results"]] == ["1/1", "1/1", "3/1", "3/1"]


def test_check_preset_writes_report(tmp_path, capsys):
    out, rows = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["check", "--experiment", "ckn_T21ii_exact", "--out", str(out), "--csv", str(rows)]) == 0
    assert "PASS holder_exact" in capsys.readouterr().out
    rep = json.loads(out.read_text())
    assert rep["passed"] and rep["certificate"]["verdict"] == "admissible"
    assert len(rows.read_text().splitlines()) == 1 + len(rep["rows"])


def test_check_config_gated(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"inequality_id": "qj_smoothing",
                               "params": {"n": "1", "alpha1": "1/2", "alpha2": "0", "v": "2", "r": "2",
                                          "sigma": "1", "u": "1", "tau": "2"}}))
    out = tmp_path / "r.json"
    assert main(["check", "--experiment", "qj_smoothing", "--config", str(cfg), "--out", str(out)]) == 1
    assert json.loads(out.read_text())["gated"] is True
    assert main(["check", "--experiment", "ckn_T2i", "--config", str(cfg)]) == 2


def test_check_config_with_subset_of_functions(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"inequality_id": "ckn_T2i", "dilations": [0, 1],
                               "functions": [{"kind": "gaussian", "params": {"a": "1"}}]}))
    out = tmp_path / "r.json"
    assert main(["check", "--experiment", "ckn_T2i", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["rows"]) == 2


@pytest.mark.skipif(shutil.which("fsx") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["fsx", "corpus", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "gaussian" in res.stdout
    res = subprocess.run([sys.executable, "-m", "fsx.cli", "sweep"], capture_output=True, text=True)
    assert res.returncode == 2
