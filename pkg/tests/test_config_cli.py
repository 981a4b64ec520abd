import json
from pathlib import Path

import pytest

from esec.cli import main
from esec.config import load_config


@pytest.fixture(scope="module")
def suite_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["gen", "--suite", "--actions", "hide,push,stir", "--variants", "4", "--seed", "2",
                 "-o", str(root / "suite")]) == 0
    return root / "suite"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------------- config


def test_config_file_and_overrides(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text("[dynamic]\nxi = 0.2\n[predictor]\nmargin = 15.0\n[similarity]\nnormalize = true\n")
    cfg = load_config(f, {"dynamic": {"window": 12, "xi": None}})
    assert cfg.dynamic.xi == 0.2 and cfg.dynamic.window == 12
    assert cfg.predictor.margin == 15.0 and cfg.predictor.similarity.normalize
    assert load_config().to_dict()["static"]["eps_touch"] == 0.005


@pytest.mark.parametrize("text, message", [
    ("[colour]\nx = 1\n", "unknown config sections"),
    ("[static]\nepsilon = 1\n", "unknown keys"),
    ("[dynamic\n", "c.toml"),
    ("[dynamic]\nwindow = 0\n", "window"),
])
def test_config_errors(tmp_path, text, message):
    f = tmp_path / "c.toml"
    f.write_text(text)
    with pytest.raises(ValueError, match=message):
        load_config(f)


# ---------------------------------------------------------------------- cli


def test_gen_single_and_sidecar(tmp_path, capsys):
    out = tmp_path / "one.jsonl"
    code, stdout, _ = run(capsys, "gen", "--action", "lay", "--seed", "4", "-o", str(out))
    assert code == 0 and out.exists() and "wrote" in stdout
    side = json.loads((tmp_path / "one.jsonl.config.json").read_text())
    assert side["command"] == "gen" and side["args"]["seed"] == 4
    assert "jobs" not in side["args"] and "eps_touch" in side["config"]["static"]


def test_suite_manifest(suite_dir):
    manifest = json.loads((suite_dir / "manifest.json").read_text())
    assert len(manifest["files"]) == 12
    assert (suite_dir / "gen.config.json").exists()


def test_extract_sim_and_cluster(tmp_path, suite_dir, capsys):
    chains = tmp_path / "chains"
    code, _, _ = run(capsys, "extract", str(suite_dir), "-o", str(chains))
    assert code == 0
    assert len(list(chains.glob("hide_*.json"))) == 4
    code, out, _ = run(capsys, "sim", str(chains / "hide_00.json"), str(suite_dir / "hide_00.jsonl"),
                       "--sidecar", str(tmp_path / "s.json"))
    assert code == 0 and float(out) == 100.0
    code, out, _ = run(capsys, "sim", "--mode", "sec", str(chains / "hide_00.json"),
                       str(chains / "push_00.json"), "--sidecar", str(tmp_path / "s.json"))
    assert code == 0 and float(out) < 100.0
    matrix = tmp_path / "m.csv"
    assert run(capsys, "simmatrix", str(chains), "-o", str(matrix))[0] == 0
    assert matrix.read_text().startswith("label,")
    tree = tmp_path / "tree.json"
    code, out, _ = run(capsys, "cluster", str(matrix), "--threshold", "0.5", "-o", str(tree))
    assert code == 0
    d = json.loads(tree.read_text())
    assert d["newick"].endswith(";") and d["threshold"] == 0.5
    labels = {lab.split("_")[0] for cl in d["clusters"] for lab in cl}
    assert labels == {"hide", "push", "stir"}


def test_predict_and_bench(tmp_path, suite_dir, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "predict", "--library", str(suite_dir), "--trace",
                       str(suite_dir / "hide_01.jsonl"))
    assert code == 0
    p = json.loads(out)
    assert p["predicted"] == "hide" and p["label"] == "hide" and len(p["trace"]) >= 1
    assert (tmp_path / "predict.config.json").exists()
    code, out, _ = run(capsys, "bench-predict", str(suite_dir), "-o", "bench.csv")
    assert code == 0
    report = json.loads(out)
    assert report["accuracy"] >= 0.9
    assert sum(report["confusion"]["push"].values()) == 4
    assert Path("bench.csv").read_text().startswith("class,n,mean_P")


def test_chain_commands(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "chain", "--order", "hide,shake,take,push,put")
    assert code == 0 and "completion 38.5 s" in out and "savings 24.2 s" in out
    code, out, _ = run(capsys, "chain", "--mode", "none", "--json")
    assert code == 0 and json.loads(out)["completion"] == pytest.approx(62.7)
    code, _, _ = run(capsys, "chain-mc", "--samples", "30", "--seed", "1", "-o", "mc")
    assert code == 0
    stats = json.loads(Path("mc/stats.json").read_text())
    assert stats["cases"] == 3600
    assert Path("mc/histogram.csv").read_text().startswith("bin_start,count")
    assert len(Path("mc/permutations.csv").read_text().splitlines()) == 121


@pytest.mark.parametrize("argv, code, needle", [
    (["nope"], 2, "invalid choice"),
    (["gen", "-o", "x.jsonl"], 2, "needs --action"),
    (["chain-mc", "--samples", "0", "-o", "mc"], 2, "must be >= 1"),
    (["sim", "missing_a.json", "missing_b.json"], 1, "esec sim: error:"),
    (["chain", "--order", "take,fly"], 1, "unknown action"),
    (["chain", "--config", "bad.toml"], 1, "unknown config sections"),
    (["predict", "--library", ".", "q.jsonl"], 1, "esec predict: error:"),
])
def test_exit_codes(tmp_path, capsys, monkeypatch, argv, code, needle):
    monkeypatch.chdir(tmp_path)
    Path("bad.toml").write_text("[what]\n")
    got, out, err = run(capsys, *argv)
    assert got == code
    assert needle in err


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("esec ")


def _tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.parametrize("argv", [
    ["gen", "--suite", "--actions", "cut,shake", "--variants", "3", "--seed", "7", "-o", "out"],
    ["chain-mc", "--samples", "600", "--seed", "3", "-o", "out"],
    ["simmatrix", "{suite}", "-o", "out/m.csv"],
    ["extract", "{suite}", "-o", "out"],
    ["bench-predict", "{suite}", "-o", "out/b.csv", "--sidecar", "out/b.json"],
])
def test_jobs_byte_identical(tmp_path, suite_dir, capsys, monkeypatch, argv):
    outputs = []
    for jobs in ("1", "3"):
        work = tmp_path / f"jobs{jobs}"
        work.mkdir()
        monkeypatch.chdir(work)
        args = [a.replace("{suite}", str(suite_dir)) for a in argv]
        code, stdout, _ = run(capsys, *args, "--jobs", jobs)
        assert code == 0
        outputs.append((stdout, _tree(work)))
    assert outputs[0] == outputs[1]
    assert outputs[0][1]
