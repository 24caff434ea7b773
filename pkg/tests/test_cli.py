import json
import subprocess
import sys

import pytest

from coising.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_total(capsys):
    code, out, _ = run(capsys, "spectrum", "--catalog", "G13")
    assert code == 0
    doc = json.loads(out)
    assert sum(int(c) for c in doc["terms"].values()) == 8192 == int(doc["total"])


def test_spectrum_compare(capsys):
    code, out, _ = run(capsys, "spectrum", "--catalog", "G13", "--compare", "G13p")
    assert code == 0 and "CO-ISING: true" in out


def test_spectrum_from_file(capsys, tmp_path):
    f = tmp_path / "k2.txt"
    f.write_text("n 2\n1 2\n")
    code, out, _ = run(capsys, "spectrum", str(f))
    assert code == 0 and json.loads(out)["terms"] == {"-1,0": "2", "1,-2": "1", "1,2": "1"}


def test_bad_path_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "spectrum", str(tmp_path / "missing.txt"))
    assert code == 2 and "missing.txt" in err


def test_malformed_file_exit_2(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("n 3\n1 1\n")
    code, _, err = run(capsys, "spectrum", str(f))
    assert code == 2 and "self-loop" in err


def test_missing_required_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["search-trees"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_console_script_exit_code():
    proc = subprocess.run([sys.executable, "-m", "coising.cli", "mimic", "--catalog", "G13"], capture_output=True, text=True)
    assert proc.returncode == 2 and "--sp" in proc.stderr


def test_check(capsys):
    code, out, _ = run(capsys, "check", "G13", "G13i")
    doc = json.loads(out)
    assert code == 0 and doc["co_ising"] and doc["isomorphic"] and len(doc["witness"]) == 13


def test_compose(capsys, tmp_path):
    f = tmp_path / "k2.txt"
    f.write_text("n 2\n1 2\n")
    code, out, _ = run(capsys, "compose", str(f), "1", str(f), "1")
    assert code == 0 and "COMPOSITION LAW HOLDS: true" in out and "n 3" in out


def test_search_trees(capsys):
    code, out, _ = run(capsys, "search-trees", "--max-n", "3")
    assert code == 0 and json.loads(out) == []


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and "G25: G25p1 G25p2 G25p3 G25p4" in out
    code, out, _ = run(capsys, "catalog", "G13", "--format", "json")
    assert json.loads(out)["n"] == 13


def test_embed_writes_five_embeddings(capsys, tmp_path):
    code, _, _ = run(capsys, "embed", "--catalog", "G33", "--m", "16", "--k", "5", "--out", str(tmp_path))
    assert code == 0
    files = sorted(p.name for p in tmp_path.glob("G33.embedding*.json"))
    assert len(files) == 5
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "embed" and sorted(manifest["outputs"]) == files
    assert set(manifest) >= {"config", "seed", "version", "inputs", "wall_time"}


def test_embed_impossible_exit_1(capsys, tmp_path):
    f = tmp_path / "k3.txt"
    f.write_text("n 3\n1 2\n2 3\n1 3\n")
    code, _, err = run(capsys, "embed", str(f), "--m", "2", "--k", "1")
    assert code == 1 and "0 of 1" in err


def test_dry_run_validates_without_output(capsys, tmp_path):
    out_dir = tmp_path / "o"
    code, out, _ = run(capsys, "sweep", "--catalog", "G13", "--dry-run", "--out", str(out_dir))
    assert code == 0 and "valid" in out and not out_dir.exists()
    code, _, _ = run(capsys, "sweep", "--catalog", "G13", "--grid", "0.5,0.2", "--dry-run")
    assert code == 2


def test_schedule_env_var(capsys, tmp_path, monkeypatch):
    sched = tmp_path / "sched.csv"
    sched.write_text("s,A,B\n0,1,0\n1,0,1\n")
    monkeypatch.setenv("COISING_SCHEDULE", str(sched))
    code, _, _ = run(capsys, "sweep", "--catalog", "G13", "--beta", "4", "--grid", "0,1", "--out", str(tmp_path / "a"))
    assert code == 0
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["config"]["schedule"]["kind"] == "tabulated"
    monkeypatch.setenv("COISING_SCHEDULE", str(tmp_path / "nope.csv"))
    assert run(capsys, "sweep", "--catalog", "G13", "--dry-run")[0] == 2


def test_sweep_csv_columns(capsys):
    code, out, _ = run(capsys, "sweep", "--catalog", "G13", "--grid", "0,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "graph,observable,s_p,mean,ci_low,ci_high,embedding_id"
    assert len(lines) == 1 + 4 * 2


def test_mimic_outputs(capsys, tmp_path):
    code, _, _ = run(
        capsys, "mimic", "--catalog", "G13", "--sp", "1.0", "--gauges", "10", "--anneals", "50", "--out", str(tmp_path)
    )
    assert code == 0
    rows = (tmp_path / "G13.gauges.csv").read_text().splitlines()
    assert len(rows) == 11 and rows[0].startswith("gauge,signs,energy")
    summary = json.loads((tmp_path / "G13.summary.json").read_text())
    assert set(summary["observables"]) == {"energy", "magnetization", "q2", "omega2"}


def _outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


def test_seeded_reruns_byte_identical(capsys, tmp_path):
    argv = ["mimic", "--catalog", "G13", "--sp", "1.0", "--gauges", "8", "--anneals", "40", "--seed", "3"]
    run(capsys, *argv, "--out", str(tmp_path / "a"))
    run(capsys, *argv, "--out", str(tmp_path / "b"))
    assert _outputs(tmp_path / "a") == _outputs(tmp_path / "b")
    run(capsys, *argv[:-1], "4", "--out", str(tmp_path / "c"))
    assert _outputs(tmp_path / "a") != _outputs(tmp_path / "c")


def test_global_flags_before_command(capsys, tmp_path):
    code, _, _ = run(capsys, "--seed", "7", "--threads", "1", "embed", "--catalog", "G13", "--k", "1", "--out", str(tmp_path))
    assert code == 0 and json.loads((tmp_path / "manifest.json").read_text())["seed"] == 7
