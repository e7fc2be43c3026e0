import json

import pytest

from bipmaps import FORMAT_VERSION, __version__
from bipmaps.cli import ExperimentConfig, main


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert __version__ in out
    assert f"format {FORMAT_VERSION}" in out


def test_sample_writes_files_deterministically(tmp_path, capsys):
    args = ["sample", "--family", "2p", "--p", "2", "--n", "300", "--seed", "1", "--jobs", "1"]
    assert main(args + ["--out", str(tmp_path / "m.json")]) == 0
    assert main(args + ["--out", str(tmp_path / "again.json")]) == 0
    out = capsys.readouterr().out
    assert "map_faces=301" in out
    for a, b in [("m.json", "again.json"), ("m.forest.json", "again.forest.json"),
                 ("m.summary.json", "again.summary.json")]:
        assert (tmp_path / a).read_bytes() == (tmp_path / b).read_bytes()
    summary = json.loads((tmp_path / "m.summary.json").read_text())
    assert summary["sigma2"] == 600
    assert summary["diameter_lower"] <= summary["diameter_upper"]
    forest = json.loads((tmp_path / "m.forest.json").read_text())
    assert len(forest["labels"]) == 601


def test_sample_csv_and_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BIPMAPS_OUT", str(tmp_path))
    assert main(["sample", "--faces", '{"rho": 2, "face_counts": {"2": 5, "3": 1}}', "--format", "csv",
                 "--replicas", "2"]) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "map-0000.csv" in files and "map-0001.forest.csv" in files
    assert (tmp_path / "map-0000.csv").read_text().startswith("u,v\n")


def test_inconsistent_sequence_exits_2(capsys):
    assert main(["sample", "--degrees", '{"rho": 3, "counts": {"0": 3, "2": 1}}']) == 2
    assert "roots must equal" in capsys.readouterr().err


def test_missing_source_exits_2(capsys):
    assert main(["sample"]) == 2
    assert "degree sequence is required" in capsys.readouterr().err


def test_verify_counts(tmp_path):
    out = tmp_path / "counts.json"
    assert main(["verify", "counts", "--max-vertices", "6", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and rep["suite"] == "counts"


def test_verify_failure_exits_1(tmp_path, capsys):
    # an unreachable slope threshold forces a FAIL
    out = tmp_path / "holder.json"
    code = main(["verify", "holder", "--n", "500", "--replicas", "4", "--jobs", "1",
                 "--set", "min_slope=10", "--out", str(out)])
    assert code == 1
    assert str(out) in capsys.readouterr().err
    assert json.loads(out.read_text())["ok"] is False


def test_verify_tails_small(tmp_path):
    out = tmp_path / "tails.csv"
    assert main(["verify", "tails", "--family", "2p", "--p", "2", "--n", "200", "--replicas", "300",
                 "--jobs", "1", "--format", "csv", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# bridge-min" in text and "verdict" in text


def test_verify_distance_law_small(tmp_path):
    out = tmp_path / "dl.json"
    assert main(["verify", "distance-law", "--replicas", "5", "--n", "30", "--jobs", "1",
                 "--set", "pairs=50", "--out", str(out)]) == 0


def test_config_round_trip_reruns_identically(tmp_path):
    cfg = tmp_path / "cfg.json"
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["spine", "--family", "mixed", "--n", "50", "--replicas", "500", "--seed", "4",
                 "--jobs", "1", "--out", str(out1), "--save-config", str(cfg)]) == 0
    loaded = ExperimentConfig.from_json(cfg.read_text())
    assert loaded.family == "mixed" and loaded.n == 50 and loaded.seed == 4
    assert main(["spine", "--config", str(cfg), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_config_command_mismatch(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(ExperimentConfig(command="sample").to_json())
    assert main(["spine", "--config", str(cfg)]) == 2


def test_enumerate_labelled(tmp_path, capsys):
    out = tmp_path / "e.json"
    assert main(["enumerate", "--degrees", '{"counts": [[0, 3], [2, 2]]}', "--labelled", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["count"] == rep["closed_form"] == 18


def test_enumerate_over_budget_exits_2():
    assert main(["enumerate", "--family", "quadrangulation", "--n", "40", "--out", "/dev/null"]) == 2


def test_scaling_single_size(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["scaling", "--family", "2p", "--p", "2", "--sizes", "128", "--replicas", "3",
                 "--pairs", "20", "--jobs", "1", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert "within factor" not in capsys.readouterr().out


def test_scaling_ladder_json(tmp_path):
    out = tmp_path / "s.json"
    assert main(["scaling", "--sizes", "256,1024", "--ladder", "--replicas", "2", "--pairs", "20",
                 "--jobs", "1", "--out", str(out)]) in (0, 1)
    rep = json.loads(out.read_text())
    assert [r["p"] for r in rep["rows"]] == [4, 5]
    assert rep["ladder"] is True
