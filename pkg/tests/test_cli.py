import json
from pathlib import Path

import pytest

from vgit.cli import STAGES, ConfigError, PipelineConfig, main, parse_action_file, run_pipeline

ACTIONS = Path(__file__).resolve().parent.parent / "actions"


def test_parse_action_files():
    a = parse_action_file(ACTIONS / "square.json")
    assert a.rank == 2 and len(a.weights) == 4
    assert parse_action_file(ACTIONS / "shifted_square.json").shift is not None


def test_dependency_check(tmp_path):
    with pytest.raises(ConfigError, match="requires graph"):
        PipelineConfig(ACTIONS / "square.json", ("chambers", "chow"), tmp_path)
    assert main([str(ACTIONS / "square.json"), "--stages", "chow", "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("stages", ["nonsense", "graph"])
def test_bad_stage_lists(tmp_path, stages):
    assert main([str(ACTIONS / "square.json"), "--stages", stages, "--out", str(tmp_path)]) == 2


def test_bad_action_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"rank": 2, "weights": [[0, 0], [1]]}')
    assert main([str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main([str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2


def test_rank_one_run(tmp_path, capsys):
    rc = main([str(ACTIONS / "p2_line.json"), "--stages", "chambers,graph", "--out", str(tmp_path)])
    assert rc == 0
    data = json.loads((tmp_path / "chambers.json").read_text())
    assert len(data["chambers"]) == 2
    assert "J0 -- I0" in (tmp_path / "graph.dot").read_text()
    assert "2/2 checks passed" in capsys.readouterr().out


def test_full_square_run(tmp_path):
    result = run_pipeline(PipelineConfig(ACTIONS / "square.json", STAGES, tmp_path))
    assert result.status == 0 and all(ok for _, _, ok in result.verdicts)
    text = (tmp_path / "independence.txt").read_text()
    assert "trees 8" in text and "PASS" in text and "negative control" in text and ": detected" in text
    for name in ("chambers.json", "graph.dot", "trees.txt", "loops.txt", "shelling.txt", "chow_report.txt", "strata.txt"):
        assert (tmp_path / name).stat().st_size > 0
    assert "independence: loop 0: PASS" in (tmp_path / "summary.txt").read_text()


def test_failing_loop_sets_the_exit_code(tmp_path):
    rc = main([str(ACTIONS / "tri5.json"), "--stages", "chambers,graph,loops,chow,independence", "--out", str(tmp_path)])
    assert rc == 1
    assert "FAIL" in (tmp_path / "independence.txt").read_text()


def test_runs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main([str(ACTIONS / "square.json"), "--out", str(out)]) == 0
    for f in sorted(a.iterdir()):
        if f.name == "summary.txt":
            continue
        assert f.read_bytes() == (b / f.name).read_bytes(), f.name
    assert (a / "summary.txt").read_text().replace(str(a), "") == (b / "summary.txt").read_text().replace(str(b), "")
