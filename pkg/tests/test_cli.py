import json

import pytest
from click.testing import CliRunner

from catrec.cli import main

from test_pipeline import small_cfg


@pytest.fixture
def runner():
    return CliRunner()


def write_cfg(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(small_cfg().model_dump()), encoding="utf-8")
    return path


def test_bad_config_file_exits_2(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken", encoding="utf-8")
    result = runner.invoke(main, ["--config", str(bad), "synth"])
    assert result.exit_code == 2


def test_unknown_config_key_exits_2(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vi": {"learn_rate": 1}}', encoding="utf-8")
    result = runner.invoke(main, ["--config", str(bad), "synth"])
    assert result.exit_code == 2


def test_missing_artifact_exits_3(runner, tmp_path):
    result = runner.invoke(main, ["--workdir", str(tmp_path / "empty"), "matrices"])
    assert result.exit_code == 3
    assert "missing-artifact" in result.output


def test_synth_then_ingest(runner, tmp_path):
    cfg = write_cfg(tmp_path)
    wd = str(tmp_path / "work")
    result = runner.invoke(main, ["--config", str(cfg), "--workdir", wd, "synth"])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("synth records=")
    result = runner.invoke(main, ["--config", str(cfg), "--workdir", wd, "ingest"])
    assert result.exit_code == 0, result.output
    assert "users=" in result.output


def test_show_config_round_trips(runner, tmp_path):
    cfg = write_cfg(tmp_path)
    result = runner.invoke(main, ["--config", str(cfg), "--seed", "99", "show-config"])
    assert result.exit_code == 0
    parsed = json.loads(result.output)
    assert parsed["seed"] == 99
    assert parsed["synth"]["users"] == 30
