import pytest

from catrec.config import RunConfig, dump_config, load_config, parse_config
from catrec.errors import ConfigError


def test_defaults_validate():
    cfg = RunConfig()
    assert cfg.seed == 0
    assert cfg.walk.schema_types == ["u", "b", "c", "b", "u"]
    assert cfg.vi.optimizer == "adam"


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        parse_config({"vi": {"learn_rate": 0.1}})
    with pytest.raises(ConfigError):
        parse_config({"mystery": 1})


def test_dump_and_reload_round_trip(tmp_path):
    cfg = RunConfig(seed=9)
    cfg.vi.epochs = 3
    path = tmp_path / "run.json"
    path.write_text(dump_config(cfg), encoding="utf-8")
    assert load_config(path) == cfg


def test_yaml_config(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("seed: 4\nsynth:\n  users: 12\n", encoding="utf-8")
    cfg = load_config(path)
    assert cfg.seed == 4 and cfg.synth.users == 12


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(bad)
