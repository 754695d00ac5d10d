import json
import logging

from config import DEFAULT_CONFIG, Config, get_config, reset_config


def test_defaults_when_file_missing(tmp_path):
    config = Config(tmp_path / "absent.json")
    assert config.get("phase1.r") == 40
    assert config.get("phase1.k") == 100
    assert config.get("phase2.alpha") == 0.5
    assert config.get("phase1.beta") == 0.95
    assert config.get("no.such.key", "fallback") == "fallback"


def test_file_values_merge_over_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"phase1": {"r": 8}, "run": {"threads": 3}}))
    config = Config(path)
    assert config.get("phase1.r") == 8
    assert config.get("phase1.k") == 100
    assert config.threads() == 3


def test_corrupt_file_falls_back_to_defaults(tmp_path, caplog):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with caplog.at_level(logging.ERROR):
        config = Config(path)
    assert config.get("phase2.max_rounds") == DEFAULT_CONFIG["phase2"]["max_rounds"]
    assert "Error loading config" in caplog.text


def test_set_persists(tmp_path):
    path = tmp_path / "nested" / "config.json"
    Config(path).set("phase2.alpha", 0.7)
    assert Config(path).get("phase2.alpha") == 0.7


def test_global_instance_follows_environment(isolated_config):
    isolated_config.write_text(json.dumps({"run": {"seed": 42}}))
    assert reset_config().get("run.seed") == 42
    assert get_config() is get_config()


def test_threads_default_to_available_cpus(tmp_path):
    assert Config(tmp_path / "absent.json").threads() >= 1
