"""Tests for configuration parsing, environment overrides and run ids."""
import json
from fractions import Fraction

import pytest

from data.reference_systems import EXPLICIT_CONFIG, P0_CONFIG
from run_config import ConfigError, canonical_json, load_run_config, parse_run_config, run_id


def dump(data: dict) -> str:
    return json.dumps(data)


class TestParse:
    def test_reference_defaults(self):
        config = parse_run_config(dump(P0_CONFIG))
        assert config.system.stages == [1, 2, 3]
        assert config.system.lambda_bar == 2
        assert config.a == 2
        assert config.depth == 2
        assert config.caps.max_table == 10**7
        assert config.selected_groups == ("core", "system", "blocks", "fine", "basis", "net", "free")

    def test_rationals_as_strings(self):
        config = parse_run_config(dump({**P0_CONFIG, "a": "5/2"}))
        assert config.a == Fraction(5, 2)

    def test_explicit_rows(self):
        config = parse_run_config(dump(EXPLICIT_CONFIG))
        assert config.system.extension[1][2] == [Fraction(1, 2), Fraction(1, 2)]

    def test_floats_refused(self):
        with pytest.raises(ConfigError, match="a"):
            parse_run_config(dump({**P0_CONFIG, "a": 2.5}))

    def test_a_must_exceed_one(self):
        with pytest.raises(ConfigError, match="must exceed 1"):
            parse_run_config(dump({**P0_CONFIG, "a": 1}))

    def test_invalid_json_reports_position(self):
        with pytest.raises(ConfigError, match="line 1, column"):
            parse_run_config("{not json", "broken.json")

    def test_validation_reports_field_path(self):
        data = {**P0_CONFIG, "system": {**P0_CONFIG["system"], "stages": [2, 1]}}
        with pytest.raises(ConfigError, match="system.stages"):
            parse_run_config(dump(data))

    def test_unknown_preset(self):
        data = {**P0_CONFIG, "system": {**P0_CONFIG["system"], "extension": "cubic"}}
        with pytest.raises(ConfigError, match="unknown preset"):
            parse_run_config(dump(data))

    def test_unknown_suite_group(self):
        with pytest.raises(ConfigError, match="unknown suite groups"):
            parse_run_config(dump({**P0_CONFIG, "suites": ["core", "speed"]}))

    def test_extra_fields_forbidden(self):
        with pytest.raises(ConfigError):
            parse_run_config(dump({**P0_CONFIG, "colour": "blue"}))

    def test_suite_selection_keeps_catalogue_order(self):
        config = parse_run_config(dump({**P0_CONFIG, "suites": ["free", "core"]}))
        assert config.selected_groups == ("core", "free")
        assert parse_run_config(dump({**P0_CONFIG, "suites": []})).selected_groups == ()


class TestLoad:
    def test_environment_overrides(self, tmp_path, monkeypatch):
        path = tmp_path / "p0.json"
        path.write_text(dump(P0_CONFIG), encoding="utf-8")
        monkeypatch.setenv("BD_NETS_OUTPUT_DIR", str(tmp_path / "out"))
        monkeypatch.setenv("BD_NETS_WORKERS", "3")
        config = load_run_config(path)
        assert config.output_dir == str(tmp_path / "out")
        assert config.workers == 3

    def test_bad_worker_count(self, tmp_path, monkeypatch):
        path = tmp_path / "p0.json"
        path.write_text(dump(P0_CONFIG), encoding="utf-8")
        monkeypatch.setenv("BD_NETS_WORKERS", "many")
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(tmp_path / "absent.json")


class TestRunId:
    def test_ignores_output_dir_and_workers(self):
        first = parse_run_config(dump({**P0_CONFIG, "output_dir": "a", "workers": 1}))
        second = parse_run_config(dump({**P0_CONFIG, "output_dir": "b", "workers": 4}))
        assert run_id(first) == run_id(second)
        assert len(run_id(first)) == 16

    def test_depends_on_results(self):
        first = parse_run_config(dump(P0_CONFIG))
        second = parse_run_config(dump({**P0_CONFIG, "seed": 1}))
        assert run_id(first) != run_id(second)

    def test_canonical_json_writes_rationals_as_strings(self):
        config = parse_run_config(dump({**P0_CONFIG, "a": "5/2"}))
        assert json.loads(canonical_json(config))["a"] == "5/2"
