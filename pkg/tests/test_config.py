"""
Configuration loading tests.
"""

import json
from pathlib import Path

import pytest

from hypergeometric_bps.config import RunConfig, Tolerances, default_workers, load_config
from hypergeometric_bps.errors import ConfigError
from hypergeometric_bps.utils import parse_complex


class TestLoadConfig:
    """YAML and JSON configuration files."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("HGBPS_WORKERS", raising=False)
        config = load_config(None)
        assert config == RunConfig()
        assert config.tolerances == Tolerances()

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(
            "curve: Bes\n"
            "m: 1.5\n"
            "hbars: ['0.1+0.05i', 0.2]\n"
            "thetas: 0.3\n"
            "tolerances:\n"
            "  quad_tol: 1.0e-9\n",
            encoding="utf-8",
        )
        config = load_config(path)
        assert config.curve == "Bes"
        assert config.m == 1.5
        assert config.hbars == (0.1 + 0.05j, 0.2 + 0j)
        assert config.thetas == (0.3,)
        assert config.tolerances.quad_tol == 1e-9
        assert config.tolerances.k_max == Tolerances().k_max

    def test_json_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"curve": "HG", "m": [1, 2, 4], "order": 5}), encoding="utf-8")
        config = load_config(path)
        assert config.m == [1, 2, 4]
        assert config.order == 5

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_config(path).curve == RunConfig().curve

    @pytest.mark.parametrize(
        "content",
        [
            "colour: red\n",
            "tolerances:\n  precision: 3\n",
            "tolerances:\n  k_max: 1\n",
            "tolerances:\n  check_tol: 0\n",
            "- just\n- a list\n",
            "order: 0\n",
            "genus: 9\n",
            "hbars: []\n",
            "curve: [unclosed\n",
        ],
    )
    def test_invalid_files(self, tmp_path, content):
        path = tmp_path / "bad.yaml"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.yaml")


class TestOverrides:
    def test_none_keeps_value(self):
        config = RunConfig(order=5).with_overrides(order=None, seed=7)
        assert config.order == 5
        assert config.seed == 7

    def test_values_are_coerced(self):
        config = RunConfig().with_overrides(hbars=("0.2-0.1i",), output_dir="out")
        assert config.hbars == (0.2 - 0.1j,)
        assert config.output_dir == Path("out")

    def test_invalid_override(self):
        with pytest.raises(ConfigError):
            RunConfig().with_overrides(workers=0)


class TestWorkers:
    """Worker count from the environment."""

    def test_unset(self, monkeypatch):
        monkeypatch.delenv("HGBPS_WORKERS", raising=False)
        assert default_workers() == 1

    def test_from_environment(self, monkeypatch):
        monkeypatch.setenv("HGBPS_WORKERS", "3")
        assert default_workers() == 3
        assert load_config(None).workers == 3

    @pytest.mark.parametrize("raw", ["many", "0", "-2"])
    def test_invalid(self, monkeypatch, raw):
        monkeypatch.setenv("HGBPS_WORKERS", raw)
        with pytest.raises(ConfigError, match="HGBPS_WORKERS"):
            default_workers()


class TestParseComplex:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            (1, 1 + 0j),
            (0.5, 0.5 + 0j),
            ("1+2i", 1 + 2j),
            ("1 - 2j", 1 - 2j),
            ("i", 1j),
            ("-i", -1j),
            ("(0.3+0.1i)", 0.3 + 0.1j),
            ({"re": 1, "im": -2}, 1 - 2j),
            ({"im": 3}, 3j),
        ],
    )
    def test_valid(self, raw, expected):
        assert parse_complex(raw) == expected

    @pytest.mark.parametrize("raw", [True, "abc", None, [1, 2], {"re": "x"}])
    def test_invalid(self, raw):
        with pytest.raises(ConfigError):
            parse_complex(raw)
