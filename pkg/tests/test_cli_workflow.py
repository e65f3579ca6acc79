"""
CLI workflow integration tests.
Tests complete runs of the hgbps subcommands.
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from hypergeometric_bps import __version__
from hypergeometric_bps.cli import _parameter_values, app
from hypergeometric_bps.curves import get_curve
from hypergeometric_bps.errors import ConfigError
from hypergeometric_bps.report import CheckResult, VerificationReport

pytestmark = pytest.mark.integration


def coefficient(series: dict, k: int) -> complex:
    value = series["coefficients"][k - series["k_min"]]
    return complex(value["re"], value["im"])


@pytest.fixture
def failing_report():
    check = CheckResult("rh2", "asymptotics", 1e-6)
    check.record(1e-3, {"theta": 0.0})
    return VerificationReport(get_curve("Web", 1), 0, [check])


class TestCLIWorkflows:
    """Test complete CLI user workflows."""

    @pytest.fixture
    def runner(self):
        """CLI runner fixture."""
        return CliRunner()

    @pytest.fixture
    def invoke(self, runner, tmp_path):
        """Run a subcommand with --output and return the exit code and parsed JSON."""

        def run(*args):
            output = tmp_path / "result.json"
            if output.exists():
                output.unlink()
            result = runner.invoke(app, ["--output", str(output), *args])
            data = json.loads(output.read_text(encoding="utf-8")) if output.exists() else None
            return result, data

        return run

    def test_version(self, runner):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_spectrum_command(self, invoke):
        result, data = invoke("spectrum", "--curve", "Web", "--m", "1")
        assert result.exit_code == 0
        assert len(data["active"]) == 2
        assert data["uncoupled"] is True
        assert data["genericity"]["generic"] is True
        assert sorted(c["omega"] for c in data["active"]) == [1, 1]

    def test_spectrum_with_keyed_masses(self, invoke):
        result, data = invoke("spectrum", "--curve", "Kum", "--m", "0=1,inf=0.4")
        assert result.exit_code == 0
        assert len(data["active"]) == 6

    def test_voros_command(self, invoke):
        result, data = invoke("voros", "--curve", "Web", "--m", "1", "-k", "3")
        assert result.exit_code == 0
        assert data["order"] == 3
        (path,) = data["paths"]
        assert coefficient(path["series"], 1) == pytest.approx(-1 / 24)
        assert len(path["closed_form"]) == 3
        assert len(data["cycles"]) == 2

    def test_free_energy_command(self, invoke):
        result, data = invoke("free-energy", "--curve", "Web", "--m", "1", "-g", "3", "--hbar", "0.1")
        assert result.exit_code == 0
        assert data["F"]["2"]["re"] == pytest.approx(-1 / 240)
        assert data["F"]["3"]["re"] == pytest.approx(1 / 1008)
        assert "1" in data["F"]
        assert "partial_sum" in data

    def test_rhp_eval_command(self, invoke):
        result, data = invoke(
            "rhp-eval", "--curve", "Bes", "--m", "1", "--nu", "0.2", "--kind", "min", "--hbar", "0.2"
        )
        assert result.exit_code == 0
        assert data["kind"] == "min"
        assert len(data["values"]) == 2

    def test_jump_check_command(self, invoke):
        result, data = invoke("jump-check", "--curve", "Whi", "--m", "1.2", "--nu", "0.1")
        assert result.exit_code == 0
        assert len(data["rays"]) == 2
        assert all(row["residual"] < 1e-11 for row in data["rays"])

    def test_tau_command(self, invoke):
        result, data = invoke("tau", "--curve", "Web", "--m", "1", "--hbar", "0.15")
        assert result.exit_code == 0
        assert set(data["log_tau"]) == {"vor", "min", "hol"}
        assert set(data["defining_relation"]) == {"inf"}

    def test_borel_sum_command(self, invoke):
        result, data = invoke("borel-sum", "--curve", "Leg", "--m", "1.1", "--hbar", "0.2")
        assert result.exit_code == 0
        (entry,) = data["results"]
        assert "laplace" not in entry

    @pytest.mark.slow
    def test_tr_oracle_command(self, invoke):
        result, data = invoke("tr-oracle", "--curve", "Web", "--m", "1", "--g", "2")
        assert result.exit_code == 0
        assert data["abs_diff"] < 1e-8

    @pytest.mark.slow
    def test_wkb_oracle_command(self, invoke):
        result, data = invoke("wkb-oracle", "--curve", "Bes", "--m", "1", "--nu", "0.1", "-k", "4")
        assert result.exit_code == 0
        assert len(data["results"][0]["numeric"]) == 4

    def test_failed_comparison_keeps_stdout_one_document(self, runner):
        with patch("hypergeometric_bps.cli.tr_free_energy", return_value=1.0):
            result = runner.invoke(app, ["tr-oracle", "--curve", "Web", "--m", "1", "--g", "2"])
        assert result.exit_code == 1
        data = json.loads(result.stdout)
        assert data["g"] == 2
        (failure,) = data["failures"]
        assert failure["check"] == "tr-oracle"

    def test_check_tol_from_config(self, invoke, tmp_path):
        config = tmp_path / "strict.yaml"
        config.write_text("tolerances:\n  check_tol: 1.0e-14\n", encoding="utf-8")
        args = ["tr-oracle", "--curve", "Web", "--m", "1"]
        with patch("hypergeometric_bps.cli.tr_free_energy", return_value=-1 / 240 + 1e-12):
            loose, _ = invoke(*args)
            result, data = invoke("--config", str(config), *args)
        assert loose.exit_code == 0
        assert result.exit_code == 1
        assert data["failures"][0]["check"] == "tr-oracle"

    def test_k_max_from_config(self, runner, tmp_path):
        config = tmp_path / "short.yaml"
        config.write_text("tolerances:\n  k_max: 4\n", encoding="utf-8")
        args = ["--config", str(config), "voros", "--curve", "Web", "--m", "1"]
        assert runner.invoke(app, [*args, "-k", "3"]).exit_code == 0
        result = runner.invoke(app, [*args, "-k", "4"])
        assert result.exit_code == 1
        assert "OrderTooLarge" in result.output

    def test_config_file_with_flag_override(self, invoke, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text("curve: Bes\nm: 2\norder: 2\n", encoding="utf-8")
        result, data = invoke("--config", str(config), "voros", "-k", "4")
        assert result.exit_code == 0
        assert data["curve"]["label"] == "Bes"
        assert data["order"] == 4

    @pytest.mark.e2e
    def test_report_command(self, runner, tmp_path):
        out = tmp_path / "report"
        result = runner.invoke(app, ["report", "--curve", "Ai", "--output-dir", str(out)])
        assert result.exit_code == 0
        assert "All checks passed" in result.output
        for name in ("report.json", "report.md", "rays.csv", "borel_residuals.csv", "tau_fit.csv"):
            assert (out / name).exists()
        assert json.loads((out / "report.json").read_text(encoding="utf-8"))["passed"] is True

    def test_report_failures_exit_one(self, runner, tmp_path, failing_report):
        with patch("hypergeometric_bps.cli.generate_report", return_value=failing_report):
            result = runner.invoke(app, ["report", "--curve", "Web", "--m", "1", "-d", str(tmp_path)])
        assert result.exit_code == 1
        assert '"failures"' in result.output
        assert "rh2" in result.output


class TestParameterValues:
    def test_positional_values_pass_through(self):
        assert _parameter_values("1,2,3") == "1,2,3"
        assert _parameter_values(None) is None

    def test_keyed_values(self):
        assert _parameter_values("0=1, inf=2+i") == {"0": "1", "inf": "2+i"}

    def test_mixed_values(self):
        with pytest.raises(ConfigError):
            _parameter_values("0=1,2")


def test_console_script_target():
    pyproject = Path(__file__).parent.parent / "pyproject.toml"
    assert 'hgbps = "hypergeometric_bps.cli:app"' in pyproject.read_text(encoding="utf-8")
