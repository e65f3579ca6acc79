"""
Verification matrix tests.
Check bookkeeping, sampling of rays and the report artifacts.
"""

import csv
import json
import math

import pytest

from hypergeometric_bps.bps import bps_spectrum, classify_ray
from hypergeometric_bps.config import RunConfig
from hypergeometric_bps.curves import CurveLabel, get_curve
from hypergeometric_bps.errors import ConfigError, ReportWriteError
from hypergeometric_bps.report import (
    MAX_LISTED_FAILURES,
    CheckResult,
    VerificationReport,
    cells,
    check_borel,
    check_closed_forms,
    check_comparisons,
    check_spectrum,
    check_tau_asymptotics,
    check_tau_identities,
    check_tr,
    check_watson,
    check_wkb,
    jump_sectors,
    prepare_template_context,
    run_report,
    sample_rays,
    write_report,
)
from hypergeometric_bps.utils import dumps


@pytest.fixture
def airy_report():
    return run_report(RunConfig(curve="Ai"))


@pytest.fixture
def failing_report():
    check = CheckResult("rh2", "asymptotics", 1e-6)
    check.record(1e-3, {"theta": 0.0, "hbar": 0.1})
    passing = CheckResult("spectrum", "active classes", 1e-12)
    passing.record(0.0, {})
    return VerificationReport(get_curve("Web", 1), 0, [passing, check])


class TestCheckResult:
    """Recording residuals and failures."""

    def test_record(self):
        check = CheckResult("demo", "demo check", 1e-8)
        check.record(1e-10, {"k": 1})
        check.record(3e-9, {"k": 2})
        assert check.passed
        assert check.cases == 2
        assert check.max_residual == 3e-9

    def test_failure_above_tolerance(self):
        check = CheckResult("demo", "demo check", 1e-8)
        check.record(1e-6, {"k": 3})
        assert not check.passed
        assert check.failures == [{"check": "demo", "case": {"k": 3}, "residual": 1e-6}]

    def test_nan_is_a_failure(self):
        check = CheckResult("demo", "demo check", 1e-8)
        check.record(float("nan"), {})
        assert not check.passed
        assert math.isnan(check.max_residual)

    def test_errors_are_failures(self):
        check = CheckResult("demo", "demo check", 1e-8)
        check.fail({"s": "0"}, "QuadratureFail: no convergence")
        assert check.failure_count == 1
        assert check.failures[0]["error"] == "QuadratureFail: no convergence"

    def test_failure_list_is_capped(self):
        check = CheckResult("demo", "demo check", 0.0)
        for i in range(MAX_LISTED_FAILURES + 5):
            check.record(1.0, {"i": i})
        assert check.failure_count == MAX_LISTED_FAILURES + 5
        assert len(check.failures) == MAX_LISTED_FAILURES

    def test_skip_counts_as_passed(self):
        check = CheckResult("demo", "demo check", 1e-8).skip("not applicable")
        assert check.passed
        assert check.to_dict()["skipped"] == "not applicable"

    def test_omitted_parts_are_listed_once(self):
        check = CheckResult("demo", "demo check", 1e-8)
        check.omit("ρ comparison: outside the strip")
        check.omit("ρ comparison: outside the strip")
        check.record(1e-10, {})
        assert check.passed
        assert check.to_dict()["omitted"] == ["ρ comparison: outside the strip"]


class TestSampling:
    """Rays and (ϑ, ħ) cells."""

    def test_configured_rays(self):
        structure = bps_spectrum(get_curve("Web", 1))
        assert sample_rays(structure, (0.0, 0.4)) == [0.0, 0.4]

    def test_fallback_to_bisectors(self):
        structure = bps_spectrum(get_curve("Web", 1))
        rays = sample_rays(structure, (math.pi / 2,))
        assert len(rays) == 2
        for ray in rays:
            assert not classify_ray(structure, ray).is_bps

    def test_empty_spectrum(self):
        assert sample_rays(bps_spectrum(get_curve("Ai")), (math.pi / 2,)) == [math.pi / 2]

    def test_cells_rotate_hbar(self):
        grid = cells([0.0, math.pi / 4], [0.1])
        assert grid[0] == (0.0, 0.1)
        assert grid[1][1] == pytest.approx(0.1 * complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))

    @pytest.mark.parametrize("hbar", [0, -0.1, 0.1j])
    def test_cells_reject_hbar(self, hbar):
        with pytest.raises(ConfigError):
            cells([0.0], [hbar])

    def test_jump_sectors(self):
        sectors = jump_sectors(bps_spectrum(get_curve("Web", 1)))
        assert [angle for angle, _ in sectors] == pytest.approx([math.pi / 2, 3 * math.pi / 2])
        assert all(width == pytest.approx(math.pi / 4) for _, width in sectors)


class TestChecks:
    def test_spectrum_matches_table(self):
        result, rows = check_spectrum(get_curve("HG", [1, 2, 4]))
        assert result.passed
        assert result.cases == 14
        assert len(rows) == 14

    def test_airy_report_passes(self, airy_report):
        assert airy_report.passed
        assert airy_report.failures == []
        assert airy_report.check("closed-forms").skipped

    def test_unknown_check(self, airy_report):
        with pytest.raises(KeyError):
            airy_report.check("no-such-check")

    def test_closed_forms_respect_k_max(self):
        result = check_closed_forms(CurveLabel.Web, 0, k_max=4)
        assert result.passed
        assert result.cases == 20 * 3

    def test_oracle_tolerances_follow_check_tol(self):
        airy = get_curve("Ai")
        assert check_tr(airy, 1e-6).tolerance == 1e-6
        assert check_wkb(airy, 1e-10, tol=1e-6).tolerance == pytest.approx(1e-5)
        borel, rows = check_borel(airy, [], 1e-10, tol=1e-6)
        assert borel.tolerance == 1e-6
        assert rows == []

    @pytest.mark.parametrize("label, masses", [("Web", 1), ("Bes", 1.2), ("Kum", [1, 0.4])])
    def test_watson(self, label, masses):
        curve = get_curve(label, masses, None)
        result = check_watson(curve, [0.3])
        assert result.passed, result.failures
        assert result.cases == len(curve.poles)

    @pytest.mark.parametrize("label, masses", [("Web", 1), ("Leg", 1.1), ("HG", [1, 2, 4])])
    def test_tau_asymptotics(self, label, masses):
        result = check_tau_asymptotics(get_curve(label, masses), [0.3])
        assert result.passed, result.failures
        assert result.cases == 1

    @pytest.mark.parametrize("check", [check_watson, check_tau_asymptotics])
    def test_asymptotic_rows_skip_airy(self, check):
        assert check(get_curve("Ai"), [0.0]).skipped

    def test_out_of_strip_comparisons_are_noted(self):
        curve = get_curve("Bes", 1, 3.5)
        grid = [(0.0, 0.2)]
        comparisons = check_comparisons(curve, grid, None)
        assert any(reason.startswith("ρ comparison") for reason in comparisons.omitted)
        assert comparisons.to_dict()["omitted"] == comparisons.omitted
        identities = check_tau_identities(curve, grid, None)
        assert any(reason.startswith("κ comparison") for reason in identities.omitted)

    def test_in_strip_comparisons_omit_nothing(self):
        curve = get_curve("Bes", 1, 0.3)
        assert check_comparisons(curve, [(0.0, 0.2)], None).omitted == []

    @pytest.mark.slow
    def test_weber_report(self):
        config = RunConfig(curve="Web", m=1.3, nu=0.2, thetas=(0.4,), hbars=(0.15,), seed=5)
        report = run_report(config)
        assert report.passed, report.failures
        assert report.check("difference-equation").cases > 0
        for name in ("tr-oracle", "wkb-oracle", "borel", "watson", "rh1-jump", "tau-asymptotics"):
            check = report.check(name)
            assert check.skipped is None
            assert check.cases > 0

    def test_deterministic_json(self):
        first = dumps(run_report(RunConfig(curve="Ai", seed=3)).to_dict())
        second = dumps(run_report(RunConfig(curve="Ai", seed=3)).to_dict())
        assert first == second


class TestArtifacts:
    """report.json, report.md and the CSV files."""

    def test_template_context(self, failing_report):
        context = prepare_template_context(failing_report)
        assert context["curve"]["label"] == "Web"
        assert context["passed"] is False
        assert context["failed_count"] == 1
        assert context["skipped_count"] == 0
        assert len(context["failures"]) == 1

    def test_write_report(self, failing_report, tmp_path):
        written = write_report(failing_report, tmp_path / "out")
        names = sorted(p.name for p in written)
        assert names == [
            "borel_residuals.csv",
            "rays.csv",
            "report.json",
            "report.md",
            "tau_fit.csv",
        ]
        data = json.loads((tmp_path / "out" / "report.json").read_text(encoding="utf-8"))
        assert data["passed"] is False
        assert data["failures"][0]["check"] == "rh2"
        with open(tmp_path / "out" / "rays.csv", encoding="utf-8") as f:
            assert next(csv.reader(f)) == ["class", "omega", "abs_Z", "arg_Z"]

    def test_output_dir_must_be_a_directory(self, failing_report, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(ConfigError):
            write_report(failing_report, blocker)

    def test_unwritable_artifact(self, failing_report, tmp_path):
        (tmp_path / "out" / "report.json").mkdir(parents=True)
        with pytest.raises(ReportWriteError, match="report.json"):
            write_report(failing_report, tmp_path / "out")
