"""Tests for the suite catalogue, result records and the runner."""
from collections import Counter

import pytest

import checks.context
import checks.runner as runner
from checks import SUITE_GROUPS
from checks.context import VerificationContext
from checks.registry import CATALOGUE, Finding, Suite, SuiteResult, at_most, no_failures, suite
from construction.errors import CapExceededError, GridExhaustedError


def failing_check(context):
    raise RuntimeError("boom")


def capped_check(context):
    raise CapExceededError("retraction tables", 100, 10)


def grid_check(context):
    raise GridExhaustedError(2, 30, 27)


def passing_check(context):
    return Finding(True, 1, 0)


class TestCatalogue:
    def test_names_are_unique(self):
        names = [s.name for s in runner.CATALOGUE]
        assert len(names) == len(set(names))

    def test_every_group_has_suites(self):
        groups = Counter(s.group for s in CATALOGUE)
        assert set(groups) == set(SUITE_GROUPS)

    def test_unknown_group(self):
        with pytest.raises(ValueError):
            suite("anything", "speed", "claim")

    def test_duplicate_name(self):
        with pytest.raises(ValueError, match="registered twice"):
            suite("global-commutation", "basis", "claim")(failing_check)


class TestFindings:
    def test_at_most(self):
        assert at_most(3, 5).passed
        finding = at_most(7, 5, "x", "detail")
        assert not finding.passed
        assert finding.witness == "x"

    def test_no_failures(self):
        finding = no_failures(["k=3"], 10, "points")
        assert not finding.passed
        assert finding.worst == 1
        assert finding.witness == "k=3"
        assert finding.detail == "10 points checked"
        assert no_failures([], 10, "points").passed

    def test_result_status(self):
        entry = Suite("demo", "core", "claim", failing_check)
        assert entry.result(None, "not run").status == "skipped"
        assert entry.result(Finding(True, 1, 0)).status == "pass"
        failed = entry.result(Finding(False, 1, 2))
        assert failed.status == "fail"
        assert failed.as_dict()["worst"] == "2"


class TestRunner:
    def test_exception_becomes_failure(self, p0_context, monkeypatch):
        monkeypatch.setattr(runner, "CATALOGUE", [Suite("boom", "core", "claim", failing_check)])
        [result] = runner.run_suites(p0_context, ("core",))
        assert result.status == "fail"
        assert result.detail == "RuntimeError: boom"

    def test_cap_becomes_skip(self, p0_context, monkeypatch):
        monkeypatch.setattr(runner, "CATALOGUE", [Suite("capped", "basis", "claim", capped_check)])
        [result] = runner.run_suites(p0_context, ("basis",))
        assert result.status == "skipped"
        assert "exceeds cap" in result.detail

    def test_grid_exhaustion_reported_once(self, p0_context, monkeypatch):
        monkeypatch.setattr(
            runner,
            "CATALOGUE",
            [
                Suite("needs-mu", "net", "claim", grid_check),
                Suite("also-needs-mu", "net", "claim", grid_check),
                Suite("independent", "net", "claim", passing_check),
            ],
        )
        first, second, third = runner.run_suites(p0_context, ("net",))
        assert first.status == "fail"
        assert first.detail.startswith("GridExhaustedError")
        assert (first.worst, first.bound, first.witness) == ("30", "27", "cluster 2")
        assert second.status == "fail"
        assert second.detail == "dependent failure: perturbation μ unavailable, see needs-mu"
        assert second.worst is None
        assert third.status == "pass"

    def test_unselected_groups_are_listed(self, p0_context):
        results = runner.run_suites(p0_context, ("core",))
        assert [r.name for r in results] == [s.name for s in CATALOGUE]
        for r in results:
            if r.group != "core":
                assert r.status == "skipped"
                assert r.detail == "group not selected"

    def test_p0_passes_every_suite(self, p0_context):
        results = runner.run_suites(p0_context, SUITE_GROUPS)
        failed = [(r.name, r.worst, r.witness, r.detail) for r in results if r.status == "fail"]
        assert failed == []
        assert len(results) == len(CATALOGUE)
        assert all(r.status == "pass" for r in results)

    @pytest.mark.parametrize("name", ["affine_context", "explicit_context"])
    def test_rational_extensions_pass_every_suite(self, name, request):
        context = request.getfixturevalue(name)
        results = runner.run_suites(context, SUITE_GROUPS)
        failed = [(r.name, r.worst, r.witness, r.detail) for r in results if r.status == "fail"]
        assert failed == []
        assert all(r.status == "pass" for r in results)

    def test_results_are_records(self, p0_context):
        results = runner.run_suites(p0_context, ("system",))
        assert all(isinstance(r, SuiteResult) for r in results)


class TestGridExhaustedRun:
    @pytest.fixture
    def exhausted(self, p0_config, p0_system, p0, monkeypatch):
        calls = []

        def exhausted_perturb(construction, equiv, workers=1):
            calls.append(equiv)
            raise GridExhaustedError(0, 81, 27)

        monkeypatch.setattr(checks.context, "perturb", exhausted_perturb)
        return VerificationContext(p0_config, p0_system, p0), calls

    def test_perturbation_attempted_once(self, exhausted):
        context, calls = exhausted
        for _ in range(2):
            with pytest.raises(GridExhaustedError):
                context.net
        assert len(calls) == 1
        assert context.net_error.needed == 81

    def test_net_group_has_one_root_cause(self, exhausted):
        context, calls = exhausted
        results = [r for r in runner.run_suites(context, ("net",)) if r.group == "net"]
        assert all(r.status == "fail" for r in results)
        roots = [r for r in results if r.detail.startswith("GridExhaustedError")]
        assert len(roots) == 1
        assert roots[0].worst == "81"
        assert all(r.detail.endswith(f"see {roots[0].name}") for r in results if r is not roots[0])
        assert len(calls) == 1
