import dataclasses

import pytest

from fraclt.core.runner import EXIT_FAILED, EXIT_OK, ExperimentRunner, exit_status, run
from fraclt.core.types import (
    Decision,
    EstimatorType,
    ExperimentConfig,
    ProcessKind,
    ProcessSpec,
    VerificationReport,
    VerifySettings,
)


@pytest.fixture
def config(tmp_path):
    return ExperimentConfig(
        process=ProcessSpec(kind=ProcessKind.FBM, tau=0.5, horizon=1.0, n_steps=64),
        replicates=3,
        master_seed=1,
        output_dir=str(tmp_path / "run"),
        threads=2,
        verify=VerifySettings(n_levels=65),
    )


def _report(decision):
    return VerificationReport(name="x", statistic=0.0, threshold=0.0, decision=decision, n_replicates=1)


class TestExitStatus:
    def test_only_failures_count(self):
        assert exit_status([]) == EXIT_OK
        assert exit_status([_report(Decision.PASS), _report(Decision.INCONCLUSIVE)]) == EXIT_OK
        assert exit_status([_report(Decision.PASS), _report(Decision.FAIL)]) == EXIT_FAILED


class TestSimulate:
    def test_writes_one_file_per_replicate(self, config, tmp_path):
        paths = ExperimentRunner(config).simulate()
        assert len(paths) == 3
        out = tmp_path / "run" / "paths"
        assert sorted(p.name for p in out.iterdir()) == ["path_00000.csv", "path_00001.csv", "path_00002.csv"]
        lines = (out / "path_00001.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,value"
        assert len(lines) == 66

    def test_optional_field(self, config, tmp_path):
        runner = ExperimentRunner(dataclasses.replace(config, write_paths=False, write_field=True))
        runner.simulate()
        out = tmp_path / "run"
        assert not (out / "paths").exists()
        assert (out / "fields" / "field_eps_occupation.csv").exists()
        assert (out / "fields" / "field_eps_occupation.csv.meta").exists()

    def test_reruns_are_byte_identical(self, config, tmp_path):
        ExperimentRunner(config).simulate()
        first = (tmp_path / "run" / "paths" / "path_00002.csv").read_bytes()
        ExperimentRunner(dataclasses.replace(config, threads=1)).simulate()
        assert (tmp_path / "run" / "paths" / "path_00002.csv").read_bytes() == first


class TestLocalTime:
    @pytest.mark.parametrize("estimator", EstimatorType.ALL)
    def test_field_of_one_replicate(self, config, tmp_path, estimator):
        field = ExperimentRunner(config).localtime(estimator, replicate=1)
        assert field.estimator == estimator
        assert field.t_grid.size == 64
        assert field.t_grid[-1] == pytest.approx(1.0)
        assert field.x_grid.size == 65
        out = tmp_path / "run"
        assert (out / "paths" / "path_00001.csv").exists()
        meta = (out / "fields" / f"field_{estimator}.csv.meta").read_text(encoding="utf-8")
        assert meta.startswith(f"estimator = {estimator}\n")


class TestVerify:
    def test_reports_and_artifacts(self, config, tmp_path):
        runner = ExperimentRunner(config)
        reports = runner.verify(["constants", "additivity"])
        assert [r.name for r in reports][-1] == "additivity"
        result = runner.finish(reports)
        assert result.exit_status == exit_status(reports)
        out = tmp_path / "run"
        for name in ("reports/constants.csv", "reports/additivity.csv", "reports.csv", "reports.txt", "summary.txt"):
            assert out / name in result.artifacts
        summary = (out / "summary.txt").read_text(encoding="utf-8").splitlines()
        assert summary == [f"{r.name} {r.decision}" for r in reports]

    def test_residuals_are_written(self, config, tmp_path):
        settings = dataclasses.replace(config.verify, min_rate_replicates=3, rate_horizon=100.0, rate_steps=64,
                                       rate_window=(5.0, 100.0), n_boot=10)
        runner = ExperimentRunner(dataclasses.replace(config, verify=settings))
        runner.verify(["strong_approximation"])
        lines = (tmp_path / "run" / "residuals.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "replicate,t,J"


class TestRun:
    def test_without_checks_simulates(self, config, tmp_path):
        result = run(config)
        assert result.exit_status == EXIT_OK
        assert result.reports == []
        assert tmp_path / "run" / "summary.txt" in result.artifacts
        assert (tmp_path / "run" / "paths" / "path_00000.csv").exists()
        assert (tmp_path / "run" / "summary.txt").read_text(encoding="utf-8") == ""

    def test_exact_check_passes(self, config):
        result = run(dataclasses.replace(config, checks=("additivity",)))
        assert result.exit_status == EXIT_OK
        assert [r.decision for r in result.reports] == [Decision.PASS]

    def test_reports_do_not_depend_on_threads(self, config, tmp_path):
        checks = ("constants", "covariance", "additivity", "first_order_limit")
        written = []
        for threads in (1, 4):
            out = tmp_path / f"threads{threads}"
            run(dataclasses.replace(config, replicates=8, threads=threads, checks=checks, output_dir=str(out)))
            written.append((out / "reports.csv").read_bytes())
        assert written[0] == written[1]
        assert written[0].count(b"\n") > len(checks)
