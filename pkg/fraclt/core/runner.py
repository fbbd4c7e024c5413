"""
Experiment orchestration: sample, estimate, verify and write artifacts.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from ..analysis.checks import CheckContext, CheckRegistry
from ..estimators.field import default_level_grid, local_time_field
from ..estimators.occupation import default_bandwidth
from ..processors.output import OutputProcessor
from .client import SimulationClient
from .types import Decision, EstimatorType, ExperimentConfig, LocalTimeField, PathGrid, ReportList

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

FIELD_TIMES = 64


@dataclass
class RunResult:
    """Exit status and what a run produced"""
    exit_status: int
    reports: ReportList = field(default_factory=list)
    artifacts: List[Path] = field(default_factory=list)


def exit_status(reports: ReportList) -> int:
    """1 if any report FAILed, else 0"""
    return EXIT_FAILED if any(r.decision == Decision.FAIL for r in reports) else EXIT_OK


class ExperimentRunner:
    """Run one configured experiment"""

    def __init__(
        self,
        config: ExperimentConfig,
        client: Optional[SimulationClient] = None,
        output: Optional[OutputProcessor] = None,
    ):
        self.config = config
        self.client = client or SimulationClient(threads=config.threads, cholesky_cap=config.cholesky_cap)
        self.output = output or OutputProcessor(config.output_dir)

    def simulate(self) -> List[PathGrid]:
        """Sample every replicate; write path CSVs when configured"""
        config = self.config
        paths = self.client.collect(config.process, config.replicates, config.master_seed)
        if config.write_paths:
            for r, path in enumerate(paths):
                self.output.write_path(path, f"paths/path_{r:05d}.csv")
        if config.write_field:
            self.write_field(paths[0])
        logger.info("Simulated %d paths", len(paths))
        return paths

    def field_for(
        self,
        path: PathGrid,
        estimator: str = EstimatorType.EPS_OCCUPATION,
        n_times: int = FIELD_TIMES,
    ) -> LocalTimeField:
        """Field on the default level grid and n_times uniform grid times"""
        eps = default_bandwidth(path)
        levels = default_level_grid(path, eps, self.config.verify.n_levels)
        n = path.spec.n_steps
        indices = np.unique(np.linspace(0, n, min(n_times, n) + 1).round().astype(int))[1:]
        bandwidth = eps if estimator == EstimatorType.EPS_OCCUPATION else None
        return local_time_field(
            path, levels, indices * path.dt, estimator=estimator, bandwidth=bandwidth,
            workers=self.config.threads,
        )

    def write_field(self, path: PathGrid, estimator: str = EstimatorType.EPS_OCCUPATION) -> LocalTimeField:
        field_ = self.field_for(path, estimator)
        self.output.write_field(field_, f"fields/field_{estimator}.csv")
        return field_

    def localtime(self, estimator: str = EstimatorType.EPS_OCCUPATION, replicate: int = 0) -> LocalTimeField:
        """Estimate and write the field of one replicate path"""
        path = self.client.sample(self.config.process, replicate, self.config.master_seed)
        if self.config.write_paths:
            self.output.write_path(path, f"paths/path_{replicate:05d}.csv")
        return self.write_field(path, estimator)

    def verify(self, checks: Optional[Sequence[str]] = None) -> ReportList:
        """Run the named checks (all registered ones when none are named)"""
        names = list(checks) if checks else CheckRegistry.list()
        context = CheckContext(config=self.config, client=self.client)
        reports: ReportList = []
        for name in names:
            produced = CheckRegistry.run(name, context)
            self.output.write_reports(produced, f"reports/{name}.csv")
            reports.extend(produced)
        residuals = context.artifacts.get("residuals")
        if residuals:
            self.output.write_residuals(residuals, "residuals.csv")
        return reports

    def finish(self, reports: ReportList) -> RunResult:
        """Write the combined reports and the summary"""
        if reports:
            self.output.write_reports(reports, "reports.csv")
            self.output.write_report_text(reports, "reports.txt")
        self.output.write_summary(reports)
        status = exit_status(reports)
        return RunResult(exit_status=status, reports=reports, artifacts=list(self.output.written))


def run(config: ExperimentConfig, client: Optional[SimulationClient] = None) -> RunResult:
    """
    Run an experiment end to end.

    Without checks the replicate paths are simulated and written; otherwise
    the configured checks run. Errors propagate to the caller, which maps
    them onto exit statuses.

    Returns:
        RunResult: Exit status 0 iff no check FAILed, plus reports and artifacts
    """
    runner = ExperimentRunner(config, client)
    if not config.checks:
        runner.simulate()
        return runner.finish([])
    return runner.finish(runner.verify(config.checks))
