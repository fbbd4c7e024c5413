"""
Output processing for the fraclt package.
Writes plot-ready CSV artifacts (paths, local time fields, residual series,
verification reports) and the run summary. Numbers are written at full
double precision and no artifact carries a timestamp, so identical runs
produce byte-identical files.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

from ..core.types import LocalTimeField, PathGrid, ResidualSeries, VerificationReport
from ..exceptions import ProcessingError
from ..utils import format_float

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("name", "statistic", "threshold", "decision", "p_value", "n")


class OutputProcessor:
    """Write experiment artifacts below one output directory"""

    def __init__(self, output_dir: Union[str, Path]):
        """
        Initialize the processor.

        Args:
            output_dir: Directory receiving all artifacts (created on first write)
        """
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []

    def _target(self, relative: str) -> Path:
        path = self.output_dir / relative
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ProcessingError(f"Cannot create {path.parent}: {e}")
        return path

    def _write_rows(self, relative: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
        path = self._target(relative)
        try:
            with path.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
        except OSError as e:
            raise ProcessingError(f"Failed to write {path}: {e}")
        self.written.append(path)
        logger.debug("Wrote %s", path)
        return path

    def _write_text(self, relative: str, text: str) -> Path:
        path = self._target(relative)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise ProcessingError(f"Failed to write {path}: {e}")
        self.written.append(path)
        return path

    def write_path(self, path: PathGrid, relative: str) -> Path:
        """CSV with header t,value"""
        rows = ((format_float(t), format_float(x)) for t, x in zip(path.times, path.values))
        return self._write_rows(relative, ("t", "value"), rows)

    def write_field(self, field: LocalTimeField, relative: str) -> Path:
        """
        Long-format CSV with header x,t,L plus a key = value sidecar (.meta)
        holding the estimator and its bandwidth.
        """
        rows = (
            (format_float(x), format_float(t), format_float(field.values[i, j]))
            for i, x in enumerate(field.x_grid)
            for j, t in enumerate(field.t_grid)
        )
        target = self._write_rows(relative, ("x", "t", "L"), rows)
        spec = field.source_spec
        meta: Dict[str, Any] = {
            "estimator": field.estimator,
            "bandwidth": format_float(field.bandwidth),
            "kind": spec.kind,
            "tau": format_float(spec.tau),
            "horizon": format_float(spec.horizon),
            "n_steps": spec.n_steps,
            "sampler": spec.sampler,
        }
        for key in sorted(field.metadata):
            meta[key] = field.metadata[key]
        self._write_text(relative + ".meta", "".join(f"{k} = {v}\n" for k, v in meta.items()))
        return target

    def write_residuals(self, series: Sequence[ResidualSeries], relative: str) -> Path:
        """CSV with header replicate,t,J"""
        rows = (
            (str(r), format_float(t), format_float(j))
            for r, s in enumerate(series)
            for t, j in zip(s.t_grid, s.J)
        )
        return self._write_rows(relative, ("replicate", "t", "J"), rows)

    def write_reports(self, reports: Sequence[VerificationReport], relative: str) -> Path:
        """CSV with header name,statistic,threshold,decision,p_value,n"""
        rows = []
        for report in reports:
            row = report.as_row()
            rows.append((
                row["name"],
                format_float(row["statistic"]),
                format_float(row["threshold"]),
                row["decision"],
                format_float(row["p_value"]),
                str(row["n"]),
            ))
        return self._write_rows(relative, REPORT_COLUMNS, rows)

    def format_reports(self, reports: Sequence[VerificationReport]) -> str:
        """Structured text: one block per report with its metadata"""
        blocks = []
        for report in reports:
            lines = [
                f"[{report.name}]",
                f"decision = {report.decision}",
                f"statistic = {format_float(report.statistic)}",
                f"threshold = {format_float(report.threshold)}",
                f"p_value = {format_float(report.p_value)}",
                f"n = {report.n_replicates}",
            ]
            for key in sorted(report.metadata):
                lines.append(f"{key} = {_format_value(report.metadata[key])}")
            blocks.append("\n".join(lines) + "\n")
        return "\n".join(blocks)

    def write_report_text(self, reports: Sequence[VerificationReport], relative: str) -> Path:
        return self._write_text(relative, self.format_reports(reports))

    def write_summary(self, reports: Sequence[VerificationReport], relative: str = "summary.txt") -> Path:
        """One 'name decision' line per report"""
        return self._write_text(relative, "".join(f"{r.name} {r.decision}\n" for r in reports))


def _format_value(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_value(v) for v in value)
    try:
        return format_float(float(value)) if not isinstance(value, (str, int)) else str(value)
    except (TypeError, ValueError):
        return str(value)
