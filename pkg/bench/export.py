import json
import logging
from pathlib import Path
from typing import List, Union

from bench.runner import BenchReport
from utils.io import trace_csv

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")
SUMMARY_COLUMNS = (
    "solver", "median_evals_to_within", "iqr_evals_to_within", "reached",
    "median_best_energy", "total_carbon_g", "median_carbon_reduction_vs_greedy",
    "carbon_reduction_vs_greedy", "violations",
)


def _cell(value) -> str:
    return "" if value is None else repr(value) if isinstance(value, float) else str(value)


def report_json(report: BenchReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def summary_csv(report: BenchReport) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for name, summary in sorted(report.summary.items()):
        row = summary.model_dump()
        lines.append(",".join([name] + [_cell(row[c]) for c in SUMMARY_COLUMNS[1:]]))
    return "\n".join(lines) + "\n"


def write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise OSError(e.errno, f"cannot write {path}: {e.strerror}", str(path)) from e
    return path


def export(report: BenchReport, out_dir: Union[str, Path], fmt: str = "json") -> List[Path]:
    """
    Write per-instance trace CSVs and report.json; csv format adds summary.csv

    Returns:
        Paths written, in a fixed order
    """
    if fmt not in FORMATS:
        raise ValueError(f"Unknown export format {fmt!r}; choose from {FORMATS}")
    out_dir = Path(out_dir)
    written = []
    for instance in report.instances:
        for name, run in sorted(instance.runs.items()):
            path = out_dir / "traces" / f"{instance.seed}_{name}.csv"
            written.append(write_text(path, trace_csv(run.trace)))
    written.append(write_text(out_dir / "report.json", report_json(report)))
    if fmt == "csv":
        written.append(write_text(out_dir / "summary.csv", summary_csv(report)))
    logger.info(f"Exported {len(written)} files to {out_dir}")
    return written
