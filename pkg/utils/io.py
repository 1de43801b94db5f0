import csv
import io
import json
import logging
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from models.carbon import IntervalSeries
from models.results import SolveResult, TracePoint
from utils.errors import UsageError

logger = logging.getLogger(__name__)

SERIES_HEADER = ["interval", "value"]


def series_csv(series: IntervalSeries) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SERIES_HEADER)
    for offset, value in enumerate(series.values):
        writer.writerow([series.start_index + offset, repr(float(value))])
    return buffer.getvalue()


def save_series_csv(series: IntervalSeries, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(series_csv(series), encoding="utf-8")
    return path


def read_series_csv(path: Union[str, Path]) -> Tuple[int, np.ndarray]:
    """
    Read an `interval,value` file

    Returns:
        (start_index, values); intervals must be consecutive
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows or [c.strip() for c in rows[0]] != SERIES_HEADER:
        raise UsageError(f"{path}: expected header 'interval,value'")
    body = [r for r in rows[1:] if r]
    if not body:
        raise UsageError(f"{path}: no data rows")
    try:
        intervals = [int(r[0]) for r in body]
        values = np.array([float(r[1]) for r in body])
    except (ValueError, IndexError) as e:
        raise UsageError(f"{path}: malformed row ({e})") from e
    if intervals != list(range(intervals[0], intervals[0] + len(intervals))):
        raise UsageError(f"{path}: intervals must be consecutive")
    return intervals[0], values


def save_json(payload, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Saved {path}")
    return path


def trace_csv(trace: Sequence[TracePoint]) -> str:
    """Convergence curve as `evals,best_energy` rows"""
    lines = ["evals,best_energy"]
    lines += [f"{evals},{best!r}" for evals, best in trace]
    return "\n".join(lines) + "\n"


def save_trace_csv(result: SolveResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(trace_csv(result.trace), encoding="utf-8")
    return path
