"""
CSV and INI writers for run outputs.

All files are UTF-8 with LF line endings; floats are written with ``repr``
so that values read back are bit-identical.
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np

from ..optimization.trace import RunTrace

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(
    path: PathLike,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Sequence[str] = (),
) -> Path:
    """Write a header row and data rows as CSV, after optional ``# `` comment lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    logger.info("Wrote %s", path)
    return path


def trace_header(trace: RunTrace) -> list[str]:
    n_violation = trace.get_column("violation").shape[1] if len(trace) else 0
    n_lambda_s = trace.get_column("lambda_s").shape[1] if len(trace) else 0
    return (
        ["iter", "objective", "sumrate", "ergodic_sumrate"]
        + [f"violation_{i}" for i in range(n_violation)]
        + [f"ergodic_violation_{i}" for i in range(n_violation)]
        + [f"lambda_s_{j}" for j in range(n_lambda_s)]
        + [f"lambda_r_{i}" for i in range(n_violation)]
        + ["probes"]
    )


def write_trace_csv(trace: RunTrace, path: PathLike) -> Path:
    """Write one row per iteration with the columns of ``trace_header``.

    A ``# seed = N`` line precedes the header when the trace records its seed.
    """
    header = trace_header(trace)
    comments = [] if trace.get_seed() is None else [f"seed = {trace.get_seed()}"]
    if not len(trace):
        return write_rows(path, header, [], comments)
    iters = trace.get_column("iter").astype(np.int64)
    objective = trace.get_column("objective")
    sumrate = trace.get_column("sumrate")
    ergodic_sumrate = trace.get_ergodic("sumrate")
    violation = trace.get_column("violation")
    ergodic_violation = trace.get_ergodic("violation")
    lambda_s = trace.get_column("lambda_s")
    lambda_r = trace.get_column("lambda_r")
    probes = trace.get_column("probes").astype(np.int64)

    def rows() -> Iterable[list[Any]]:
        for k in range(len(trace)):
            yield (
                [iters[k], objective[k], sumrate[k], ergodic_sumrate[k]]
                + list(violation[k])
                + list(ergodic_violation[k])
                + list(lambda_s[k])
                + list(lambda_r[k])
                + [probes[k]]
            )

    return write_rows(path, header, rows(), comments)


def write_figure_csv(rows: Iterable[tuple[int, str, float]], path: PathLike) -> Path:
    """Write long-format figure data with columns iter, series, value."""
    return write_rows(path, ["iter", "series", "value"], rows)


def write_summary(
    path: PathLike,
    run: Mapping[str, Any],
    summary: Mapping[str, Any],
    config_text: str,
) -> Path:
    """Write ``[run]`` and ``[summary]`` followed by the config text verbatim."""
    parser = configparser.ConfigParser(interpolation=None)
    parser["run"] = {key: _cell(value) for key, value in run.items()}
    parser["summary"] = {key: _cell(value) for key, value in summary.items()}
    buffer = io.StringIO()
    parser.write(buffer)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(buffer.getvalue())
        handle.write(config_text)
    logger.info("Wrote %s", path)
    return path


def read_summary(path: PathLike) -> configparser.ConfigParser:
    """Parse a summary file, config sections included."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.read(Path(path), encoding="utf-8")
    return parser
