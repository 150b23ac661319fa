"""
Run orchestration and output files

Everything is computed before the first file is written, so a failing run
leaves the output directory untouched.
"""

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import RunConfig
from .dephasing import DephasingTrace, dephasing_trace
from .exceptions import ConfigurationError
from .jc import GTrace, solve_g
from .measures import MeasureReport, curves, measure_report, pair_sweep
from .spectral import correlation_kernel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
DIVERGENT_TOKEN = "div"
TRACE_FILE = "trace.csv"
CURVES_FILE = "curves.csv"
REPORT_FILE = "report.json"
SWEEP_FILE = "sweep.csv"
# settings that do not change any computed number
RUN_ONLY_KEYS = ("jobs", "output_dir")

Trace = Union[GTrace, DephasingTrace]


def format_number(value: float) -> str:
    """Serialize a number with 12 significant digits"""
    return format(float(value), ".12g")


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return None
        return float(format_number(value))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def build_trace(config: RunConfig, jobs: Optional[int] = None) -> Trace:
    """Compute the G trace (JC) or the dephasing trace for a config"""
    if config.model == "jc":
        kernel = correlation_kernel(config.spectral_density)
        return solve_g(kernel, config.grid, g_floor=config.g_floor)
    return dephasing_trace(config.spectral_density, config.grid, jobs=jobs or config.jobs)


@dataclass
class RunResult:
    config: RunConfig
    trace: Trace
    report: MeasureReport
    curves: Dict[str, np.ndarray]

    def report_dict(self) -> Dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "units": self.config.units,
            "config": {
                k: v for k, v in self.config.to_dict().items() if k not in RUN_ONLY_KEYS
            },
            "reference_states": {
                "entanglement": "(|10>+|01>)/sqrt(2)",
                "choi": "(|11>+|00>)/sqrt(2)",
            },
            **self.report.to_dict(),
        }


def compute(config: RunConfig, jobs: Optional[int] = None) -> RunResult:
    """
    Build the trace and every measure for one config

    Args:
        config: Validated run config
        jobs: Worker threads, defaulting to ``config.jobs``

    Returns:
        RunResult

    Raises:
        NumericalError: On propagation failures or undeterminable intervals
    """
    jobs = jobs or config.jobs
    trace = build_trace(config, jobs=jobs)
    sweep = None
    if config.pair_sweep is not None:
        sweep = pair_sweep(
            trace, config.pair_sweep["n_pairs"], config.pair_sweep["seed"], jobs=jobs
        )
    report = measure_report(
        trace,
        pair=config.pair,
        model={"model": config.model, **config.spectral_density.to_dict()},
        epsilons=config.epsilons,
        sweep=sweep,
    )
    return RunResult(config, trace, report, curves(trace, report.pair, config.epsilons))


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trace_csv(trace: Trace) -> str:
    """trace.csv content; flagged JC rate cells hold ``div``"""
    t = trace.times
    if isinstance(trace, GTrace):
        rows = []
        for k in range(t.size):
            cell = (lambda x: DIVERGENT_TOKEN) if trace.divergent[k] else format_number
            rows.append(
                [
                    format_number(t[k]),
                    format_number(trace.g[k].real),
                    format_number(trace.g[k].imag),
                    cell(trace.gamma[k]),
                    cell(trace.big_gamma[k]),
                    cell(trace.shift[k]),
                ]
            )
        return _csv_text(["t", "re_g", "im_g", "gamma", "big_gamma", "s"], rows)
    rows = [
        [format_number(t[k]), format_number(trace.gamma_p[k]), format_number(trace.big_gamma_p[k])]
        for k in range(t.size)
    ]
    return _csv_text(["t", "gamma_p", "big_gamma_p"], rows)


def curves_csv(times: np.ndarray, data: Dict[str, np.ndarray]) -> str:
    g = data["g_choi"]
    rows = [
        [
            format_number(times[k]),
            format_number(data["trace_distance"][k]),
            format_number(data["concurrence"][k]),
            DIVERGENT_TOKEN if np.isnan(g[k]) else format_number(g[k]),
        ]
        for k in range(times.size)
    ]
    return _csv_text(["t", "trace_distance", "concurrence", "g_choi"], rows)


def report_json(data: Dict[str, Any]) -> str:
    return json.dumps(_round_floats(data), indent=2) + "\n"


def _write_files(output_dir: Path, files: Dict[str, str]) -> List[Path]:
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in files.items():
            path = output_dir / name
            with open(path, "w", newline="") as f:
                f.write(text)
            written.append(path)
    except OSError as e:
        raise ConfigurationError(f"Cannot write to output directory {output_dir}: {e}") from e
    logger.info("Wrote %s to %s", ", ".join(files), output_dir)
    return written


def run(config: RunConfig) -> Tuple[RunResult, List[Path]]:
    """
    Compute one config and write trace.csv, curves.csv and report.json

    Returns:
        (result, written paths)
    """
    result = compute(config)
    files = {
        TRACE_FILE: trace_csv(result.trace),
        CURVES_FILE: curves_csv(result.trace.times, result.curves),
        REPORT_FILE: report_json(result.report_dict()),
    }
    return result, _write_files(config.output_dir, files)


@dataclass
class SweepRow:
    values: Tuple[float, ...]
    report: MeasureReport

    def cells(self) -> List[str]:
        r = self.report
        return [format_number(v) for v in self.values] + [
            format_number(r.blp.value),
            format_number(r.entanglement.value),
            format_number(r.divisibility.value),
            "true" if r.divisibility.divergent else "false",
            "true" if r.verdict.equivalent else "false",
        ]


def sweep(config: RunConfig) -> Tuple[List[SweepRow], List[Path]]:
    """
    Evaluate every point of the config's axes and write sweep.csv

    Points run concurrently on ``config.jobs`` threads; rows are written in
    axis order after all points finish.

    Raises:
        ConfigurationError: If the config has no axes or a point is invalid
    """
    points = list(config.sweep_points())
    logger.info("Sweeping %d points", len(points))

    def evaluate(point: Tuple[Tuple[float, ...], RunConfig]) -> SweepRow:
        values, point_config = point
        inner_jobs = 1 if config.jobs > 1 else point_config.jobs
        return SweepRow(values, compute(point_config, jobs=inner_jobs).report)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(evaluate, points))
    else:
        rows = [evaluate(p) for p in points]

    header = [axis.parameter for axis in config.axes] + ["N", "I_E", "I", "I_divergent", "verdict"]
    text = _csv_text(header, [row.cells() for row in rows])
    return rows, _write_files(config.output_dir, {SWEEP_FILE: text})
