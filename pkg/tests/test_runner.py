"""
Tests for run orchestration and output formatting
"""

import json
import math

import numpy as np
import pytest

from nmq.config import RunConfig
from nmq.grid import TimeGrid
from nmq.jc import derive_rates
from nmq.runner import (
    FORMAT_VERSION,
    compute,
    curves_csv,
    format_number,
    report_json,
    trace_csv,
)


@pytest.fixture(scope="module")
def dephasing_result():
    config = RunConfig.from_dict(
        {
            "model": "dephasing",
            "spectral_density": {"kind": "ohmic", "coupling": 1.0, "cutoff": 1.0, "exponent": 3.0},
            "grid": {"t_max": 4.0, "dt": 0.05},
            "pair_sweep": {"n_pairs": 6, "seed": 42},
            "jobs": 2,
        }
    )
    return compute(config)


class TestFormatting:
    """Test number and file formatting"""

    def test_format_number(self):
        assert format_number(0.1) == "0.1"
        assert format_number(1.0 / 3.0) == "0.333333333333"
        assert format_number(2) == "2"

    def test_non_finite_becomes_null(self):
        text = report_json({"x": math.inf, "y": [1.0, math.nan], "ok": True})
        assert json.loads(text) == {"x": None, "y": [1.0, None], "ok": True}
        assert text.endswith("}\n")

    def test_flagged_rates_marked(self):
        grid = TimeGrid(t_max=1.0, dt=0.25)
        samples = np.array([1.0, 0.5, 0.0, -0.5, -1.0], dtype=complex)
        trace = derive_rates(samples, grid)
        rows = trace_csv(trace).splitlines()
        assert rows[0] == "t,re_g,im_g,gamma,big_gamma,s"
        assert rows[3].endswith("div,div,div")
        assert "div" not in rows[1]

    def test_curves_nan_marked(self):
        times = np.array([0.0, 0.5])
        data = {
            "trace_distance": np.array([1.0, 0.9]),
            "concurrence": np.array([1.0, 0.9]),
            "g_choi": np.array([0.0, np.nan]),
        }
        rows = curves_csv(times, data).splitlines()
        assert rows[1] == "0,1,1,0"
        assert rows[2] == "0.5,0.9,0.9,div"


class TestCompute:
    """Test a full computation with a pair sweep"""

    def test_report_contents(self, dephasing_result):
        data = dephasing_result.report_dict()
        assert data["format_version"] == FORMAT_VERSION
        assert data["units"] == "omega_c"
        assert "jobs" not in data["config"]
        assert "output_dir" not in data["config"]
        assert data["config"]["pair_sweep"] == {"n_pairs": 6, "seed": 42}
        assert data["model"]["model"] == "dephasing"
        assert data["pair_sweep"]["n_pairs"] == 6

    def test_report_pair_is_sweep_best(self, dephasing_result):
        report = dephasing_result.report
        assert report.pair == report.sweep.argmax_pair

    def test_curves_length(self, dephasing_result):
        count = dephasing_result.trace.grid.count
        for values in dephasing_result.curves.values():
            assert len(values) == count
