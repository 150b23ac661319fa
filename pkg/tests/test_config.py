"""
Tests for run configuration parsing
"""

import json
import shutil
import tempfile
from pathlib import Path

import pytest
import yaml

from nmq.config import RunConfig, SweepAxis, spectral_from_dict
from nmq.exceptions import ConfigurationError
from nmq.spectral import Lorentzian, OhmicFamily


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture
def jc_data():
    return {
        "model": "jc",
        "spectral_density": {"kind": "lorentzian", "gamma0": 10.0, "width": 1.0},
        "grid": {"t_max": 2.0, "dt": 0.01},
        "pair": {"a": 0.0, "b": 1.0},
    }


@pytest.fixture
def dephasing_data():
    return {
        "model": "dephasing",
        "spectral_density": {"kind": "ohmic", "coupling": 1.0, "cutoff": 1.0, "exponent": 3.0},
        "temperature": 0.0,
        "grid": {"t_max": 4.0, "dt": 0.02},
        "pair_sweep": {"n_pairs": 10, "seed": 5},
        "axes": [{"parameter": "spectral_density.exponent", "values": [3.0, 1.0]}],
    }


class TestRunConfig:
    """Test validation of config mappings"""

    def test_jc_defaults(self, jc_data):
        config = RunConfig.from_dict(jc_data)
        assert config.model == "jc"
        assert config.units == "lambda"
        assert isinstance(config.spectral_density, Lorentzian)
        assert config.grid.count == 201
        assert config.g_floor == 1e-8
        assert config.epsilons == (1e-3, 1e-4, 1e-5)
        assert config.pair.b == 1.0
        assert config.pair_sweep is None
        assert config.jobs == 1
        assert config.axes == []

    def test_dephasing(self, dephasing_data):
        config = RunConfig.from_dict(dephasing_data)
        assert config.units == "omega_c"
        assert isinstance(config.spectral_density, OhmicFamily)
        assert config.pair is None
        assert config.pair_sweep == {"n_pairs": 10, "seed": 5}
        assert config.axes[0].values == (1.0, 3.0)

    def test_complex_coherence(self, jc_data):
        jc_data["pair"] = {"a": 0.2, "b": [0.3, -0.4]}
        config = RunConfig.from_dict(jc_data)
        assert config.pair.b == complex(0.3, -0.4)
        assert config.to_dict()["pair"] == {"a": 0.2, "b": [0.3, -0.4]}

    @pytest.mark.parametrize(
        "key,value",
        [
            ("model", "spin-boson"),
            ("temperature", -1.0),
            ("g_floor", 1.5),
            ("epsilons", [1e-5, 1e-3]),
            ("epsilons", [1e-3]),
            ("jobs", 0),
            ("grid", {"t_max": 1.0, "dt": 0.0}),
            ("grid", {"t_max": 1.0}),
            ("pair", {"a": 0.0, "b": 0.0}),
            ("pair", {"a": 2.0, "b": 0.0}),
            ("spectral_density", {"kind": "ohmic", "coupling": 1.0, "cutoff": 1.0}),
            ("spectral_density", {"kind": "unknown"}),
            ("axes", [{"parameter": "a", "values": [1]}] * 3),
        ],
    )
    def test_invalid(self, jc_data, key, value):
        jc_data[key] = value
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(jc_data)

    def test_pair_and_sweep_exclusive(self, jc_data):
        jc_data["pair_sweep"] = {"n_pairs": 5, "seed": 1}
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(jc_data)
        del jc_data["pair"]
        del jc_data["pair_sweep"]
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(jc_data)

    def test_too_few_pairs(self, dephasing_data):
        dephasing_data["pair_sweep"]["n_pairs"] = 1
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(dephasing_data)

    def test_ohmic_rejected_for_jc(self, jc_data, dephasing_data):
        jc_data["spectral_density"] = dephasing_data["spectral_density"]
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(jc_data)

    def test_spectral_temperature(self):
        model = spectral_from_dict(
            {"kind": "ohmic", "coupling": 0.5, "cutoff": 2.0}, temperature=0.3
        )
        assert model.temperature == 0.3
        assert model.exponent == 1.0

    def test_tabulated(self, jc_data):
        jc_data["spectral_density"] = {
            "kind": "tabulated",
            "frequencies": [0.0, 1.0, 2.0],
            "values": [0.0, 1.0, 0.0],
        }
        config = RunConfig.from_dict(jc_data)
        assert config.spectral_density.kind == "tabulated"


class TestConfigFiles:
    """Test loading from JSON and YAML"""

    def test_json(self, temp_dir, jc_data):
        path = Path(temp_dir) / "run.json"
        path.write_text(json.dumps(jc_data))
        assert RunConfig.from_file(path).model == "jc"

    def test_yaml(self, temp_dir, dephasing_data):
        path = Path(temp_dir) / "run.yaml"
        path.write_text(yaml.safe_dump(dephasing_data))
        assert RunConfig.from_file(path).model == "dephasing"

    def test_missing_file(self, temp_dir):
        with pytest.raises(ConfigurationError):
            RunConfig.from_file(Path(temp_dir) / "missing.json")

    def test_malformed(self, temp_dir):
        path = Path(temp_dir) / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError):
            RunConfig.from_file(path)


class TestOverrides:
    """Test command-line overrides and sweep expansion"""

    def test_grid_override(self, jc_data):
        config = RunConfig.from_dict(jc_data).with_overrides(t_max=1.0, dt=0.05)
        assert config.grid.t_max == 1.0
        assert config.grid.count == 21

    def test_model_override_revalidates(self, jc_data):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(jc_data).with_overrides(model="dephasing")

    def test_seed_override(self, dephasing_data):
        config = RunConfig.from_dict(dephasing_data).with_overrides(seed=99)
        assert config.pair_sweep["seed"] == 99

    def test_seed_needs_sweep(self, jc_data):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(jc_data).with_overrides(seed=1)

    def test_run_settings(self, jc_data):
        config = RunConfig.from_dict(jc_data).with_overrides(jobs=4, output_dir="elsewhere")
        assert config.jobs == 4
        assert config.output_dir == Path("elsewhere")

    def test_sweep_points_order(self, dephasing_data):
        dephasing_data["axes"].append({"parameter": "temperature", "values": [0.2, 0.0]})
        config = RunConfig.from_dict(dephasing_data)
        points = list(config.sweep_points())
        assert [values for values, _ in points] == [
            (1.0, 0.0),
            (1.0, 0.2),
            (3.0, 0.0),
            (3.0, 0.2),
        ]
        _, last = points[-1]
        assert last.spectral_density.exponent == 3.0
        assert last.temperature == 0.2
        assert last.axes == []

    def test_sweep_needs_axes(self, jc_data):
        with pytest.raises(ConfigurationError):
            list(RunConfig.from_dict(jc_data).sweep_points())

    def test_bad_axis_parameter(self, jc_data):
        jc_data["axes"] = [{"parameter": "grid.nothing.deeper", "values": [1.0]}]
        config = RunConfig.from_dict(jc_data)
        with pytest.raises(ConfigurationError):
            list(config.sweep_points())

    def test_axis_round_trip(self):
        axis = SweepAxis.from_dict({"parameter": "temperature", "values": [1, 0.5]})
        assert axis.to_dict() == {"parameter": "temperature", "values": [0.5, 1.0]}
