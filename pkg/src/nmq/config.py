"""
Run configuration for the nmq command line
"""

import copy
import itertools
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import yaml

from .exceptions import ConfigurationError, NMQError
from .grid import TimeGrid
from .jc import DEFAULT_G_FLOOR
from .measures import DEFAULT_EPSILONS
from .quantum import PairParams, as_pair
from .spectral import Lorentzian, OhmicFamily, SpectralDensityModel, Tabulated

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "nmq-output"
MODELS = ("jc", "dephasing")
UNITS = {"jc": "lambda", "dephasing": "omega_c"}
ALLOWED_KINDS = {"jc": ("lorentzian", "tabulated"), "dephasing": ("ohmic", "tabulated")}
MAX_AXES = 2


def _number(data: Dict[str, Any], key: str, where: str, default: Any = None) -> float:
    if key not in data:
        if default is None:
            raise ConfigurationError(f"{where}.{key} is required")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{where}.{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigurationError(f"{where}.{key} must be finite, got {value!r}")
    return float(value)


def _integer(data: Dict[str, Any], key: str, where: str) -> int:
    if key not in data:
        raise ConfigurationError(f"{where}.{key} is required")
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{where}.{key} must be an integer, got {value!r}")
    return value


def spectral_from_dict(data: Any, temperature: float = 0.0) -> SpectralDensityModel:
    """
    Build a spectral density model from its config section

    Args:
        data: Mapping with a ``kind`` tag and the model parameters
        temperature: Bath temperature (k_B = 1)

    Returns:
        SpectralDensityModel

    Raises:
        ConfigurationError: If the section is malformed
    """
    if not isinstance(data, dict):
        raise ConfigurationError("spectral_density must be a mapping")
    kind = data.get("kind")
    where = "spectral_density"
    if kind == "lorentzian":
        return Lorentzian(
            gamma0=_number(data, "gamma0", where),
            width=_number(data, "width", where),
            detuning=_number(data, "detuning", where, 0.0),
            transition_frequency=_number(data, "transition_frequency", where, 0.0),
            temperature=temperature,
        )
    if kind == "ohmic":
        return OhmicFamily(
            coupling=_number(data, "coupling", where),
            cutoff=_number(data, "cutoff", where),
            exponent=_number(data, "exponent", where, 1.0),
            temperature=temperature,
        )
    if kind == "tabulated":
        freqs = data.get("frequencies")
        values = data.get("values")
        if not isinstance(freqs, list) or not isinstance(values, list):
            raise ConfigurationError("tabulated spectral_density needs frequencies and values lists")
        omega_max = data.get("omega_max")
        return Tabulated.from_arrays(
            freqs,
            values,
            temperature=temperature,
            omega_max=None if omega_max is None else _number(data, "omega_max", where),
            transition_frequency=_number(data, "transition_frequency", where, 0.0),
        )
    raise ConfigurationError(f"Unknown spectral_density.kind {kind!r}")


def _parse_pair(data: Any) -> PairParams:
    if not isinstance(data, dict) or "a" not in data or "b" not in data:
        raise ConfigurationError("pair must be a mapping with keys a and b")
    b = data["b"]
    if isinstance(b, list):
        if len(b) != 2:
            raise ConfigurationError("pair.b as a list must be [re, im]")
        b = complex(float(b[0]), float(b[1]))
    try:
        return as_pair((data["a"], b))
    except (TypeError, ValueError, NMQError) as e:
        raise ConfigurationError(f"Invalid pair: {e}") from e


def _set_dotted(data: Dict[str, Any], key: str, value: Any) -> None:
    parts = key.split(".")
    node = data
    for part in parts[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            raise ConfigurationError(f"Sweep parameter {key!r} does not name a config section")
        node = child
    node[parts[-1]] = value


class SweepAxis:
    """One swept configuration parameter with its sorted values"""

    def __init__(self, parameter: str, values: Sequence[float]) -> None:
        self.parameter = parameter
        self.values = tuple(sorted(float(v) for v in values))

    @classmethod
    def from_dict(cls, data: Any) -> "SweepAxis":
        if not isinstance(data, dict) or not isinstance(data.get("parameter"), str):
            raise ConfigurationError("each axis needs a 'parameter' dotted key")
        values = data.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigurationError(f"axis {data['parameter']!r} needs a non-empty values list")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigurationError(f"axis {data['parameter']!r} has a non-finite value {v!r}")
        return cls(data["parameter"], values)

    def to_dict(self) -> Dict[str, Any]:
        return {"parameter": self.parameter, "values": list(self.values)}


class RunConfig:
    """
    Validated run configuration

    Attributes:
        model: "jc" or "dephasing"
        spectral_density: Spectral density model (carries the temperature)
        grid: Time grid
        g_floor: Zero threshold for |G|
        pair: Initial-state pair parameters, or None when sweeping pairs
        pair_sweep: {"n_pairs", "seed"} or None
        epsilons: Epsilon schedule of the Choi construction
        output_dir: Directory receiving the output files
        axes: Parameter sweep axes (may be empty)
        jobs: Worker threads
    """

    def __init__(self, data: Dict[str, Any]) -> None:
        if not isinstance(data, dict):
            raise ConfigurationError("Config must be a mapping")
        self._data = copy.deepcopy(data)

        model = data.get("model")
        if model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}, got {model!r}")
        self.model: str = model

        temperature = _number(data, "temperature", "config", 0.0)
        if temperature < 0:
            raise ConfigurationError(f"temperature must be >= 0, got {temperature!r}")
        self.spectral_density = spectral_from_dict(data.get("spectral_density"), temperature)
        if self.spectral_density.kind not in ALLOWED_KINDS[model]:
            raise ConfigurationError(
                f"model {model!r} does not accept spectral_density.kind "
                f"{self.spectral_density.kind!r}"
            )
        if model == "jc" and temperature > 0:
            logger.warning("The JC model assumes a vacuum reservoir; temperature is ignored")

        grid = data.get("grid")
        if not isinstance(grid, dict):
            raise ConfigurationError("grid must be a mapping with t_max and dt")
        self.grid = TimeGrid(t_max=_number(grid, "t_max", "grid"), dt=_number(grid, "dt", "grid"))

        self.g_floor = _number(data, "g_floor", "config", DEFAULT_G_FLOOR)
        if not 0 < self.g_floor < 1:
            raise ConfigurationError(f"g_floor must lie in (0, 1), got {self.g_floor!r}")

        has_pair, has_sweep = "pair" in data, "pair_sweep" in data
        if has_pair == has_sweep:
            raise ConfigurationError("exactly one of 'pair' and 'pair_sweep' must be given")
        self.pair: Optional[PairParams] = _parse_pair(data["pair"]) if has_pair else None
        self.pair_sweep: Optional[Dict[str, int]] = None
        if has_sweep:
            sweep = data["pair_sweep"]
            if not isinstance(sweep, dict):
                raise ConfigurationError("pair_sweep must be a mapping with n_pairs and seed")
            n_pairs = _integer(sweep, "n_pairs", "pair_sweep")
            if n_pairs < 2:
                raise ConfigurationError("pair_sweep.n_pairs must be at least 2")
            self.pair_sweep = {"n_pairs": n_pairs, "seed": _integer(sweep, "seed", "pair_sweep")}
        elif self.pair.is_zero:
            raise ConfigurationError("pair must not be a = b = 0 (identical initial states)")

        epsilons = data.get("epsilons", list(DEFAULT_EPSILONS))
        if (
            not isinstance(epsilons, list)
            or len(epsilons) < 2
            or any(isinstance(e, bool) or not isinstance(e, (int, float)) for e in epsilons)
            or any(e <= 0 for e in epsilons)
            or any(b >= a for a, b in zip(epsilons, epsilons[1:]))
        ):
            raise ConfigurationError("epsilons must be a decreasing list of at least two positive numbers")
        self.epsilons: Tuple[float, ...] = tuple(float(e) for e in epsilons)

        output_dir = data.get("output_dir", DEFAULT_OUTPUT_DIR)
        if not isinstance(output_dir, str) or not output_dir:
            raise ConfigurationError("output_dir must be a non-empty string")
        self.output_dir = Path(output_dir)

        axes = data.get("axes", [])
        if not isinstance(axes, list) or len(axes) > MAX_AXES:
            raise ConfigurationError(f"axes must be a list of at most {MAX_AXES} entries")
        self.axes: List[SweepAxis] = [SweepAxis.from_dict(a) for a in axes]
        if len({a.parameter for a in self.axes}) != len(self.axes):
            raise ConfigurationError("axes must name distinct parameters")

        jobs = data.get("jobs", 1)
        if isinstance(jobs, bool) or not isinstance(jobs, int) or jobs < 1:
            raise ConfigurationError(f"jobs must be a positive integer, got {jobs!r}")
        self.jobs: int = jobs

    @property
    def units(self) -> str:
        return UNITS[self.model]

    @property
    def temperature(self) -> float:
        return self.spectral_density.temperature

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        return cls(data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        """
        Load a config from a JSON or YAML file

        Args:
            path: Config file; ``.yaml``/``.yml`` files are read as YAML

        Returns:
            RunConfig instance

        Raises:
            ConfigurationError: If the file cannot be read or is invalid
        """
        path = Path(path)
        try:
            with open(path, "r") as f:
                if path.suffix.lower() in (".yaml", ".yml"):
                    data = yaml.safe_load(f)
                else:
                    data = json.load(f)
        except OSError as e:
            raise ConfigurationError(f"Cannot read config {path}: {e}") from e
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Cannot parse config {path}: {e}") from e
        logger.debug("Loaded config from %s", path)
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """Normalized config, echoed into report.json"""
        data: Dict[str, Any] = {
            "model": self.model,
            "spectral_density": self.spectral_density.to_dict(),
            "temperature": self.temperature,
            "grid": {"t_max": self.grid.t_max, "dt": self.grid.dt},
            "g_floor": self.g_floor,
            "epsilons": list(self.epsilons),
            "output_dir": str(self.output_dir),
            "jobs": self.jobs,
        }
        if self.pair is not None:
            data["pair"] = {"a": self.pair.a, "b": [self.pair.b.real, self.pair.b.imag]}
        if self.pair_sweep is not None:
            data["pair_sweep"] = dict(self.pair_sweep)
        if self.axes:
            data["axes"] = [a.to_dict() for a in self.axes]
        return data

    def with_overrides(
        self,
        model: Optional[str] = None,
        t_max: Optional[float] = None,
        dt: Optional[float] = None,
        seed: Optional[int] = None,
        jobs: Optional[int] = None,
        output_dir: Optional[str] = None,
    ) -> "RunConfig":
        """Return a new config with command-line overrides applied"""
        data = copy.deepcopy(self._data)
        if model is not None:
            data["model"] = model
        if t_max is not None or dt is not None:
            grid = dict(data.get("grid") or {})
            if t_max is not None:
                grid["t_max"] = t_max
            if dt is not None:
                grid["dt"] = dt
            data["grid"] = grid
        if seed is not None:
            if "pair_sweep" not in data:
                raise ConfigurationError("--seed needs a pair_sweep section in the config")
            data["pair_sweep"] = dict(data["pair_sweep"], seed=seed)
        if jobs is not None:
            data["jobs"] = jobs
        if output_dir is not None:
            data["output_dir"] = output_dir
        return RunConfig(data)

    def with_value(self, parameter: str, value: float) -> "RunConfig":
        """Return a new config with one dotted key replaced, without sweep axes"""
        data = copy.deepcopy(self._data)
        data.pop("axes", None)
        _set_dotted(data, parameter, value)
        return RunConfig(data)

    def sweep_points(self) -> Iterator[Tuple[Tuple[float, ...], "RunConfig"]]:
        """
        Crossed axis values with their configs, first axis outermost

        Raises:
            ConfigurationError: If the config has no axes
        """
        if not self.axes:
            raise ConfigurationError("sweep needs at least one entry in 'axes'")
        for values in itertools.product(*(axis.values for axis in self.axes)):
            config = self
            for axis, value in zip(self.axes, values):
                config = config.with_value(axis.parameter, value)
            yield values, config
