"""
Bath spectral densities and reservoir correlation kernels

Frequencies and rates share one inverse-time unit; temperatures are energies
with k_B = 1.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np

from .exceptions import ConfigurationError, SpectralDomainError, UnsupportedKernelError

logger = logging.getLogger(__name__)

# below this |x| the odd segment weight uses its power series
SEGMENT_SERIES_MAX = 1e-2

ArrayLike = Union[float, np.ndarray]


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be positive, got {value!r}")
    return value


class SpectralDensityModel:
    """
    Base class for bath spectral densities J(omega)

    Subclasses implement ``density`` for non-negative frequencies and declare
    a ``kind`` tag used by the configuration layer.
    """

    kind: str = ""
    temperature: float = 0.0

    def _check_temperature(self) -> None:
        t = float(self.temperature)
        if not math.isfinite(t) or t < 0:
            raise ConfigurationError(f"temperature must be >= 0, got {t!r}")

    def density(self, omega: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def frequency_scale(self) -> float:
        """Characteristic frequency used to place the small-omega cut"""
        raise NotImplementedError

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Lorentzian(SpectralDensityModel):
    """
    Lorentzian spectral density of the damped Jaynes-Cummings model

    J(omega) = gamma0 / (2 pi) * width^2 / ((omega - omega0 + detuning)^2 + width^2)

    Attributes:
        gamma0: Markovian-limit decay rate
        width: Spectral width lambda (inverse reservoir memory time)
        detuning: Atomic frequency minus the spectrum peak
        transition_frequency: Atomic frequency omega0, only used by ``density``
        temperature: Carried for completeness; the JC treatment assumes vacuum
    """

    gamma0: float
    width: float
    detuning: float = 0.0
    transition_frequency: float = 0.0
    temperature: float = 0.0
    kind: str = field(default="lorentzian", init=False)

    def __post_init__(self) -> None:
        _require_positive("gamma0", self.gamma0)
        _require_positive("width", self.width)
        if not math.isfinite(self.detuning):
            raise ConfigurationError(f"detuning must be finite, got {self.detuning!r}")
        self._check_temperature()

    def density(self, omega: np.ndarray) -> np.ndarray:
        u = self.transition_frequency - self.detuning - np.asarray(omega, dtype=float)
        return self.gamma0 / (2.0 * math.pi) * self.width**2 / (u**2 + self.width**2)

    @property
    def frequency_scale(self) -> float:
        return self.width

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "gamma0": self.gamma0,
            "width": self.width,
            "detuning": self.detuning,
            "transition_frequency": self.transition_frequency,
        }


@dataclass(frozen=True)
class OhmicFamily(SpectralDensityModel):
    """
    J(omega) = coupling * omega^s * cutoff^(1-s) * exp(-omega/cutoff)

    s < 1 is sub-Ohmic, s = 1 Ohmic and s > 1 super-Ohmic.
    """

    coupling: float
    cutoff: float
    exponent: float = 1.0
    temperature: float = 0.0
    kind: str = field(default="ohmic", init=False)

    def __post_init__(self) -> None:
        _require_positive("coupling", self.coupling)
        _require_positive("cutoff", self.cutoff)
        if not math.isfinite(self.exponent) or self.exponent < 0:
            raise ConfigurationError(f"exponent must be >= 0, got {self.exponent!r}")
        self._check_temperature()

    def density(self, omega: np.ndarray) -> np.ndarray:
        w = np.asarray(omega, dtype=float)
        return (
            self.coupling
            * np.power(w, self.exponent)
            * self.cutoff ** (1.0 - self.exponent)
            * np.exp(-w / self.cutoff)
        )

    @property
    def frequency_scale(self) -> float:
        return self.cutoff

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "coupling": self.coupling,
            "cutoff": self.cutoff,
            "exponent": self.exponent,
        }


@dataclass(frozen=True)
class Tabulated(SpectralDensityModel):
    """
    Spectral density sampled on a strictly increasing frequency grid

    Values are interpolated linearly and vanish outside the grid. For the JC
    kernel the table is read as J(omega) with the atomic frequency given by
    ``transition_frequency``.
    """

    frequencies: tuple
    values: tuple
    temperature: float = 0.0
    omega_max: Optional[float] = None
    transition_frequency: float = 0.0
    kind: str = field(default="tabulated", init=False)

    def __post_init__(self) -> None:
        freqs = np.asarray(self.frequencies, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if freqs.ndim != 1 or freqs.size < 2 or freqs.shape != vals.shape:
            raise ConfigurationError("tabulated density needs matching 1-D grids of length >= 2")
        if np.any(np.diff(freqs) <= 0):
            raise ConfigurationError("tabulated frequencies must be strictly increasing")
        if freqs[0] < 0:
            raise ConfigurationError("tabulated frequencies must be non-negative")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ConfigurationError("tabulated spectral density values must be finite and >= 0")
        if self.omega_max is not None:
            _require_positive("omega_max", self.omega_max)
        self._check_temperature()
        object.__setattr__(self, "frequencies", tuple(float(f) for f in freqs))
        object.__setattr__(self, "values", tuple(float(v) for v in vals))

    @classmethod
    def from_arrays(
        cls, frequencies: Sequence[float], values: Sequence[float], **kwargs: Any
    ) -> "Tabulated":
        return cls(tuple(frequencies), tuple(values), **kwargs)

    def density(self, omega: np.ndarray) -> np.ndarray:
        return np.interp(
            np.asarray(omega, dtype=float), self.frequencies, self.values, left=0.0, right=0.0
        )

    @property
    def support(self) -> tuple:
        return self.frequencies[0], self.frequencies[-1]

    @property
    def frequency_scale(self) -> float:
        return self.frequencies[-1]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "kind": self.kind,
            "frequencies": list(self.frequencies),
            "values": list(self.values),
            "transition_frequency": self.transition_frequency,
        }
        if self.omega_max is not None:
            data["omega_max"] = self.omega_max
        return data


@dataclass(frozen=True)
class CorrelationKernel:
    """
    Two-point reservoir correlation function f(tau)

    Attributes:
        rule: Vectorized map from tau samples to complex f(tau)
        closed_form: Whether ``rule`` is an exact expression
    """

    rule: Callable[[np.ndarray], np.ndarray]
    closed_form: bool = False

    def __call__(self, tau: ArrayLike) -> Union[complex, np.ndarray]:
        arr = np.asarray(tau, dtype=float)
        out = np.asarray(self.rule(np.atleast_1d(arr)), dtype=complex)
        if arr.ndim == 0:
            return complex(out[0])
        return out.reshape(arr.shape)

    @classmethod
    def zero(cls) -> "CorrelationKernel":
        return cls(lambda tau: np.zeros_like(tau, dtype=complex), closed_form=True)


def spectral_eval(model: SpectralDensityModel, omega: float) -> float:
    """
    Evaluate J(omega)

    Args:
        model: Spectral density model
        omega: Frequency (must be >= 0)

    Returns:
        J(omega) >= 0

    Raises:
        SpectralDomainError: If omega is negative
    """
    if omega < 0:
        raise SpectralDomainError(f"Spectral density evaluated at negative frequency {omega!r}")
    return float(model.density(np.asarray(omega)))


def _lorentzian_rule(model: Lorentzian) -> Callable[[np.ndarray], np.ndarray]:
    amplitude = 0.5 * model.gamma0 * model.width

    def rule(tau: np.ndarray) -> np.ndarray:
        return amplitude * np.exp(-model.width * np.abs(tau)) * np.exp(1j * model.detuning * tau)

    return rule


def _odd_segment_weight(x: np.ndarray) -> np.ndarray:
    """(sin x - x cos x) / x^2, the odd part of a linear segment's transform"""
    out = np.empty_like(x)
    small = np.abs(x) < SEGMENT_SERIES_MAX
    xs = x[small]
    out[small] = xs / 3.0 - xs**3 / 30.0 + xs**5 / 840.0
    xl = x[~small]
    out[~small] = (np.sin(xl) - xl * np.cos(xl)) / (xl * xl)
    return out


def piecewise_linear_transform(
    frequencies: Sequence[float], values: Sequence[float], tau: np.ndarray
) -> np.ndarray:
    """
    Exact int J(w) e^{-i w tau} dw for J linear between table points

    Each segment [c - d, c + d] with J = A + B (w - c) contributes
    e^{-i c tau} (2 d A sinc(d tau) - 2i B d^2 q(d tau)), q being
    ``_odd_segment_weight``. There is no quadrature error to control.
    """
    freqs = np.asarray(frequencies, dtype=float)
    vals = np.asarray(values, dtype=float)
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(tau.shape, dtype=complex)
    for w0, w1, j0, j1 in zip(freqs[:-1], freqs[1:], vals[:-1], vals[1:]):
        c, d = 0.5 * (w0 + w1), 0.5 * (w1 - w0)
        mean, slope = 0.5 * (j0 + j1), (j1 - j0) / (w1 - w0)
        x = d * tau
        even = 2.0 * d * mean * np.sinc(x / math.pi)
        odd = 2.0 * slope * d * d * _odd_segment_weight(x)
        out += np.exp(-1j * c * tau) * (even - 1j * odd)
    return out


def _tabulated_rule(model: Tabulated) -> Callable[[np.ndarray], np.ndarray]:
    omega0 = model.transition_frequency

    def rule(tau: np.ndarray) -> np.ndarray:
        # int J(w) e^{-i w t} dw, shifted by the atomic frequency
        transform = piecewise_linear_transform(model.frequencies, model.values, tau)
        return np.exp(1j * omega0 * tau) * transform

    return rule


def correlation_kernel(model: SpectralDensityModel) -> CorrelationKernel:
    """
    Build the correlation kernel f(tau) = int J(omega) e^{i(omega0 - omega) tau} d omega

    Raises:
        UnsupportedKernelError: For Ohmic-family baths
    """
    if isinstance(model, Lorentzian):
        return CorrelationKernel(_lorentzian_rule(model), closed_form=True)
    if isinstance(model, Tabulated):
        logger.debug("Tabulated kernel over %d segments", len(model.frequencies) - 1)
        return CorrelationKernel(_tabulated_rule(model), closed_form=True)
    raise UnsupportedKernelError(
        f"No Jaynes-Cummings correlation kernel for spectral density kind {model.kind!r}"
    )


def kernel_eval(model: SpectralDensityModel, tau: float) -> complex:
    return complex(correlation_kernel(model)(tau))
