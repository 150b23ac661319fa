"""
Pure-dephasing dynamics of a two-level system

Gamma_p(t) = -int_0^inf J(w) coth(w/2T) (1 - cos wt) / w^2 dw
gamma_p(t) = 1/2 int_0^inf J(w) coth(w/2T) sin(wt) / w dw  (= -1/2 dGamma_p/dt)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline

from .exceptions import ConfigurationError, QuadratureError
from .grid import TimeGrid, Trajectory, freeze
from .quantum import DensityMatrix2, XState4
from .spectral import OhmicFamily, SpectralDensityModel, Tabulated

logger = logging.getLogger(__name__)

PANEL_EPSREL = 1e-9
PANEL_EPSABS = 1e-14
PANEL_LIMIT = 1000
# error estimate, relative to max(1, |panel|), above which a non-converged panel is fatal
QUAD_FAIL_TOL = 1e-8
SMALL_OMEGA_FRACTION = 1e-6
TAIL_TOL = 1e-12
# coth(x) ~ 1/x + x/3 is used below the small-omega cut only when x stays under this
COTH_SERIES_MAX = 1e-2
PROPAGATION_TOL = 1e-9

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True, eq=False)
class DephasingTrace:
    """
    Sampled dephasing exponent and rate

    Attributes:
        grid: Time grid
        big_gamma_p: Gamma_p(t_k) <= 0
        gamma_p: gamma_p(t_k)
    """

    grid: TimeGrid
    big_gamma_p: np.ndarray
    gamma_p: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @cached_property
    def _spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.times, self.big_gamma_p, -2.0 * self.gamma_p)

    def big_gamma_at(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """Gamma_p between samples from the cubic Hermite interpolant"""
        return self._spline(t)

    def coherence_at(self, t: Union[float, np.ndarray]) -> np.ndarray:
        return np.exp(self._spline(t))


def _thermal_weight(model: SpectralDensityModel) -> Callable[[float], float]:
    """Scalar J(w) coth(w/2T), with coth replaced by 1 at T = 0"""
    temperature = model.temperature

    if isinstance(model, OhmicFamily):
        amp = model.coupling * model.cutoff ** (1.0 - model.exponent)
        s, wc = model.exponent, model.cutoff

        def density(w: float) -> float:
            return amp * w**s * math.exp(-w / wc)

    else:

        def density(w: float) -> float:
            return float(model.density(w))

    if temperature == 0:
        return density

    def weight(w: float) -> float:
        return density(w) / math.tanh(w / (2.0 * temperature))

    return weight


def _power_terms(
    model: SpectralDensityModel, omega_min: float
) -> Optional[List[Tuple[float, float]]]:
    """
    Low-frequency expansion of J(w) coth(w/2T) as a sum of A * w^p terms

    Returns None when the coth series is not accurate on [0, omega_min].

    Raises:
        ConfigurationError: If the dephasing integral diverges at w -> 0
    """
    temperature = model.temperature
    if isinstance(model, OhmicFamily):
        amp = model.coupling * model.cutoff ** (1.0 - model.exponent)
        base = [(amp, model.exponent)]
    elif isinstance(model, Tabulated):
        f0, f1 = model.frequencies[0], model.frequencies[1]
        if f0 > 0:
            return []
        v0, v1 = model.values[0], model.values[1]
        base = [(v0, 0.0), ((v1 - v0) / (f1 - f0), 1.0)]
    else:
        raise ConfigurationError(f"Dephasing needs an ohmic or tabulated density, got {model.kind!r}")

    if temperature == 0:
        return base
    if any(amp != 0 and p <= 0 for amp, p in base):
        raise ConfigurationError(
            "Dephasing exponent diverges at finite temperature: J(w) must vanish as w -> 0"
        )
    if omega_min / (2.0 * temperature) > COTH_SERIES_MAX:
        return None
    terms: List[Tuple[float, float]] = []
    for amp, p in base:
        if amp == 0:
            continue
        terms.append((2.0 * temperature * amp, p - 1.0))
        terms.append((amp / (6.0 * temperature), p + 1.0))
    return terms


def _upper_frequency(model: SpectralDensityModel) -> float:
    """
    Truncation frequency for the exponential tail

    Raises:
        ConfigurationError: For a tabulated density that does not decay to zero
    """
    if isinstance(model, Tabulated):
        if model.omega_max is not None:
            return float(model.omega_max)
        if model.values[-1] > 0:
            raise ConfigurationError(
                "Tabulated spectral density does not decay to zero; set omega_max explicitly"
            )
        return float(model.frequencies[-1])

    assert isinstance(model, OhmicFamily)
    s = model.exponent
    amp = model.coupling
    x = max(10.0, s + 2.0)
    while True:
        thermal = 1.0
        if model.temperature > 0:
            thermal = 1.0 / math.tanh(x * model.cutoff / (2.0 * model.temperature))
        # int_x^inf u^a e^{-u} du <= x^a e^{-x} / (1 - a/x) for x > a
        bound = 0.0
        for a, scale in ((s - 2.0, 2.0), (s - 1.0, 0.5 * model.cutoff)):
            tail = x**a * math.exp(-x)
            if a > 0:
                tail /= 1.0 - a / x
            bound = max(bound, scale * amp * thermal * tail)
        if bound < TAIL_TOL:
            return x * model.cutoff
        x += 1.0


def _series_exponent(terms: List[Tuple[float, float]], wm: float, t: float) -> float:
    # int_0^wm A w^p (1 - cos wt)/w^2 dw with (1 - cos wt)/w^2 = t^2/2 - w^2 t^4/24
    total = 0.0
    for amp, p in terms:
        total += amp * (
            t * t * wm ** (p + 1.0) / (2.0 * (p + 1.0))
            - t**4 * wm ** (p + 3.0) / (24.0 * (p + 3.0))
        )
    return total


def _series_rate(terms: List[Tuple[float, float]], wm: float, t: float) -> float:
    # int_0^wm A w^p sin(wt)/w dw with sin(wt)/w = t - w^2 t^3/6
    total = 0.0
    for amp, p in terms:
        total += amp * (
            t * wm ** (p + 1.0) / (p + 1.0) - t**3 * wm ** (p + 3.0) / (6.0 * (p + 3.0))
        )
    return total


class _DephasingIntegrator:
    """Evaluates Gamma_p and gamma_p at single times by adaptive quadrature"""

    def __init__(self, model: SpectralDensityModel, epsrel: float = PANEL_EPSREL) -> None:
        if not isinstance(model, (OhmicFamily, Tabulated)):
            raise ConfigurationError(
                f"Dephasing needs an ohmic or tabulated density, got {model.kind!r}"
            )
        self.model = model
        self.epsrel = epsrel
        self.weight = _thermal_weight(model)
        self.omega_min = SMALL_OMEGA_FRACTION * model.frequency_scale
        self.omega_max = _upper_frequency(model)
        self.terms = _power_terms(model, self.omega_min)
        logger.debug(
            "Dephasing quadrature on [%.3e, %.3e], series=%s",
            self.omega_min,
            self.omega_max,
            self.terms is not None,
        )

    def _quad(self, func: Callable[[float], float], lo: float, hi: float) -> float:
        """Adaptive quadrature on one panel, failing loudly when it does not converge"""
        if hi <= lo:
            return 0.0
        result = quad(
            func, lo, hi, epsabs=PANEL_EPSABS, epsrel=self.epsrel, limit=PANEL_LIMIT, full_output=1
        )
        value, abserr = result[0], result[1]
        # a fourth entry carries the failure message
        if len(result) > 3 and abserr > QUAD_FAIL_TOL * max(1.0, abs(value)):
            raise QuadratureError(
                f"Dephasing quadrature on [{lo:.6g}, {hi:.6g}] did not converge "
                f"(error estimate {abserr:.3e}): {result[3]}"
            )
        return value

    def _panel_edges(self, t: float) -> np.ndarray:
        """One oscillation period per panel, split further at the table's corners"""
        lo, hi = self.omega_min, self.omega_max
        edges = np.append(np.arange(lo, hi, 2.0 * math.pi / t), hi)
        if isinstance(self.model, Tabulated):
            freqs = np.asarray(self.model.frequencies)
            edges = np.union1d(edges, freqs[(freqs > lo) & (freqs < hi)])
        return edges

    def _panel_sum(self, integrand: Callable[[float], float], t: float) -> float:
        edges = self._panel_edges(t)
        return math.fsum(self._quad(integrand, a, b) for a, b in zip(edges[:-1], edges[1:]))

    def _exponent_integrand(self, t: float) -> Callable[[float], float]:
        def integrand(w: float) -> float:
            half = math.sin(0.5 * w * t)
            return self.weight(w) * 2.0 * half * half / (w * w)

        return integrand

    def _rate_integrand(self, t: float) -> Callable[[float], float]:
        return lambda w: self.weight(w) * math.sin(w * t) / w

    def _low_part(self, t: float, rate: bool) -> float:
        wm = self.omega_min
        if self.terms is not None and wm * t < 0.1:
            return _series_rate(self.terms, wm, t) if rate else _series_exponent(self.terms, wm, t)
        integrand = self._rate_integrand(t) if rate else self._exponent_integrand(t)
        return self._quad(integrand, 0.0, wm)

    def exponent(self, t: float) -> float:
        if t == 0:
            return 0.0
        total = self._low_part(t, rate=False)
        total += self._panel_sum(self._exponent_integrand(t), t)
        return -total

    def rate(self, t: float) -> float:
        if t == 0:
            return 0.0
        total = self._low_part(t, rate=True)
        total += self._panel_sum(self._rate_integrand(t), t)
        return 0.5 * total

    def __call__(self, t: float) -> Tuple[float, float]:
        return self.exponent(t), self.rate(t)


def dephasing_trace(
    model: SpectralDensityModel,
    grid: TimeGrid,
    jobs: int = 1,
    epsrel: float = PANEL_EPSREL,
) -> DephasingTrace:
    """
    Compute Gamma_p and gamma_p on a grid

    Each time point is an independent pair of quadratures; ``jobs`` > 1
    spreads them over a thread pool without changing the result.

    Args:
        model: Ohmic-family or tabulated spectral density with temperature
        grid: Time grid
        jobs: Number of worker threads
        epsrel: Relative panel tolerance of the adaptive quadrature

    Returns:
        DephasingTrace

    Raises:
        ConfigurationError: For unsupported or non-decaying densities
        QuadratureError: If a frequency panel fails to converge
    """
    integrator = _DephasingIntegrator(model, epsrel=epsrel)
    times = [float(t) for t in grid.times]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(integrator, times))
    else:
        results = [integrator(t) for t in times]
    big_gamma = np.array([r[0] for r in results])
    gamma = np.array([r[1] for r in results])
    big_gamma[0] = 0.0
    gamma[0] = 0.0
    logger.debug("Dephasing trace: Gamma_p(t_max)=%.6g", big_gamma[-1])
    return DephasingTrace(grid=grid, big_gamma_p=freeze(big_gamma), gamma_p=freeze(gamma))


def dephasing_joint_state(trace: DephasingTrace, k: int) -> XState4:
    """
    System+ancilla state at index k for the initial state (|10> + |01>)/sqrt(2)

    Raises:
        IndexError: If k is outside the grid
    """
    trace.grid.check_index(k)
    return XState4(
        p00=0.0, p10=0.5, p01=0.5, p11=0.0, kappa=0.5 * math.exp(trace.big_gamma_p[k])
    )


def dephasing_generator(rho: np.ndarray, gamma_p: float) -> np.ndarray:
    return gamma_p * (SIGMA_Z @ rho @ SIGMA_Z - rho)


def dephasing_propagate_master(trace: DephasingTrace, rho0: DensityMatrix2) -> Trajectory:
    """
    Propagate d rho/dt = gamma_p(t) (sigma_z rho sigma_z - rho) with RK4

    The half-step rate is the derivative of the cubic Hermite interpolant of
    Gamma_p, so the sampled exponent and the propagation stay consistent.
    """
    times = trace.times
    dt = trace.grid.dt
    big = trace.big_gamma_p
    rate = trace.gamma_p
    rho = rho0.to_matrix()
    states = [rho0]
    for k in range(trace.grid.count - 1):
        g0, g1 = rate[k], rate[k + 1]
        gm = -0.75 * (big[k + 1] - big[k]) / dt - 0.25 * (g0 + g1)
        k1 = dephasing_generator(rho, g0)
        k2 = dephasing_generator(rho + 0.5 * dt * k1, gm)
        k3 = dephasing_generator(rho + 0.5 * dt * k2, gm)
        k4 = dephasing_generator(rho + dt * k3, g1)
        rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states.append(DensityMatrix2.from_matrix(rho, tol=PROPAGATION_TOL))
    return Trajectory(times=freeze(times), states=states)
