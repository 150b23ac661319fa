"""
Damped Jaynes-Cummings dynamics

Solves dG/dt = -int_0^t f(t - t1) G(t1) dt1 with G(0) = 1, derives the decay
rate gamma(t) = -2 Re(G'/G), the accumulated Gamma(t) and the shift
S(t) = -2 Im(G'/G), and propagates the time-local master equation built from
them.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import PropagationError
from .grid import TimeGrid, Trajectory, freeze
from .quantum import DensityMatrix2, XState4
from .spectral import CorrelationKernel

logger = logging.getLogger(__name__)

DEFAULT_G_FLOOR = 1e-8
PROPAGATION_TOL = 1e-7
# allowed drift of the trace over a whole propagation
TRACE_TOL = 1e-9
# largest |rate| * dt an RK4 step may take with linearly interpolated rates
STIFFNESS_LIMIT = 0.05

SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
EXCITED_PROJECTOR = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)


@dataclass(frozen=True, eq=False)
class GTrace:
    """
    Sampled decoherence function and its rate functions

    Attributes:
        grid: Time grid of the samples
        g: Complex G(t_k)
        gamma: Decay rate gamma(t_k); flagged samples hold +/- 1/g_floor
        big_gamma: Accumulated rate Gamma(t_k); flagged samples hold -2 ln g_floor
        shift: Frequency shift S(t_k); flagged samples hold +/- 1/g_floor
        divergent: Mask of samples near a zero of G
        g_floor: Threshold used to flag zeros of G
    """

    grid: TimeGrid
    g: np.ndarray
    gamma: np.ndarray
    big_gamma: np.ndarray
    shift: np.ndarray
    divergent: np.ndarray
    g_floor: float = DEFAULT_G_FLOOR

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def divergent_indices(self) -> np.ndarray:
        return np.flatnonzero(self.divergent)

    @property
    def gamma_cap(self) -> float:
        return 1.0 / self.g_floor

    @property
    def big_gamma_cap(self) -> float:
        return -2.0 * math.log(self.g_floor)

    @cached_property
    def _g_spline(self) -> CubicSpline:
        return CubicSpline(self.times, self.g)

    def amplitude_at(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """|G(t)| between samples, from a cubic spline of the complex G"""
        return np.abs(self._g_spline(t))

    def big_gamma_at(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """Gamma(t) = -2 ln|G(t)|, capped at -2 ln g_floor"""
        amp = np.maximum(self.amplitude_at(t), self.g_floor)
        return -2.0 * np.log(amp)


def _check_kernel(samples: np.ndarray, times: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(samples))
    if bad.size:
        tau = float(times[bad[0]])
        raise PropagationError(f"Correlation kernel is not finite at tau={tau:.6g}", tau=tau)


def solve_g(
    kernel: CorrelationKernel, grid: TimeGrid, g_floor: float = DEFAULT_G_FLOOR
) -> GTrace:
    """
    Integrate the Volterra equation for G(t) on a uniform grid

    Both the memory integral and the time stepping use trapezoidal weights.
    The corrector equation is linear in G_{n+1}, so it is solved exactly
    instead of being iterated from a predictor. The scheme is second order and
    costs O(N^2).

    Args:
        kernel: Reservoir correlation function f(tau)
        grid: Time grid
        g_floor: Threshold below which |G| counts as a zero

    Returns:
        GTrace with rates derived by ``derive_rates``

    Raises:
        PropagationError: If the kernel is not finite somewhere on [0, t_max]
    """
    times = grid.times
    n_pts = grid.count
    dt = grid.dt
    f = np.asarray(kernel(times), dtype=complex)
    _check_kernel(f, times)

    g = np.empty(n_pts, dtype=complex)
    y = np.empty(n_pts, dtype=complex)  # y_n = int_0^{t_n} f(t_n - s) G(s) ds
    g[0] = 1.0
    y[0] = 0.0
    half = 0.5 * dt
    denom = 1.0 + half * half * f[0]
    for n in range(n_pts - 1):
        # memory integral for t_{n+1} without the G_{n+1} endpoint term
        h = dt * (0.5 * f[n + 1] * g[0] + np.dot(f[n:0:-1], g[1 : n + 1]))
        g[n + 1] = (g[n] - half * (y[n] + h)) / denom
        y[n + 1] = h + half * f[0] * g[n + 1]

    if not np.all(np.isfinite(g)):
        k = int(np.flatnonzero(~np.isfinite(g))[0])
        raise PropagationError(f"G became non-finite at t={times[k]:.6g}", tau=float(times[k]))

    logger.debug("Solved G on %d points, |G(t_max)|=%.3e", n_pts, abs(g[-1]))
    return derive_rates(g, grid, g_floor)


def _zero_flags(g: np.ndarray, g_floor: float) -> np.ndarray:
    """Flag samples with |G| < g_floor and both ends of segments passing near 0"""
    flags = np.abs(g) < g_floor
    v = g[1:] - g[:-1]
    norm2 = np.abs(v) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(norm2 > 0, -np.real(np.conj(v) * g[:-1]) / norm2, 0.0)
    s = np.clip(s, 0.0, 1.0)
    near = np.abs(g[:-1] + s * v) < g_floor
    flags[:-1] |= near
    flags[1:] |= near
    return flags


def derive_rates(
    g: Union[GTrace, np.ndarray], grid: Optional[TimeGrid] = None, g_floor: float = DEFAULT_G_FLOOR
) -> GTrace:
    """
    Derive gamma, Gamma and S from sampled G

    G' comes from centered differences (second-order one-sided at the ends).
    Samples near a zero of G are flagged rather than failing; their gamma and
    S hold +/- 1/g_floor and Gamma holds -2 ln g_floor. Elsewhere Gamma is
    -2 ln|G|, the closed integral of gamma; a cumulative trapezoid of the
    sampled gamma agrees with it to O(dt^2) away from zeros of G.

    Args:
        g: A GTrace or raw complex samples of G
        grid: Grid of the samples (taken from the trace when omitted)
        g_floor: Zero threshold for |G|

    Returns:
        GTrace with all rate arrays filled in
    """
    if isinstance(g, GTrace):
        grid = g.grid
        samples = np.asarray(g.g, dtype=complex)
    else:
        samples = np.asarray(g, dtype=complex)
    if grid is None:
        raise ValueError("grid is required when deriving rates from raw samples")
    if samples.shape != (grid.count,):
        raise ValueError(f"expected {grid.count} samples, got {samples.shape}")

    times = grid.times
    flags = _zero_flags(samples, g_floor)
    dg = np.gradient(samples, grid.dt, edge_order=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = dg / samples
    gamma = -2.0 * ratio.real
    shift = -2.0 * ratio.imag

    cap = 1.0 / g_floor
    for arr in (gamma, shift):
        bad = flags | ~np.isfinite(arr)
        sign = np.where(np.isfinite(arr) & (arr < 0), -1.0, 1.0)
        arr[bad] = sign[bad] * cap
    flags = flags | ~np.isfinite(ratio)

    # gamma = -2 d ln|G|/dt, so this is its exact running integral
    with np.errstate(divide="ignore"):
        big_gamma = np.where(flags, -2.0 * math.log(g_floor), -2.0 * np.log(np.abs(samples)))

    if flags.any():
        logger.info(
            "G has %d flagged samples (first at t=%.6g)",
            int(flags.sum()),
            float(times[np.flatnonzero(flags)[0]]),
        )

    return GTrace(
        grid=grid,
        g=freeze(samples),
        gamma=freeze(gamma),
        big_gamma=freeze(big_gamma),
        shift=freeze(shift),
        divergent=freeze(flags),
        g_floor=g_floor,
    )


def jc_joint_state(trace: GTrace, k: int) -> XState4:
    """
    System+ancilla state at grid index k for the initial state (|10> + |01>)/sqrt(2)

    Raises:
        IndexError: If k is outside the grid
    """
    trace.grid.check_index(k)
    return XState4.from_coefficients(trace.g[k] / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


def jc_generator(rho: np.ndarray, gamma: float, shift: float) -> np.ndarray:
    """Right-hand side of the time-local amplitude-damping master equation"""
    commutator = EXCITED_PROJECTOR @ rho - rho @ EXCITED_PROJECTOR
    anti = EXCITED_PROJECTOR @ rho + rho @ EXCITED_PROJECTOR
    jump = SIGMA_MINUS @ rho @ SIGMA_PLUS
    return -0.5j * shift * commutator + gamma * (jump - 0.5 * anti)


def jc_propagate_master(trace: GTrace, rho0: DensityMatrix2) -> Trajectory:
    """
    Propagate the master equation with classical RK4 on the trace's grid

    Rates at half steps are linear interpolations of the sampled gamma and S.
    Propagation halts before the first step touching a flagged sample, or
    earlier where |rate| * dt exceeds STIFFNESS_LIMIT on the way into a zero
    of G.

    Args:
        trace: GTrace with rates
        rho0: Initial system state

    Returns:
        Trajectory, truncated when a divergent rate is reached

    Raises:
        PropagationError: If the trace drifts by more than TRACE_TOL
    """
    times = trace.times
    dt = trace.grid.dt
    rho = rho0.to_matrix()
    trace0 = rho0.rho11 + rho0.rho00
    states = [rho0]
    truncated_at = None
    for k in range(trace.grid.count - 1):
        if trace.divergent[k] or trace.divergent[k + 1]:
            truncated_at = float(times[k + 1] if not trace.divergent[k] else times[k])
            logger.info("Master-equation propagation truncated at t=%.6g", truncated_at)
            break
        g0, g1 = trace.gamma[k], trace.gamma[k + 1]
        s0, s1 = trace.shift[k], trace.shift[k + 1]
        if dt * max(abs(g0), abs(g1), abs(s0), abs(s1)) > STIFFNESS_LIMIT:
            truncated_at = float(times[k])
            logger.info("Master-equation propagation stopped at stiff rate, t=%.6g", truncated_at)
            break
        gm, sm = 0.5 * (g0 + g1), 0.5 * (s0 + s1)
        k1 = jc_generator(rho, g0, s0)
        k2 = jc_generator(rho + 0.5 * dt * k1, gm, sm)
        k3 = jc_generator(rho + 0.5 * dt * k2, gm, sm)
        k4 = jc_generator(rho + dt * k3, g1, s1)
        rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if abs(rho[0, 0].real + rho[1, 1].real - trace0) > TRACE_TOL:
            raise PropagationError(
                f"Master-equation trace drifted at t={times[k + 1]:.6g}", tau=float(times[k + 1])
            )
        states.append(DensityMatrix2.from_matrix(rho, tol=PROPAGATION_TOL))
    return Trajectory(times=freeze(times[: len(states)]), states=states, truncated_at=truncated_at)
