"""
Closed-form reference solutions

These are the exact results for the Lorentzian Jaynes-Cummings bath and the
zero-temperature Ohmic-family dephasing bath. The numerical pipeline never
depends on them; they serve as oracles for validation.
"""

import math
from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

ArrayLike = Union[float, np.ndarray]


def lorentzian_g(t: ArrayLike, gamma0: float, width: float, detuning: float = 0.0) -> np.ndarray:
    """
    Exact G(t) for the Lorentzian kernel (gamma0*width/2) e^{-width|t|} e^{i detuning t}

    G(t) = e^{-zt/2} [cosh(dt/2) + (z/d) sinh(dt/2)] with z = width - i*detuning
    and d = sqrt(z^2 - 2*gamma0*width).
    """
    t = np.asarray(t, dtype=float)
    z = complex(width, -detuning)
    d = np.sqrt(z * z - 2.0 * gamma0 * width + 0j)
    if abs(d) < 1e-14:
        # critical damping limit
        return np.exp(-z * t / 2.0) * (1.0 + z * t / 2.0)
    return np.exp(-z * t / 2.0) * (np.cosh(d * t / 2.0) + (z / d) * np.sinh(d * t / 2.0))


def lorentzian_first_zero(gamma0: float, width: float, t_max: float = 100.0) -> float:
    """
    First zero of G(t) for the resonant Lorentzian bath

    Only exists in the strong-coupling regime gamma0 > width/2.

    Raises:
        ValueError: If G has no zero on (0, t_max]
    """
    if 2.0 * gamma0 <= width:
        raise ValueError("G(t) has no zeros for gamma0 <= width/2")
    omega = math.sqrt(2.0 * gamma0 * width - width**2) / 2.0
    # G = e^{-width t/2}[cos(omega t) + width/(2 omega) sin(omega t)], first root in (pi/2, pi)/omega
    lo, hi = 0.5 * math.pi / omega, math.pi / omega
    if hi > t_max:
        raise ValueError("first zero lies beyond t_max")
    return brentq(lambda s: float(lorentzian_g(s, gamma0, width).real), lo, hi, xtol=1e-14)


def ohmic_dephasing_exponent(
    t: ArrayLike, exponent: float, cutoff: float = 1.0, coupling: float = 1.0
) -> np.ndarray:
    """
    Zero-temperature Gamma_p(t) for J = coupling * w^s * cutoff^(1-s) e^{-w/cutoff}

    For s = 1 this is -coupling/2 * ln(1 + (cutoff t)^2); otherwise
    -coupling * Gamma(s-1) * [1 - Re (1 - i cutoff t)^{1-s}].
    """
    x = cutoff * np.asarray(t, dtype=float)
    if exponent <= 0:
        raise ValueError("closed form requires s > 0")
    if exponent == 1.0:
        return -0.5 * coupling * np.log1p(x * x)
    power = np.power(1.0 - 1j * x, 1.0 - exponent)
    return -coupling * gamma_fn(exponent - 1.0) * (1.0 - power.real)


def ohmic_dephasing_rate(
    t: ArrayLike, exponent: float, cutoff: float = 1.0, coupling: float = 1.0
) -> np.ndarray:
    """Zero-temperature gamma_p(t) = coupling*cutoff/2 * Gamma(s) * Im (1 - i cutoff t)^{-s}"""
    x = cutoff * np.asarray(t, dtype=float)
    if exponent <= 0:
        raise ValueError("closed form requires s > 0")
    power = np.power(1.0 - 1j * x, -exponent)
    return 0.5 * coupling * cutoff * gamma_fn(exponent) * power.imag
