"""
Density-matrix algebra for a two-level system and its ancilla

Single-qubit basis ordering is {|1>, |0>} (excited first). Two-qubit states use
{|11>, |10>, |01>, |00>} with the system as the first factor.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import InvalidBlochError, InvalidStateError

STATE_TOL = 1e-12


@dataclass(frozen=True)
class DensityMatrix2:
    """
    Single-qubit density matrix

    Attributes:
        rho11: Excited-state population <1|rho|1>
        rho00: Ground-state population <0|rho|0>
        rho10: Coherence <1|rho|0>; <0|rho|1> is its conjugate
        tol: Tolerance used when the invariants were checked
    """

    rho11: float
    rho00: float
    rho10: complex
    tol: float = STATE_TOL

    def __post_init__(self) -> None:
        if abs(self.rho11 + self.rho00 - 1.0) > self.tol:
            raise InvalidStateError(
                f"Trace {self.rho11 + self.rho00!r} deviates from 1"
            )
        if min(self.rho11, self.rho00) < -self.tol:
            raise InvalidStateError("Negative population")
        if self.determinant < -self.tol:
            raise InvalidStateError(f"Negative determinant {self.determinant:.3e}")

    @property
    def rho01(self) -> complex:
        return complex(self.rho10).conjugate()

    @property
    def determinant(self) -> float:
        return float(self.rho11 * self.rho00 - abs(self.rho10) ** 2)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tol: float = STATE_TOL) -> "DensityMatrix2":
        """
        Build a state from a 2x2 array in the {|1>, |0>} basis

        Args:
            matrix: Array-like of shape (2, 2)
            tol: Tolerance for hermiticity, trace and positivity

        Returns:
            DensityMatrix2 instance

        Raises:
            InvalidStateError: If the matrix is not a valid density matrix
        """
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidStateError(f"Expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[0, 1] - np.conj(m[1, 0])) > tol or abs(m[0, 0].imag) > tol or abs(m[1, 1].imag) > tol:
            raise InvalidStateError("Matrix is not Hermitian")
        return cls(float(m[0, 0].real), float(m[1, 1].real), complex(m[0, 1]), tol=tol)

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.rho11, self.rho10], [self.rho01, self.rho00]], dtype=complex)


@dataclass(frozen=True)
class XState4:
    """
    System+ancilla state with one inner coherence kappa = <10|rho|01>
    """

    p00: float
    p10: float
    p01: float
    p11: float
    kappa: complex

    def __post_init__(self) -> None:
        pops = (self.p00, self.p10, self.p01, self.p11)
        if abs(sum(pops) - 1.0) > STATE_TOL:
            raise InvalidStateError(f"Populations sum to {sum(pops)!r}")
        if min(pops) < -STATE_TOL:
            raise InvalidStateError("Negative population")
        if abs(self.kappa) ** 2 > self.p10 * self.p01 + STATE_TOL:
            raise InvalidStateError("Inner coherence exceeds the positivity bound")

    @classmethod
    def from_coefficients(cls, c1: complex, c2: complex) -> "XState4":
        """
        State c1|10> + c2|01> + (rest in |00>) traced over the environment

        Args:
            c1: Amplitude of |10>
            c2: Amplitude of |01>

        Returns:
            XState4 instance
        """
        p10 = abs(c1) ** 2
        p01 = abs(c2) ** 2
        return cls(
            p00=max(0.0, 1.0 - p10 - p01),
            p10=p10,
            p01=p01,
            p11=0.0,
            kappa=complex(c1) * complex(c2).conjugate(),
        )

    def to_matrix(self) -> np.ndarray:
        m = np.diag([self.p11, self.p10, self.p01, self.p00]).astype(complex)
        m[1, 2] = self.kappa
        m[2, 1] = np.conj(self.kappa)
        return m


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if self.norm_squared > 1.0 + STATE_TOL:
            raise InvalidBlochError(f"|r|^2 = {self.norm_squared:.6g} exceeds 1")

    @property
    def norm_squared(self) -> float:
        return self.x**2 + self.y**2 + self.z**2


@dataclass(frozen=True)
class PairParams:
    """
    Population difference a and coherence difference b of an initial-state pair
    """

    a: float
    b: complex

    def __post_init__(self) -> None:
        if not -1.0 - STATE_TOL <= self.a <= 1.0 + STATE_TOL:
            raise InvalidStateError(f"Population difference {self.a!r} outside [-1, 1]")
        if abs(self.b) > 1.0 + STATE_TOL:
            raise InvalidStateError(f"Coherence difference |b| = {abs(self.b):.6g} exceeds 1")

    @property
    def is_zero(self) -> bool:
        return self.a == 0.0 and self.b == 0.0


def trace_distance(rho1: DensityMatrix2, rho2: DensityMatrix2) -> float:
    """
    Trace distance between two single-qubit states

    The difference is traceless and Hermitian, so its eigenvalues are
    +/- sqrt(delta^2 + |beta|^2).

    Args:
        rho1: First state
        rho2: Second state

    Returns:
        D(rho1, rho2) in [0, 1]
    """
    delta = rho1.rho11 - rho2.rho11
    beta = complex(rho1.rho10) - complex(rho2.rho10)
    return min(1.0, math.sqrt(delta * delta + abs(beta) ** 2))


def concurrence_x(state: XState4) -> float:
    """Concurrence of an X state with a single inner coherence"""
    return max(0.0, 2.0 * (abs(state.kappa) - math.sqrt(max(state.p00 * state.p11, 0.0))))


def bloch_to_density(r: BlochVector) -> DensityMatrix2:
    # rho = (I + r.sigma)/2 with |1> as the +z eigenstate
    return DensityMatrix2(
        rho11=(1.0 + r.z) / 2.0,
        rho00=(1.0 - r.z) / 2.0,
        rho10=complex(r.x, -r.y) / 2.0,
    )


def pair_to_ab(rho1: DensityMatrix2, rho2: DensityMatrix2) -> PairParams:
    return PairParams(a=rho1.rho11 - rho2.rho11, b=complex(rho1.rho10) - complex(rho2.rho10))


def pure_state(theta: float, phi: float) -> DensityMatrix2:
    """Pure state cos(theta/2)|1> + e^{i phi} sin(theta/2)|0>"""
    r = BlochVector(
        math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)
    )
    return bloch_to_density(r)


def as_pair(value: Union[PairParams, tuple]) -> PairParams:
    if isinstance(value, PairParams):
        return value
    a, b = value
    return PairParams(a=float(a), b=complex(b))
