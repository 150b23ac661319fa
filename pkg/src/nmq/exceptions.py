"""
Exceptions for the nmq package
"""

from typing import Optional


class NMQError(Exception):
    """Base exception for all nmq errors"""
    pass

class InvalidStateError(NMQError):
    """Raised when a density matrix violates hermiticity, normalization or positivity"""
    pass

class InvalidBlochError(InvalidStateError):
    """Raised when a Bloch vector lies outside the unit ball"""
    pass

class ConfigurationError(NMQError):
    """Raised when there's an issue with a run configuration or model definition"""
    pass

class SpectralDomainError(NMQError):
    """Raised when a spectral density is evaluated at a negative frequency"""
    pass

class UnsupportedKernelError(NMQError):
    """Raised when a correlation kernel is requested for a model that has none"""
    pass

class NumericalError(NMQError):
    """Base class for failures of the numerical pipeline"""
    pass

class PropagationError(NumericalError):
    """Raised when a kernel or rate produces a non-finite value during propagation"""

    def __init__(self, message: str, tau: Optional[float] = None) -> None:
        super().__init__(message)
        self.tau = tau

class UndeterminableIntervalsError(NumericalError):
    """Raised when every rate sample is flagged and no sign can be assigned"""
    pass

class DivergentPointError(NumericalError):
    """Raised when the Choi construction is asked for at a divergent rate"""
    pass

class DegeneratePairError(NumericalError):
    """Raised when the BLP measure is given two identical initial states"""
    pass

class QuadratureError(NumericalError):
    """Raised when an adaptive quadrature panel fails to reach its tolerance"""
    pass
