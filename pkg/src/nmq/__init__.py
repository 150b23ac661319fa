"""
nmq - Non-Markovianity measures for open two-level systems

This package computes the trace-distance, entanglement and divisibility
measures of non-Markovianity for the damped Jaynes-Cummings and the
pure-dephasing models, and checks that they pick out the same time intervals.
"""

__version__ = "0.1.0"

from .dephasing import DephasingTrace, dephasing_trace
from .exceptions import (
    ConfigurationError,
    InvalidStateError,
    NMQError,
    NumericalError,
    PropagationError,
)
from .grid import TimeGrid, Trajectory
from .jc import GTrace, derive_rates, solve_g
from .measures import (
    IntervalSet,
    MeasureReport,
    MeasureValue,
    blp_measure,
    choi_g,
    equivalence_report,
    measure_report,
    negative_intervals,
    pair_sweep,
    rhp_divisibility_measure,
    rhp_entanglement_measure,
)
from .quantum import DensityMatrix2, PairParams, XState4
from .spectral import Lorentzian, OhmicFamily, Tabulated, correlation_kernel

__all__ = [
    "ConfigurationError",
    "DensityMatrix2",
    "DephasingTrace",
    "GTrace",
    "IntervalSet",
    "InvalidStateError",
    "Lorentzian",
    "MeasureReport",
    "MeasureValue",
    "NMQError",
    "NumericalError",
    "OhmicFamily",
    "PairParams",
    "PropagationError",
    "Tabulated",
    "TimeGrid",
    "Trajectory",
    "XState4",
    "blp_measure",
    "choi_g",
    "correlation_kernel",
    "dephasing_trace",
    "derive_rates",
    "equivalence_report",
    "measure_report",
    "negative_intervals",
    "pair_sweep",
    "rhp_divisibility_measure",
    "rhp_entanglement_measure",
    "solve_g",
]
