"""
Uniform time grids and propagated trajectories
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import ConfigurationError
from .quantum import DensityMatrix2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeGrid:
    """
    Uniform grid t_k = k*dt on [0, t_max]

    Attributes:
        t_max: Final time
        dt: Step size
    """

    t_max: float
    dt: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise ConfigurationError(f"grid.dt must be positive, got {self.dt!r}")
        if not np.isfinite(self.t_max) or self.t_max < self.dt:
            raise ConfigurationError(
                f"grid.t_max must be at least one step, got t_max={self.t_max!r}, dt={self.dt!r}"
            )
        steps = self.t_max / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            logger.warning(
                "t_max=%g is not a multiple of dt=%g; grid ends at %g",
                self.t_max,
                self.dt,
                round(steps) * self.dt,
            )

    @property
    def count(self) -> int:
        return int(round(self.t_max / self.dt)) + 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.count, dtype=float)

    def check_index(self, k: int) -> int:
        if not 0 <= k < self.count:
            raise IndexError(f"Grid index {k} out of range [0, {self.count})")
        return k


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Sequence of propagated states on a grid

    A truncated trajectory stops before the end of the grid; ``truncated_at``
    holds the time of the first step that could not be taken.
    """

    times: np.ndarray
    states: List[DensityMatrix2] = field(default_factory=list)
    truncated_at: Optional[float] = None

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None

    def __len__(self) -> int:
        return len(self.states)

    def populations(self) -> np.ndarray:
        return np.array([s.rho11 for s in self.states])

    def coherences(self) -> np.ndarray:
        return np.array([complex(s.rho10) for s in self.states])


def freeze(array: np.ndarray) -> np.ndarray:
    """Return a read-only copy of an array"""
    out = np.array(array, copy=True)
    out.setflags(write=False)
    return out
