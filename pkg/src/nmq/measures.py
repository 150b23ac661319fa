"""
Non-Markovianity measures and their equivalence check

Three measures are computed on a sampled trace of either model:

- N, the trace-distance backflow of a pair of initial states,
- I_E, the entanglement revival with an ancilla,
- I, the integrated violation of CP-divisibility from the Choi state.

Each one comes with the set of time intervals on which it grows. The
equivalence verdict compares those sets and the positivity of the values.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize

from .dephasing import DephasingTrace, dephasing_generator, dephasing_joint_state
from .exceptions import (
    DegeneratePairError,
    DivergentPointError,
    UndeterminableIntervalsError,
)
from .grid import TimeGrid, Trajectory
from .jc import GTrace, jc_generator, jc_joint_state
from .quantum import (
    BlochVector,
    PairParams,
    bloch_to_density,
    concurrence_x,
    pair_to_ab,
    trace_distance,
)

logger = logging.getLogger(__name__)

Trace = Union[GTrace, DephasingTrace]

DEFAULT_EPSILONS = (1e-3, 1e-4, 1e-5)
VALUE_TOL = 1e-10
# g below this fraction of the rate scale is extrapolation residue, not CP violation
CHOI_ZERO_TOL = 1e-8
CANONICAL_PAIR = PairParams(a=0.0, b=1.0)
SWEEP_MAX_TOL = 0.01


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint (t_start, t_end) intervals"""

    intervals: Tuple[Tuple[float, float], ...] = ()

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def total_length(self) -> float:
        return sum(e - s for s, e in self.intervals)

    def distance(self, other: "IntervalSet") -> float:
        """
        Largest endpoint discrepancy between two sets

        Sets with different interval counts are infinitely far apart.
        """
        if len(self) != len(other):
            return math.inf
        dist = 0.0
        for (s1, e1), (s2, e2) in zip(self, other):
            dist = max(dist, abs(s1 - s2), abs(e1 - e2))
        return dist

    def to_list(self) -> List[List[float]]:
        return [[s, e] for s, e in self.intervals]


@dataclass(frozen=True)
class MeasureValue:
    """
    Value of one measure with the intervals that contribute to it

    Attributes:
        value: Measure value (a lower bound when ``divergent`` is set)
        intervals: Non-Markovian intervals of this measure
        divergent: Whether the true value is infinite
        closed_form: Same measure from the rate-function closed form, if any
    """

    value: float
    intervals: IntervalSet = field(default_factory=IntervalSet)
    divergent: bool = False
    closed_form: Optional[float] = None

    @property
    def positive(self) -> bool:
        return self.divergent or self.value > VALUE_TOL

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "value": self.value,
            "divergent": self.divergent,
            "intervals": self.intervals.to_list(),
        }
        if self.closed_form is not None:
            data["closed_form"] = self.closed_form
        return data


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    distance: float

    def to_dict(self) -> Dict[str, Any]:
        return {"equivalent": self.equivalent, "interval_distance": self.distance}


# ---------------------------------------------------------------------------
# Interval detection
# ---------------------------------------------------------------------------


def _flag_mask(n: int, flags: Optional[np.ndarray], rate: np.ndarray) -> np.ndarray:
    mask = np.zeros(n, dtype=bool) if flags is None else np.array(flags, dtype=bool)
    return mask | ~np.isfinite(rate)


def negative_intervals(
    rate: Sequence[float], grid: TimeGrid, flags: Optional[np.ndarray] = None
) -> IntervalSet:
    """
    Maximal intervals on which a sampled rate is negative

    Flagged samples take the sign of the nearest unflagged neighbour on their
    side of the flagged block; a sign change inside a block is placed at the
    block's middle. Other endpoints are linear-interpolation roots. Intervals
    shorter than one step are dropped.

    Args:
        rate: Rate samples on the grid
        grid: Time grid
        flags: Optional mask of samples whose value cannot be trusted

    Returns:
        IntervalSet

    Raises:
        UndeterminableIntervalsError: If every sample is flagged
    """
    r = np.asarray(rate, dtype=float)
    t = grid.times
    n = t.size
    if r.shape != (n,):
        raise ValueError(f"expected {n} rate samples, got {r.shape}")
    mask = _flag_mask(n, flags, r)
    if mask.all():
        raise UndeterminableIntervalsError("All rate samples are flagged")

    neg = np.zeros(n, dtype=bool)
    neg[~mask] = r[~mask] < 0
    if mask.any():
        edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
        for i, j in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1) - 1):
            left, right = i - 1, j + 1
            if left < 0:
                neg[i : j + 1] = neg[right]
            elif right >= n:
                neg[i : j + 1] = neg[left]
            else:
                mid = (i + j + 1) // 2
                neg[i:mid] = neg[left]
                neg[mid : j + 1] = neg[right]

    def crossing(k: int) -> float:
        # sign change between samples k and k + 1
        if mask[k] or mask[k + 1] or r[k] == r[k + 1]:
            return 0.5 * (t[k] + t[k + 1])
        return float(t[k] + (t[k + 1] - t[k]) * r[k] / (r[k] - r[k + 1]))

    dneg = np.diff(neg.astype(np.int8))
    starts = list(np.flatnonzero(dneg == 1) + 1)
    ends = list(np.flatnonzero(dneg == -1))
    if neg[0]:
        starts.insert(0, 0)
    if neg[-1]:
        ends.append(n - 1)

    out = []
    min_len = grid.dt * (1.0 - 1e-9)
    for ks, ke in zip(starts, ends):
        s = float(t[0]) if ks == 0 else crossing(ks - 1)
        e = float(t[-1]) if ke == n - 1 else crossing(ke)
        if e - s >= min_len:
            out.append((s, e))
    return IntervalSet(tuple(out))


def _rising_intervals(curve: np.ndarray, grid: TimeGrid, flags: Optional[np.ndarray]) -> IntervalSet:
    slope = np.gradient(curve, grid.dt, edge_order=2)
    return negative_intervals(-slope, grid, flags)


def _integrate_over(
    intervals: IntervalSet, grid: TimeGrid, y: np.ndarray, mask: Optional[np.ndarray] = None
) -> float:
    """Trapezoid integral of sampled y over the intervals, skipping masked samples"""
    t = grid.times
    keep = np.ones(t.size, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    keep &= np.isfinite(y)
    tk, yk = t[keep], y[keep]
    total = 0.0
    for s, e in intervals:
        inside = (tk > s) & (tk < e)
        ts = np.concatenate(([s], tk[inside], [e]))
        ys = np.concatenate(([np.interp(s, tk, yk)], yk[inside], [np.interp(e, tk, yk)]))
        total += float(trapezoid(ys, ts))
    return total


# ---------------------------------------------------------------------------
# Trace-derived curves
# ---------------------------------------------------------------------------


def _flags(trace: Trace) -> Optional[np.ndarray]:
    return trace.divergent if isinstance(trace, GTrace) else None


def _distance_from_coherence(amp: np.ndarray, pair: PairParams, jc: bool) -> np.ndarray:
    a2, b2 = pair.a**2, abs(pair.b) ** 2
    if jc:
        # rho_11 scales with |G|^2 and rho_10 with G
        return np.sqrt(amp**4 * a2 + amp**2 * b2)
    return np.sqrt(a2 + b2 * amp**2)


def trace_distance_curve(trace: Trace, pair: PairParams) -> np.ndarray:
    """Sampled D(t) for an initial pair with parameters (a, b)"""
    if isinstance(trace, GTrace):
        return _distance_from_coherence(np.abs(trace.g), pair, jc=True)
    return _distance_from_coherence(np.exp(trace.big_gamma_p), pair, jc=False)


def _distance_at(trace: Trace, pair: PairParams, t: float) -> float:
    if isinstance(trace, GTrace):
        return float(_distance_from_coherence(trace.amplitude_at(t), pair, jc=True))
    return float(_distance_from_coherence(trace.coherence_at(t), pair, jc=False))


def concurrence_curve(trace: Trace) -> np.ndarray:
    """System-ancilla concurrence at every grid point"""
    joint = jc_joint_state if isinstance(trace, GTrace) else dephasing_joint_state
    return np.array([concurrence_x(joint(trace, k)) for k in range(trace.grid.count)])


def _concurrence_at(trace: Trace, t: float) -> float:
    if isinstance(trace, GTrace):
        return float(trace.amplitude_at(t))
    return float(trace.coherence_at(t))


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def blp_measure(trace: Trace, pair: PairParams, mode: str = "direct") -> MeasureValue:
    """
    Trace-distance measure N for one pair of initial states

    ``direct`` differentiates the exactly known D(t) and sums its increases.
    ``formula`` integrates the rate-function integrand -gamma F(t) (JC) or
    -2 gamma_p |b|^2 e^{2 Gamma_p} / D (dephasing) over the negative-rate
    intervals.

    Raises:
        DegeneratePairError: If a = b = 0
        ValueError: For an unknown mode
    """
    if pair.is_zero:
        raise DegeneratePairError("Initial states are identical; trace distance is zero")
    grid = trace.grid
    flags = _flags(trace)

    if mode == "direct":
        curve = trace_distance_curve(trace, pair)
        intervals = _rising_intervals(curve, grid, flags)
        value = sum(_distance_at(trace, pair, e) - _distance_at(trace, pair, s) for s, e in intervals)
        return MeasureValue(value=max(0.0, value), intervals=intervals)

    if mode != "formula":
        raise ValueError(f"Unknown BLP mode {mode!r}")

    a2, b2 = pair.a**2, abs(pair.b) ** 2
    if isinstance(trace, GTrace):
        rate = trace.gamma
        big = trace.big_gamma
        factor = (a2 * np.exp(-1.5 * big) + b2 * np.exp(-0.5 * big)) / np.sqrt(a2 * np.exp(-big) + b2)
        integrand = -rate * factor
    else:
        rate = trace.gamma_p
        coh2 = np.exp(2.0 * trace.big_gamma_p)
        integrand = -2.0 * rate * b2 * coh2 / np.sqrt(a2 + b2 * coh2)
    intervals = negative_intervals(rate, grid, flags)
    value = _integrate_over(intervals, grid, integrand, flags)
    return MeasureValue(value=max(0.0, value), intervals=intervals)


def rhp_entanglement_measure(trace: Trace) -> MeasureValue:
    """
    Entanglement measure I_E = 2 * (sum of concurrence increases)

    The closed form -int gamma e^{-Gamma/2} (JC) or -4 int gamma_p e^{Gamma_p}
    (dephasing) over the negative-rate intervals is attached for comparison.
    """
    grid = trace.grid
    flags = _flags(trace)
    curve = concurrence_curve(trace)
    intervals = _rising_intervals(curve, grid, flags)
    value = 2.0 * sum(_concurrence_at(trace, e) - _concurrence_at(trace, s) for s, e in intervals)

    if isinstance(trace, GTrace):
        rate_intervals = negative_intervals(trace.gamma, grid, flags)
        closed = _integrate_over(
            rate_intervals, grid, -trace.gamma * np.exp(-0.5 * trace.big_gamma), flags
        )
    else:
        rate_intervals = negative_intervals(trace.gamma_p, grid)
        closed = _integrate_over(
            rate_intervals, grid, -4.0 * trace.gamma_p * np.exp(trace.big_gamma_p)
        )
    return MeasureValue(value=max(0.0, value), intervals=intervals, closed_form=max(0.0, closed))


def entanglement_measure_abs_form(trace: Trace) -> float:
    """I_E as int |dC/dt| dt - (C(0) - C(t_max)), evaluated on the samples"""
    curve = concurrence_curve(trace)
    return float(np.sum(np.abs(np.diff(curve))) - (curve[0] - curve[-1]))


def rhp_divisibility_measure(trace: Trace) -> MeasureValue:
    """
    Divisibility measure I from the accumulated rate

    JC: sum of Gamma(t_start) - Gamma(t_end) over negative-gamma intervals.
    An interval touching a zero of G makes I infinite; Gamma is then capped at
    -2 ln g_floor and the value is a lower bound with ``divergent`` set.
    Dephasing: sum of Gamma_p(t_end) - Gamma_p(t_start).
    """
    grid = trace.grid
    if isinstance(trace, DephasingTrace):
        intervals = negative_intervals(trace.gamma_p, grid)
        value = sum(
            float(trace.big_gamma_at(e)) - float(trace.big_gamma_at(s)) for s, e in intervals
        )
        return MeasureValue(value=max(0.0, value), intervals=intervals)

    flags = trace.divergent
    intervals = negative_intervals(trace.gamma, grid, flags)
    times = trace.times
    flagged_times = times[flags]
    divergent = False
    value = 0.0
    for s, e in intervals:
        start_gamma = float(trace.big_gamma_at(s))
        end_gamma = float(trace.big_gamma_at(e))
        near_start = np.any(np.abs(flagged_times - s) <= grid.dt)
        inside = np.any((flagged_times > s + grid.dt) & (flagged_times < e))
        if near_start or inside:
            divergent = True
            start_gamma = trace.big_gamma_cap
        if np.any(np.abs(flagged_times - e) <= grid.dt):
            divergent = True
        value += start_gamma - end_gamma
    if divergent:
        logger.info("Divisibility measure diverges; reporting lower bound %.6g", value)
    return MeasureValue(value=max(0.0, value), intervals=intervals, divergent=divergent)


# ---------------------------------------------------------------------------
# Choi-state construction
# ---------------------------------------------------------------------------


def _maximally_entangled(reference: str) -> Tuple[np.ndarray, List[int]]:
    # returns |Phi><Phi| and the ancilla index paired with each system index
    pairing = {"phi_plus": [0, 1], "psi_plus": [1, 0]}
    if reference not in pairing:
        raise ValueError(f"Unknown reference state {reference!r}")
    perm = pairing[reference]
    phi = np.zeros(4, dtype=complex)
    for i in range(2):
        phi[2 * i + perm[i]] = 1.0 / math.sqrt(2.0)
    return np.outer(phi, phi.conj()), perm


def _extended_generator(generator: Any, reference: str) -> np.ndarray:
    """(L (x) I) applied to |Phi><Phi|, for a linear map on 2x2 matrices"""
    _, perm = _maximally_entangled(reference)
    out = np.zeros((4, 4), dtype=complex)
    for i, j in itertools.product(range(2), repeat=2):
        e_sys = np.zeros((2, 2), dtype=complex)
        e_sys[i, j] = 1.0
        e_anc = np.zeros((2, 2), dtype=complex)
        e_anc[perm[i], perm[j]] = 1.0
        out += 0.5 * np.kron(generator(e_sys), e_anc)
    return out


def _generator_parts(kind: str, reference: str) -> List[np.ndarray]:
    if kind == "jc":
        return [
            _extended_generator(lambda m: jc_generator(m, 1.0, 0.0), reference),
            _extended_generator(lambda m: jc_generator(m, 0.0, 1.0), reference),
        ]
    if kind == "dephasing":
        return [_extended_generator(lambda m: dephasing_generator(m, 1.0), reference)]
    raise ValueError(f"Unknown model kind {kind!r}")


def _choi_values(
    kind: str, rates: np.ndarray, epsilons: Sequence[float], reference: str
) -> np.ndarray:
    """
    Vectorized g for rate rows (gamma, S) or (gamma_p,)

    epsilon is measured in units of 1 / max(|rates|, 1) so that the
    two-point Richardson step stays in its asymptotic regime.
    """
    eps = [float(e) for e in epsilons]
    if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
        raise ValueError("epsilon schedule must be a decreasing list of at least two positive values")
    phi, _ = _maximally_entangled(reference)
    parts = _generator_parts(kind, reference)
    rates = np.atleast_2d(np.asarray(rates, dtype=float))
    scale = np.maximum(np.max(np.abs(rates), axis=1), 1.0)
    gen = sum(rates[:, i, None, None] * parts[i] for i in range(len(parts)))

    estimates = []
    for e in eps[-2:]:
        step = (e / scale)[:, None, None]
        norms = np.abs(np.linalg.eigvalsh(phi[None, :, :] + step * gen)).sum(axis=1)
        estimates.append((norms - 1.0) / step[:, 0, 0])
    e_a, e_b = eps[-2], eps[-1]
    g = (e_a * estimates[1] - e_b * estimates[0]) / (e_a - e_b)
    g[g < CHOI_ZERO_TOL * scale] = 0.0
    return g


def choi_g(
    kind: str,
    gamma: float,
    shift: float = 0.0,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    divergent: bool = False,
    reference: str = "phi_plus",
) -> float:
    """
    CP-violation rate g(t) from the trace norm of the perturbed Choi state

    Args:
        kind: "jc" or "dephasing"
        gamma: gamma(t) for JC or gamma_p(t) for dephasing
        shift: S(t), JC only
        epsilons: Decreasing epsilon schedule; the last two are extrapolated
        divergent: Whether the rate at this time is flagged
        reference: "phi_plus" for (|11>+|00>)/sqrt(2), "psi_plus" for (|10>+|01>)/sqrt(2)

    Returns:
        g(t) >= 0

    Raises:
        DivergentPointError: If the rate is flagged or not finite
    """
    if divergent or not (math.isfinite(gamma) and math.isfinite(shift)):
        raise DivergentPointError(f"Rate is divergent (gamma={gamma!r})")
    row = [gamma, shift] if kind == "jc" else [gamma]
    return float(_choi_values(kind, np.array([row]), epsilons, reference)[0])


def choi_g_series(
    trace: Trace, epsilons: Sequence[float] = DEFAULT_EPSILONS, reference: str = "phi_plus"
) -> Tuple[np.ndarray, np.ndarray]:
    """
    g(t) on every grid point

    Returns:
        (g, flags) where flagged points hold NaN
    """
    if isinstance(trace, GTrace):
        flags = np.array(trace.divergent, dtype=bool)
        rates = np.column_stack([trace.gamma, trace.shift])
        kind = "jc"
    else:
        flags = np.zeros(trace.grid.count, dtype=bool)
        rates = np.asarray(trace.gamma_p)[:, None]
        kind = "dephasing"
    g = np.full(trace.grid.count, np.nan)
    ok = ~flags
    if ok.any():
        g[ok] = _choi_values(kind, rates[ok], epsilons, reference)
    return g, flags


def choi_intervals(trace: Trace, epsilons: Sequence[float] = DEFAULT_EPSILONS) -> IntervalSet:
    g, flags = choi_g_series(trace, epsilons)
    return negative_intervals(-np.nan_to_num(g), trace.grid, flags)


def curves(
    trace: Trace, pair: PairParams, epsilons: Sequence[float] = DEFAULT_EPSILONS
) -> Dict[str, np.ndarray]:
    """Per-sample D(t), C(t) and g(t); g is NaN where the rate is flagged"""
    g, _ = choi_g_series(trace, epsilons)
    return {
        "trace_distance": trace_distance_curve(trace, pair),
        "concurrence": concurrence_curve(trace),
        "g_choi": g,
    }


# ---------------------------------------------------------------------------
# Cross-propagator check
# ---------------------------------------------------------------------------


def blp_from_trajectories(first: Trajectory, second: Trajectory, dt: float) -> MeasureValue:
    """
    N from two propagated trajectories, using trace_distance on each step

    Truncated trajectories are compared over their common length.
    """
    n = min(len(first), len(second))
    if n < 2:
        return MeasureValue(value=0.0)
    curve = np.array([trace_distance(p, q) for p, q in zip(first.states[:n], second.states[:n])])
    grid = TimeGrid(t_max=(n - 1) * dt, dt=dt)
    intervals = _rising_intervals(curve, grid, None)
    t = grid.times
    value = sum(float(np.interp(e, t, curve) - np.interp(s, t, curve)) for s, e in intervals)
    return MeasureValue(value=max(0.0, value), intervals=intervals)


# ---------------------------------------------------------------------------
# Pair sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSummary:
    """
    Outcome of a random sweep over initial-state pairs

    Attributes:
        n_pairs: Number of sampled pairs
        seed: Seed of the generator
        values: N for each pair, in draw order
        invariant: Whether every pair reproduced the canonical interval set
        max_distance: Largest interval-set distance to the canonical set
        argmax_pair: Pair with the largest N (after refinement)
        max_value: Largest N found by the sweep and the refinement
        canonical_value: N for a = 0, |b| = 1
        canonical_attains_max: Whether the canonical pair is within 1% of the maximum
    """

    n_pairs: int
    seed: int
    values: Tuple[float, ...]
    invariant: bool
    max_distance: float
    argmax_pair: PairParams
    max_value: float
    sweep_max_value: float
    canonical_value: float
    canonical_attains_max: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "invariant": self.invariant,
            "max_interval_distance": self.max_distance,
            "argmax_pair": {"a": self.argmax_pair.a, "b": _complex_pair(self.argmax_pair.b)},
            "max_value": self.max_value,
            "sweep_max_value": self.sweep_max_value,
            "canonical_value": self.canonical_value,
            "canonical_attains_max": self.canonical_attains_max,
        }


def _complex_pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _ball_points(rng: np.random.Generator, n: int) -> np.ndarray:
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    radius = rng.random(n) ** (1.0 / 3.0)
    return direction * radius[:, None]


def _to_ball(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0:
        return v
    return v * math.tanh(norm) / norm


def _from_ball(r: np.ndarray) -> np.ndarray:
    norm = min(float(np.linalg.norm(r)), 1.0 - 1e-9)
    if norm == 0:
        return np.zeros(3)
    return r * math.atanh(norm) / norm


def _pair_from_bloch(r1: np.ndarray, r2: np.ndarray) -> PairParams:
    rho1 = bloch_to_density(BlochVector(*(float(x) for x in r1)))
    rho2 = bloch_to_density(BlochVector(*(float(x) for x in r2)))
    return pair_to_ab(rho1, rho2)


def _refine(trace: Trace, r1: np.ndarray, r2: np.ndarray, maxiter: int) -> Tuple[float, PairParams]:
    def objective(x: np.ndarray) -> float:
        pair = _pair_from_bloch(_to_ball(x[:3]), _to_ball(x[3:]))
        if pair.is_zero:
            return 0.0
        return -blp_measure(trace, pair).value

    x0 = np.concatenate([_from_ball(r1), _from_ball(r2)])
    result = minimize(objective, x0, method="Nelder-Mead", options={"maxiter": maxiter, "xatol": 1e-6})
    best = _pair_from_bloch(_to_ball(result.x[:3]), _to_ball(result.x[3:]))
    return -float(result.fun), best


def pair_sweep(
    trace: Trace,
    n_pairs: int,
    seed: int,
    jobs: int = 1,
    refine: bool = True,
    refine_maxiter: int = 400,
) -> SweepSummary:
    """
    Sample initial-state pairs uniformly in the Bloch ball and compare their N

    Pairs are drawn up front from ``numpy.random.default_rng(seed)``, so the
    result does not depend on ``jobs``.

    Args:
        trace: JC or dephasing trace
        n_pairs: Number of pairs (>= 2)
        seed: Generator seed
        jobs: Worker threads for evaluating the pairs
        refine: Run a Nelder-Mead search from the best sampled pair
        refine_maxiter: Iteration cap of the refinement

    Returns:
        SweepSummary
    """
    if n_pairs < 2:
        raise ValueError("pair_sweep needs at least two pairs")
    rng = np.random.default_rng(seed)
    firsts = _ball_points(rng, n_pairs)
    seconds = _ball_points(rng, n_pairs)
    pairs = [_pair_from_bloch(r1, r2) for r1, r2 in zip(firsts, seconds)]

    def evaluate(pair: PairParams) -> Optional[MeasureValue]:
        return None if pair.is_zero else blp_measure(trace, pair)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, pairs))
    else:
        results = [evaluate(p) for p in pairs]

    canonical = blp_measure(trace, CANONICAL_PAIR)
    tolerance = 2.0 * trace.grid.dt
    max_distance = 0.0
    dephasing = isinstance(trace, DephasingTrace)
    for pair, res in zip(pairs, results):
        # pure population differences never change under dephasing
        if res is not None and not (dephasing and pair.b == 0):
            max_distance = max(max_distance, res.intervals.distance(canonical.intervals))
    values = tuple(0.0 if r is None else r.value for r in results)

    best = int(np.argmax(values))
    sweep_max = values[best]
    max_value, argmax_pair = sweep_max, pairs[best]
    if refine and sweep_max > VALUE_TOL:
        refined_value, refined_pair = _refine(trace, firsts[best], seconds[best], refine_maxiter)
        logger.debug("Refinement raised max N from %.6g to %.6g", sweep_max, refined_value)
        if refined_value > max_value:
            max_value, argmax_pair = refined_value, refined_pair

    attains = canonical.value >= (1.0 - SWEEP_MAX_TOL) * max_value
    return SweepSummary(
        n_pairs=n_pairs,
        seed=seed,
        values=values,
        invariant=max_distance <= tolerance,
        max_distance=max_distance,
        argmax_pair=argmax_pair,
        max_value=max_value,
        sweep_max_value=sweep_max,
        canonical_value=canonical.value,
        canonical_attains_max=bool(attains),
    )


# ---------------------------------------------------------------------------
# Equivalence and reporting
# ---------------------------------------------------------------------------


def equivalence_report(
    sets: Sequence[IntervalSet], values: Sequence[MeasureValue], dt: float
) -> EquivalenceVerdict:
    """
    Compare the interval sets and positivity of the three measures

    The verdict holds when every pair of sets agrees endpoint by endpoint
    within 2*dt and the measures are all positive or all zero.
    """
    distance = 0.0
    for first, second in itertools.combinations(sets, 2):
        distance = max(distance, first.distance(second))
    positivity = {v.positive for v in values}
    equivalent = distance <= 2.0 * dt and len(positivity) <= 1
    return EquivalenceVerdict(equivalent=bool(equivalent), distance=distance)


@dataclass(frozen=True)
class MeasureReport:
    """
    All three measures for one trace, with their equivalence verdict

    ``blp_formula`` is the rate-function evaluation of N for the same pair;
    ``canonical`` compares N at a = 0, |b| = 1 with I_E / 2.
    """

    model: Dict[str, Any]
    pair: PairParams
    blp: MeasureValue
    blp_formula: MeasureValue
    entanglement: MeasureValue
    divisibility: MeasureValue
    choi: IntervalSet
    verdict: EquivalenceVerdict
    canonical: Dict[str, float]
    sweep: Optional[SweepSummary] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "model": self.model,
            "pair": {"a": self.pair.a, "b": _complex_pair(self.pair.b)},
            "measures": {
                "blp": self.blp.to_dict(),
                "blp_formula": self.blp_formula.to_dict(),
                "entanglement": self.entanglement.to_dict(),
                "divisibility": self.divisibility.to_dict(),
            },
            "choi_intervals": self.choi.to_list(),
            "verdict": self.verdict.to_dict(),
            "canonical_pair": self.canonical,
        }
        if self.sweep is not None:
            data["pair_sweep"] = self.sweep.to_dict()
        return data


def measure_report(
    trace: Trace,
    pair: Optional[PairParams] = None,
    model: Optional[Dict[str, Any]] = None,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    sweep: Optional[SweepSummary] = None,
) -> MeasureReport:
    """
    Compute N, I_E and I on one trace and decide their equivalence

    With a sweep summary, N is reported for the sweep's best pair.
    """
    if sweep is not None:
        pair = sweep.argmax_pair
    if pair is None:
        pair = CANONICAL_PAIR
    blp = blp_measure(trace, pair, mode="direct")
    blp_formula = blp_measure(trace, pair, mode="formula")
    entanglement = rhp_entanglement_measure(trace)
    divisibility = rhp_divisibility_measure(trace)
    choi = choi_intervals(trace, epsilons)
    verdict = equivalence_report(
        [blp.intervals, entanglement.intervals, choi],
        [blp, entanglement, divisibility],
        trace.grid.dt,
    )
    canonical_direct = blp_measure(trace, CANONICAL_PAIR, mode="direct").value
    canonical = {
        "blp_direct": canonical_direct,
        "blp_formula": blp_measure(trace, CANONICAL_PAIR, mode="formula").value,
        "half_entanglement": 0.5 * entanglement.value,
        "half_relation_deviation": abs(canonical_direct - 0.5 * entanglement.value),
    }
    logger.info(
        "N=%.6g I_E=%.6g I=%.6g%s equivalent=%s",
        blp.value,
        entanglement.value,
        divisibility.value,
        " (divergent)" if divisibility.divergent else "",
        verdict.equivalent,
    )
    return MeasureReport(
        model=model or {},
        pair=pair,
        blp=blp,
        blp_formula=blp_formula,
        entanglement=entanglement,
        divisibility=divisibility,
        choi=choi,
        verdict=verdict,
        canonical=canonical,
        sweep=sweep,
    )
