#!/usr/bin/env python3
"""
Basic usage examples for nmq.

This script walks through the library API:
- Solving for G(t) in the damped Jaynes-Cummings model
- Computing the three measures and their equivalence verdict
- Cross-checking N against master-equation trajectories
- Building a pure-dephasing trace
"""

import numpy as np

from nmq import (
    Lorentzian,
    NMQError,
    OhmicFamily,
    TimeGrid,
    correlation_kernel,
    dephasing_trace,
    measure_report,
    pair_sweep,
    solve_g,
)
from nmq.jc import jc_propagate_master
from nmq.measures import blp_from_trajectories, blp_measure
from nmq.quantum import DensityMatrix2, pair_to_ab


def jc_measures():
    """Strong coupling: G(t) has zeros and the divisibility measure diverges."""
    grid = TimeGrid(t_max=5.0, dt=1e-3)
    kernel = correlation_kernel(Lorentzian(gamma0=10.0, width=1.0))
    trace = solve_g(kernel, grid)

    print(f"Flagged samples near zeros of G: {trace.divergent_indices.size}")

    report = measure_report(trace, model={"kind": "lorentzian", "gamma0": 10.0})
    for name, value in [
        ("N", report.blp),
        ("I_E", report.entanglement),
        ("I", report.divisibility),
    ]:
        suffix = " (lower bound)" if value.divergent else ""
        print(f"{name:4s} = {value.value:.6f}{suffix}  intervals={value.intervals.to_list()[:2]}")
    print(f"Equivalent: {report.verdict.equivalent}")
    return trace


def trajectory_check(trace):
    """N from propagated states agrees with the direct evaluation."""
    excited = DensityMatrix2(rho11=1.0, rho00=0.0, rho10=0.0)
    plus = DensityMatrix2(rho11=0.5, rho00=0.5, rho10=0.5)
    first = jc_propagate_master(trace, excited)
    second = jc_propagate_master(trace, plus)
    if first.truncated:
        print(f"Propagation stopped at t={first.truncated_at:.4f}")

    from_states = blp_from_trajectories(first, second, trace.grid.dt)
    direct = blp_measure(trace, pair_to_ab(excited, plus))
    print(f"N from trajectories: {from_states.value:.6f} (direct: {direct.value:.6f})")


def dephasing_measures():
    """Super-Ohmic dephasing at zero temperature has one non-Markovian interval."""
    grid = TimeGrid(t_max=10.0, dt=0.01)
    trace = dephasing_trace(OhmicFamily(coupling=1.0, cutoff=1.0, exponent=3.0), grid, jobs=4)
    print(f"Gamma_p(t_max) = {trace.big_gamma_p[-1]:.6f}")
    print(f"Most negative rate: {np.min(trace.gamma_p):.6f}")

    summary = pair_sweep(trace, n_pairs=50, seed=7, jobs=4)
    print(f"Pair sweep invariant: {summary.invariant}")
    print(f"Canonical pair attains max: {summary.canonical_attains_max}")

    report = measure_report(trace, sweep=summary)
    print(report.to_dict()["verdict"])


def main():
    try:
        trace = jc_measures()
        trajectory_check(trace)
        dephasing_measures()
    except NMQError as e:
        print(f"Error: {e}")


if __name__ == "__main__":
    main()
