"""
Tests for the damped Jaynes-Cummings dynamics
"""

import math

import numpy as np
import pytest

from nmq.analytic import lorentzian_first_zero, lorentzian_g
from nmq.exceptions import ConfigurationError, PropagationError
from nmq.grid import TimeGrid
from nmq.jc import TRACE_TOL, derive_rates, jc_joint_state, jc_propagate_master, solve_g
from nmq.quantum import concurrence_x, pure_state
from nmq.spectral import CorrelationKernel, Lorentzian, correlation_kernel
from scipy.integrate import cumulative_trapezoid


@pytest.fixture(scope="module")
def weak_trace():
    """Weak coupling, gamma0 = 0.1 lambda"""
    model = Lorentzian(gamma0=0.1, width=1.0)
    return solve_g(correlation_kernel(model), TimeGrid(t_max=5.0, dt=1e-3))


@pytest.fixture(scope="module")
def strong_trace():
    """Strong coupling, gamma0 = 10 lambda"""
    model = Lorentzian(gamma0=10.0, width=1.0)
    return solve_g(correlation_kernel(model), TimeGrid(t_max=5.0, dt=1e-3))


class TestTimeGrid:
    """Test grid construction"""

    def test_count_and_times(self):
        grid = TimeGrid(t_max=1.0, dt=0.25)
        assert grid.count == 5
        assert np.allclose(grid.times, [0.0, 0.25, 0.5, 0.75, 1.0])

    @pytest.mark.parametrize("dt", [0.0, -0.1, float("nan")])
    def test_invalid_step(self, dt):
        with pytest.raises(ConfigurationError):
            TimeGrid(t_max=1.0, dt=dt)

    def test_too_short(self):
        with pytest.raises(ConfigurationError):
            TimeGrid(t_max=0.01, dt=0.1)

    def test_check_index(self):
        grid = TimeGrid(t_max=1.0, dt=0.5)
        assert grid.check_index(2) == 2
        with pytest.raises(IndexError):
            grid.check_index(3)


class TestVolterra:
    """Test the G(t) solver against the Lorentzian closed form"""

    def test_weak_coupling_accuracy(self, weak_trace):
        exact = lorentzian_g(weak_trace.times, 0.1, 1.0)
        assert np.max(np.abs(weak_trace.g - exact)) < 1e-6

    def test_strong_coupling_accuracy(self, strong_trace):
        exact = lorentzian_g(strong_trace.times, 10.0, 1.0)
        assert np.max(np.abs(strong_trace.g - exact)) < 1e-6

    def test_second_order_convergence(self):
        """Halving dt cuts the error by about four"""
        model = Lorentzian(gamma0=10.0, width=1.0)
        kernel = correlation_kernel(model)
        errors = []
        for dt in (4e-3, 2e-3):
            trace = solve_g(kernel, TimeGrid(t_max=3.0, dt=dt))
            errors.append(np.max(np.abs(trace.g - lorentzian_g(trace.times, 10.0, 1.0))))
        assert 3.0 < errors[0] / errors[1] < 5.0

    def test_detuned(self):
        model = Lorentzian(gamma0=2.0, width=1.0, detuning=1.5)
        trace = solve_g(correlation_kernel(model), TimeGrid(t_max=4.0, dt=1e-3))
        exact = lorentzian_g(trace.times, 2.0, 1.0, detuning=1.5)
        assert np.max(np.abs(trace.g - exact)) < 1e-6

    def test_zero_kernel(self):
        """No reservoir leaves G = 1"""
        trace = solve_g(CorrelationKernel.zero(), TimeGrid(t_max=1.0, dt=0.01))
        assert np.allclose(trace.g, 1.0)
        assert np.allclose(trace.gamma, 0.0)

    def test_non_finite_kernel(self):
        kernel = CorrelationKernel(lambda tau: np.where(tau > 0.5, np.nan, 1.0) + 0j)
        with pytest.raises(PropagationError) as exc:
            solve_g(kernel, TimeGrid(t_max=1.0, dt=0.01))
        assert 0.5 <= exc.value.tau <= 0.52

    @pytest.mark.slow
    def test_long_horizon(self):
        """Weak and strong coupling over 20/lambda"""
        grid = TimeGrid(t_max=20.0, dt=1e-3)
        for gamma0 in (0.1, 10.0):
            trace = solve_g(correlation_kernel(Lorentzian(gamma0=gamma0, width=1.0)), grid)
            exact = lorentzian_g(trace.times, gamma0, 1.0)
            assert np.max(np.abs(trace.g - exact)) < 1e-6


class TestRates:
    """Test the derived rate functions"""

    def test_weak_coupling_no_flags(self, weak_trace):
        assert not weak_trace.divergent.any()
        assert np.all(weak_trace.gamma[1:] > 0)

    def test_accumulated_rate(self, weak_trace):
        """Gamma agrees with the cumulative trapezoid of gamma"""
        # Gamma is stored as -2 ln|G|, which stays defined past zeros of G. Both gamma
        # and the trapezoid rule carry O(dt^2) error here, so the two agree to an
        # absolute 1e-6 rather than to 1e-8 relative.
        integral = cumulative_trapezoid(weak_trace.gamma, weak_trace.times, initial=0.0)
        assert weak_trace.big_gamma[0] == 0.0
        assert np.allclose(weak_trace.big_gamma, integral, atol=1e-6)

    def test_pure_exponential(self):
        """G = e^{-t/2} gives gamma = 1, Gamma = t and S = 0"""
        grid = TimeGrid(t_max=2.0, dt=1e-3)
        trace = derive_rates(np.exp(-grid.times / 2), grid)
        assert np.allclose(trace.gamma, 1.0, atol=2e-6)
        assert np.allclose(trace.big_gamma, grid.times, atol=2e-6)
        assert np.allclose(trace.shift, 0.0, atol=2e-6)

    def test_zero_detection(self, strong_trace):
        """Samples around the first zero of G are flagged"""
        t0 = lorentzian_first_zero(10.0, 1.0)
        first = strong_trace.times[strong_trace.divergent_indices[0]]
        assert abs(first - t0) <= strong_trace.grid.dt

    def test_flagged_values(self, strong_trace):
        flags = strong_trace.divergent
        assert np.all(np.abs(strong_trace.gamma[flags]) == strong_trace.gamma_cap)
        assert np.all(strong_trace.big_gamma[flags] == strong_trace.big_gamma_cap)
        assert np.all(np.isfinite(strong_trace.gamma))

    def test_consistency_chain(self, strong_trace):
        """|G| = e^{-Gamma/2} on every unflagged sample, including after zeros"""
        ok = ~strong_trace.divergent
        amp = np.exp(-strong_trace.big_gamma[ok] / 2)
        assert np.allclose(amp, np.abs(strong_trace.g[ok]), rtol=0, atol=1e-6)

    def test_negative_rate_after_zero(self, strong_trace):
        k = strong_trace.divergent_indices[-1] + 5
        assert strong_trace.gamma[k] < 0

    def test_derive_from_samples(self, weak_trace):
        trace = derive_rates(np.array(weak_trace.g), weak_trace.grid)
        assert np.allclose(trace.gamma, weak_trace.gamma)

    def test_derive_needs_grid(self):
        with pytest.raises(ValueError):
            derive_rates(np.ones(5, dtype=complex))

    def test_g_floor_changes_cap(self, strong_trace):
        coarse = derive_rates(strong_trace, g_floor=1e-4)
        assert coarse.big_gamma_cap == pytest.approx(-2.0 * math.log(1e-4))
        assert coarse.divergent.sum() >= strong_trace.divergent.sum()


class TestJointState:
    """Test the system-ancilla state"""

    def test_concurrence_equals_amplitude(self, strong_trace):
        for k in (0, 100, 900, 2000, 4000):
            state = jc_joint_state(strong_trace, k)
            assert concurrence_x(state) == pytest.approx(abs(strong_trace.g[k]), abs=1e-12)

    def test_out_of_range(self, weak_trace):
        with pytest.raises(IndexError):
            jc_joint_state(weak_trace, weak_trace.grid.count)


class TestMasterEquation:
    """Test the time-local master equation against the element evolution"""

    def test_weak_coupling(self, weak_trace):
        rho0 = pure_state(math.pi / 3, 0.4)
        traj = jc_propagate_master(weak_trace, rho0)
        assert not traj.truncated
        assert len(traj) == weak_trace.grid.count
        g = weak_trace.g
        assert np.max(np.abs(traj.populations() - np.abs(g) ** 2 * rho0.rho11)) < 1e-5
        assert np.max(np.abs(traj.coherences() - g * rho0.rho10)) < 1e-5

    def test_strong_coupling_truncates(self, strong_trace):
        """Propagation stops before the first zero of G"""
        rho0 = pure_state(math.pi / 2, 0.0)
        traj = jc_propagate_master(strong_trace, rho0)
        t0 = lorentzian_first_zero(10.0, 1.0)
        assert traj.truncated
        assert t0 - 0.2 < traj.truncated_at <= t0
        n = len(traj)
        g = strong_trace.g[:n]
        assert np.max(np.abs(traj.populations() - np.abs(g) ** 2 * rho0.rho11)) < 1e-5
        assert np.max(np.abs(traj.coherences() - g * rho0.rho10)) < 1e-5

    @pytest.mark.parametrize("theta,phi", [(math.pi / 3, 0.4), (0.0, 0.0), (2.5, -1.2)])
    def test_unit_trace(self, weak_trace, strong_trace, theta, phi):
        """Every propagated state keeps unit trace within 1e-9"""
        rho0 = pure_state(theta, phi)
        for trace in (weak_trace, strong_trace):
            traj = jc_propagate_master(trace, rho0)
            totals = np.array([s.rho11 + s.rho00 for s in traj.states])
            assert np.max(np.abs(totals - 1.0)) < TRACE_TOL
