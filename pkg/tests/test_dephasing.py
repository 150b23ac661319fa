"""
Tests for the pure-dephasing model
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from nmq.analytic import ohmic_dephasing_exponent, ohmic_dephasing_rate
from nmq.dephasing import (
    dephasing_joint_state,
    dephasing_propagate_master,
    dephasing_trace,
)
from nmq.exceptions import ConfigurationError, QuadratureError
from nmq.grid import TimeGrid
from nmq.quantum import concurrence_x, pure_state
from nmq.spectral import Lorentzian, OhmicFamily, Tabulated


@pytest.fixture(scope="module")
def grid():
    return TimeGrid(t_max=4.0, dt=0.02)


@pytest.fixture(scope="module")
def super_ohmic(grid):
    """s = 3 at zero temperature; gamma_p turns negative at t = sqrt(3)"""
    return dephasing_trace(OhmicFamily(coupling=1.0, cutoff=1.0, exponent=3.0), grid)


class TestOhmicClosedForm:
    """Test the quadrature against the zero-temperature closed forms"""

    def test_super_ohmic_exponent(self, super_ohmic):
        exact = ohmic_dephasing_exponent(super_ohmic.times, 3.0)
        assert np.max(np.abs(super_ohmic.big_gamma_p - exact)) < 1e-7

    def test_super_ohmic_rate(self, super_ohmic):
        exact = ohmic_dephasing_rate(super_ohmic.times, 3.0)
        assert np.max(np.abs(super_ohmic.gamma_p - exact)) < 1e-7

    def test_rate_sign_change(self, super_ohmic):
        t = super_ohmic.times
        assert np.all(super_ohmic.gamma_p[(t > 0) & (t < 1.7)] > 0)
        assert np.all(super_ohmic.gamma_p[t > 1.76] < 0)

    def test_ohmic(self, grid):
        """s = 1 dephases monotonically"""
        trace = dephasing_trace(OhmicFamily(coupling=0.5, cutoff=1.0, exponent=1.0), grid)
        exact = ohmic_dephasing_exponent(trace.times, 1.0, coupling=0.5)
        assert np.max(np.abs(trace.big_gamma_p - exact)) < 1e-7
        assert np.all(trace.gamma_p[1:] > 0)

    def test_cutoff_scaling(self):
        grid = TimeGrid(t_max=2.0, dt=0.05)
        trace = dephasing_trace(OhmicFamily(coupling=1.0, cutoff=2.0, exponent=3.0), grid)
        exact = ohmic_dephasing_exponent(trace.times, 3.0, cutoff=2.0)
        assert np.max(np.abs(trace.big_gamma_p - exact)) < 1e-7

    def test_starts_at_zero(self, super_ohmic):
        assert super_ohmic.big_gamma_p[0] == 0.0
        assert super_ohmic.gamma_p[0] == 0.0

    def test_jobs_do_not_change_result(self, grid, super_ohmic):
        model = OhmicFamily(coupling=1.0, cutoff=1.0, exponent=3.0)
        threaded = dephasing_trace(model, grid, jobs=3)
        assert np.array_equal(threaded.big_gamma_p, super_ohmic.big_gamma_p)
        assert np.array_equal(threaded.gamma_p, super_ohmic.gamma_p)

    def test_interpolant_matches_samples(self, super_ohmic):
        t = super_ohmic.times
        assert np.allclose(super_ohmic.big_gamma_at(t), super_ohmic.big_gamma_p)
        mid = 0.5 * (t[:-1] + t[1:])
        exact = ohmic_dephasing_exponent(mid, 3.0)
        assert np.max(np.abs(super_ohmic.big_gamma_at(mid) - exact)) < 1e-6


class TestFiniteTemperature:
    """Test thermal dephasing and its failure modes"""

    def test_thermal_enhancement(self, grid, super_ohmic):
        """coth > 1 makes the exponent more negative"""
        warm = dephasing_trace(
            OhmicFamily(coupling=1.0, cutoff=1.0, exponent=3.0, temperature=0.5), grid
        )
        assert np.all(warm.big_gamma_p[1:] < super_ohmic.big_gamma_p[1:])

    def test_sub_ohmic_zero_frequency_divergence(self, grid):
        model = OhmicFamily(coupling=1.0, cutoff=1.0, exponent=0.0, temperature=0.1)
        with pytest.raises(ConfigurationError):
            dephasing_trace(model, grid)

    def test_jc_density_rejected(self, grid):
        with pytest.raises(ConfigurationError):
            dephasing_trace(Lorentzian(gamma0=1.0, width=1.0), grid)


class TestQuadratureConvergence:
    """Test the panel quadrature against its own tolerance"""

    @pytest.mark.parametrize(
        "exponent,temperature",
        [(3.0, 0.0), (1.0, 0.5)],
    )
    def test_tighter_tolerance_agrees(self, exponent, temperature):
        """Tightening the panel tolerance tenfold moves the exponent by < 1e-8"""
        model = OhmicFamily(
            coupling=1.0, cutoff=1.0, exponent=exponent, temperature=temperature
        )
        grid = TimeGrid(t_max=10.0, dt=0.1)
        loose = dephasing_trace(model, grid, epsrel=1e-9)
        tight = dephasing_trace(model, grid, epsrel=1e-10)
        assert np.max(np.abs(loose.big_gamma_p - tight.big_gamma_p)) < 1e-8
        assert np.max(np.abs(loose.gamma_p - tight.gamma_p)) < 1e-8

    def test_failed_panel_raises(self, monkeypatch):
        def failing_quad(func, lo, hi, **kwargs):
            return 0.5, 1e-3, {}, "roundoff error detected"

        monkeypatch.setattr("nmq.dephasing.quad", failing_quad)
        model = OhmicFamily(coupling=1.0, cutoff=1.0, exponent=3.0)
        with pytest.raises(QuadratureError, match="did not converge"):
            dephasing_trace(model, TimeGrid(t_max=1.0, dt=0.5))


class TestTabulated:
    """Test tabulated spectral densities"""

    def test_non_decaying_table(self, grid):
        model = Tabulated.from_arrays([0.0, 1.0, 2.0], [1.0, 1.0, 1.0])
        with pytest.raises(ConfigurationError):
            dephasing_trace(model, grid)

    def test_explicit_cutoff(self):
        """A flat table up to omega_max matches direct quadrature"""
        model = Tabulated.from_arrays([0.0, 1.0, 2.0], [1.0, 1.0, 1.0], omega_max=2.0)
        trace = dephasing_trace(model, TimeGrid(t_max=2.0, dt=0.5))
        for t, value in zip(trace.times[1:], trace.big_gamma_p[1:]):
            expected, _ = quad(lambda w: (1 - math.cos(w * t)) / (w * w), 0.0, 2.0, epsabs=1e-13)
            assert value == pytest.approx(-expected, abs=1e-8)

    def test_decaying_table(self):
        model = Tabulated.from_arrays([0.0, 1.0, 3.0], [0.0, 1.0, 0.0])
        trace = dephasing_trace(model, TimeGrid(t_max=1.0, dt=0.25))
        assert np.all(trace.big_gamma_p[1:] < 0)


class TestJointState:
    """Test the dephased system-ancilla state"""

    def test_concurrence_is_coherence(self, super_ohmic):
        for k in (0, 50, 100, 200):
            state = dephasing_joint_state(super_ohmic, k)
            assert concurrence_x(state) == pytest.approx(math.exp(super_ohmic.big_gamma_p[k]))

    def test_out_of_range(self, super_ohmic):
        with pytest.raises(IndexError):
            dephasing_joint_state(super_ohmic, -1)


class TestMasterEquation:
    """Test RK4 propagation against the exact coherence decay"""

    def test_coherence_follows_exponent(self, super_ohmic):
        rho0 = pure_state(math.pi / 2, 0.3)
        traj = dephasing_propagate_master(super_ohmic, rho0)
        assert not traj.truncated
        assert len(traj) == super_ohmic.grid.count
        assert np.allclose(traj.populations(), rho0.rho11)
        expected = rho0.rho10 * np.exp(super_ohmic.big_gamma_p)
        assert np.max(np.abs(traj.coherences() - expected)) < 1e-5
