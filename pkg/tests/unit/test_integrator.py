"""Unit tests for the adaptive Dormand-Prince integrator."""

import cmath
import math

import numpy as np
import pytest

from theta_quant.errors import StepUnderflow
from theta_quant.integrator import DP_A, DP_B, DP_B_HAT, DP_C, dopri_step, integrate


def exponential(t, y):
    return y


class TestTableau:
    """Consistency of the Butcher tableau."""

    def test_weights_sum_to_one(self):
        assert abs(DP_B.sum() - 1) < 1e-15
        assert abs(DP_B_HAT.sum() - 1) < 1e-15

    def test_nodes_are_row_sums(self):
        for c, row in zip(DP_C, DP_A):
            assert abs(sum(row) - c) < 1e-14

    def test_single_step_of_exponential(self):
        """One step of size h matches exp(h) to fifth order."""
        y, err = dopri_step(exponential, 0.0, np.array([1.0 + 0j]), 0.1)
        assert abs(y[0] - math.exp(0.1)) < 1e-8
        assert abs(err[0]) < 1e-6


class TestIntegrate:
    """Tests for integrate()."""

    def test_real_exponential(self):
        run = integrate(exponential, [1.0], 0.0, 1.0, tol=1e-12)
        assert abs(run.final_state[0] - math.e) < 1e-10
        assert run.final_time == 1.0
        assert isinstance(run.final_time, float)

    def test_complex_time(self):
        """Integrating y' = y along [0, i] gives e^i."""
        run = integrate(exponential, [1.0], 0.0, 1j, tol=1e-12)
        assert abs(run.final_state[0] - cmath.exp(1j)) < 1e-10
        assert run.final_time == 1j

    def test_backwards_in_time(self):
        run = integrate(exponential, [1.0], 1.0, 0.0, tol=1e-12)
        assert abs(run.final_state[0] - math.exp(-1)) < 1e-10

    def test_t_eval_is_hit_exactly(self):
        """Requested output times appear verbatim in the trajectory."""
        t_eval = [0.0, 0.25, 0.5, 0.8, 1.0]
        run = integrate(exponential, [1.0], 0.0, 1.0, tol=1e-11, t_eval=t_eval)
        assert list(run.times) == t_eval
        assert np.allclose(run.states[:, 0], np.exp(t_eval), rtol=1e-9, atol=0)

    def test_t_eval_without_start(self):
        run = integrate(exponential, [1.0], 0.0, 1.0, t_eval=[0.5, 1.0])
        assert list(run.times) == [0.5, 1.0]

    @pytest.mark.parametrize("t_eval", [[0.5, 1.5], [-0.25, 0.5], [0.5 + 0.1j]])
    def test_t_eval_off_segment(self, t_eval):
        with pytest.raises(ValueError):
            integrate(exponential, [1.0], 0.0, 1.0, t_eval=t_eval)

    def test_t_eval_on_complex_segment(self):
        run = integrate(exponential, [1.0], 0.0, 1j, tol=1e-12, t_eval=[0.5j, 1j])
        assert list(run.times) == [0.5j, 1j]

    def test_statistics(self):
        """Every accepted step leaves an error estimate below tol."""
        run = integrate(exponential, [1.0], 0.0, 2.0, tol=1e-9, labels=('y',))
        assert run.labels == ('y',)
        assert run.accepted_steps == len(run.error_estimates) > 0
        assert max(run.error_estimates) <= 1e-9 * math.exp(2.0)
        assert len(run) == run.accepted_steps + 1
        assert run.tolerance == 1e-9

    def test_fifth_order_convergence(self):
        """Halving a fixed step divides the global error by about 2^5."""
        def error(h):
            run = integrate(exponential, [1.0], 0.0, 1.0, fixed_step=h)
            return abs(run.final_state[0] - math.e)

        ratio = error(0.1) / error(0.05)
        assert 20 < ratio < 45

    def test_step_underflow_at_pole(self):
        """y' = y^2 with y(0) = 1 blows up at t = 1."""
        with pytest.raises(StepUnderflow):
            integrate(lambda t, y: y * y, [1.0], 0.0, 2.0, tol=1e-10, max_steps=20000)

    def test_step_limit(self):
        with pytest.raises(StepUnderflow):
            integrate(exponential, [1.0], 0.0, 1.0, fixed_step=1e-3, max_steps=10)

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(ValueError):
            integrate(exponential, [1.0], 0.0, 1.0, tol=0)
