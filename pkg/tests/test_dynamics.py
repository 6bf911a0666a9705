import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wadeoil import GridMismatch, ModelParams, Series, ValidationError, make_grid
from wadeoil.dynamics import (
    SAME_SIGN,
    integrate_costate,
    integrate_reserves,
    integrate_reversed,
)


def exact_reserves(alpha, v, Q, t):
    # closed form of dR/dt = -v + alpha R, R(0) = Q
    t = np.asarray(t, dtype=float)
    if alpha == 0:
        return Q - v * t
    return (Q - v / alpha) * np.exp(alpha * t) + v / alpha


class TestReserves:
    def test_no_dynamics(self, grid10):
        st_ = integrate_reserves(ModelParams(alpha=0), Series.constant(grid10, 0), 5.0, grid10)
        assert np.all(st_.R.values == 5.0)

    def test_linear_depletion(self):
        g = make_grid(0, 3, 3)
        R = integrate_reserves(ModelParams(alpha=0), Series.constant(g, 1), 10.0, g).R
        assert R.values[-1] == pytest.approx(7.0, abs=1e-12)

    def test_exponential_growth(self):
        g = make_grid(0, 1, 10)
        R = integrate_reserves(ModelParams(alpha=0.2), Series.constant(g, 0), 1.0, g).R
        assert R.values[-1] == pytest.approx(math.exp(0.2), rel=1e-9)
        assert R.values[-1] == pytest.approx(1.221402, abs=1e-6)

    def test_first_node_is_Q(self, grid10):
        R = integrate_reserves(ModelParams(alpha=0.3), Series.constant(grid10, 2.5), 7.25, grid10).R
        assert R.values[0] == 7.25

    def test_constant_coefficient_oracle(self):
        g = make_grid(0, 20, 200)
        R = integrate_reserves(ModelParams(alpha=0.2), Series.constant(g, 3.0), 100.0, g).R
        ex = exact_reserves(0.2, 3.0, 100.0, g.nodes)
        assert np.max(np.abs(R.values - ex) / np.abs(ex)) < 1e-6

    def test_fourth_order(self):
        params = ModelParams(alpha=0.2)
        errs = []
        for n in (100, 200, 400):
            g = make_grid(0, 20, n)
            R = integrate_reserves(params, Series.constant(g, 3.0), 100.0, g).R
            errs.append(np.max(np.abs(R.values - exact_reserves(0.2, 3.0, 100.0, g.nodes))))
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        assert all(o >= 3.8 for o in orders), orders

    def test_grid_mismatch(self, grid10):
        with pytest.raises(GridMismatch):
            integrate_reserves(ModelParams(), Series.constant(make_grid(0, 1, 1), 1), 1.0, grid10)

    def test_nonfinite_Q(self, grid10):
        with pytest.raises(ValidationError):
            integrate_reserves(ModelParams(), Series.constant(grid10, 1), float("inf"), grid10)

    def test_alpha_series(self):
        # alpha(t) = 0.1 t, v = 0: R = Q exp(0.05 t^2)
        g = make_grid(0, 2, 200)
        alpha = Series(g, 0.1 * g.nodes)
        R = integrate_reserves(ModelParams(alpha=0.0), Series.constant(g, 0), 2.0, g, alpha=alpha).R
        assert R.values[-1] == pytest.approx(2.0 * math.exp(0.05 * 4), rel=1e-9)


class TestCostate:
    def test_alpha_zero(self, grid10):
        lam = integrate_costate(ModelParams(alpha=0, c0=0.7), grid10)
        assert np.all(lam.values == 0.7)

    def test_starts_at_c0(self):
        g = make_grid(1980, 2021, 41)
        assert integrate_costate(ModelParams(alpha=0.3, c0=0.2), g).values[0] == 0.2

    def test_value_at_five(self):
        g = make_grid(0, 5, 5)
        lam = integrate_costate(ModelParams(alpha=0.2, c0=0.2), g)
        assert lam.values[-1] == pytest.approx(0.2 * math.exp(-1), rel=1e-15)
        assert lam.values[-1] == pytest.approx(0.0735759, abs=1e-7)

    def test_numeric_matches_closed(self):
        g = make_grid(0, 10, 1000)
        params = ModelParams(alpha=0.9, c0=1.3)
        num = integrate_costate(params, g, method="numeric").values
        closed = integrate_costate(params, g).values
        assert np.max(np.abs(num - closed) / closed) < 1e-8

    def test_closed_form_rejects_alpha_series(self, grid10):
        with pytest.raises(ValidationError):
            integrate_costate(ModelParams(), grid10, alpha=Series.constant(grid10, 0.1))

    @given(alpha=st.floats(min_value=1e-3, max_value=0.99), c0=st.floats(min_value=1e-6, max_value=1e6))
    def test_positive_and_decreasing(self, alpha, c0):
        g = make_grid(0, 10, 20)
        lam = integrate_costate(ModelParams(alpha=alpha, c0=c0), g).values
        assert np.all(lam > 0)
        assert np.all(np.diff(lam) < 0)


class TestReversed:
    def test_constant(self, grid10):
        st_ = integrate_reversed(ModelParams(alpha=0), Series.constant(grid10, 0), 4.0, grid10)
        assert np.all(st_.Y.values == 4.0)
        assert st_.Y.grid.t_start == 0.0

    def test_linear_consistent(self):
        # reserves two years earlier were higher by 2 under unit demand
        g = make_grid(0, 2, 2)
        Y = integrate_reversed(ModelParams(alpha=0), Series.constant(g, 1), 10.0, g).Y
        assert Y.values[-1] == pytest.approx(12.0, abs=1e-12)

    def test_linear_same_sign(self):
        g = make_grid(0, 2, 2)
        Y = integrate_reversed(ModelParams(alpha=0), Series.constant(g, 1), 10.0, g, convention=SAME_SIGN).Y
        assert Y.values[-1] == pytest.approx(8.0, abs=1e-12)

    def test_round_trip(self):
        g = make_grid(0, 5, 50)
        params = ModelParams(alpha=0.2)
        v = Series.constant(g, 1.0)
        R = integrate_reserves(params, v, 10.0, g).R
        Y = integrate_reversed(params, v, R.values[-1], g).Y
        assert Y.values[0] == R.values[-1]
        assert np.max(np.abs(Y.values - R.values[::-1]) / np.abs(R.values[::-1])) < 1e-6

    @settings(max_examples=30, deadline=None)
    @given(alpha=st.floats(min_value=0, max_value=0.5), T=st.floats(min_value=1, max_value=20))
    def test_round_trip_time_varying_demand(self, alpha, T):
        g = make_grid(0, T, 400)
        params = ModelParams(alpha=alpha)
        v = Series(g, 1.0 + 0.5 * np.sin(g.nodes))
        R = integrate_reserves(params, v, 50.0, g).R
        back = integrate_reversed(params, v, R.values[-1], g).as_forward(g)
        assert np.max(np.abs(back.values - R.values) / np.abs(R.values)) < 1e-6

    def test_unknown_convention(self, grid10):
        with pytest.raises(ValidationError):
            integrate_reversed(ModelParams(), Series.constant(grid10, 0), 1.0, grid10, convention="other")
