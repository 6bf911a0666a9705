import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wadeoil import (
    DemandSplit,
    GridMismatch,
    ModelParams,
    Series,
    ValidationError,
    make_grid,
    super_profit,
    total_demand,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
nonneg = st.floats(min_value=0, max_value=1e6, allow_nan=False)


class TestModelParams:
    def test_defaults(self):
        p = ModelParams()
        assert (p.alpha, p.m, p.c0, p.p0_base) == (0.2, 2, 0.2, 29.0)

    @pytest.mark.parametrize("kwargs", [
        {"alpha": -0.1}, {"alpha": 1.0}, {"m": 1}, {"m": 2.5}, {"p0_base": 0.0},
        {"c0": float("nan")}, {"m": True},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            ModelParams(**kwargs)


class TestGrid:
    def test_two_nodes(self):
        g = make_grid(0, 1, 1)
        assert list(g.nodes) == [0.0, 1.0]

    def test_unit_step(self):
        g = make_grid(0, 10, 10)
        assert g.h == 1.0
        assert g.n_nodes == 11

    def test_yearly(self):
        g = make_grid(1980, 2021, 41)
        assert list(g.nodes) == [float(y) for y in range(1980, 2022)]

    @pytest.mark.parametrize("args", [(1, 1, 3), (2, 1, 3), (0, 1, 0), (0, 1, -2)])
    def test_degenerate(self, args):
        with pytest.raises(ValidationError):
            make_grid(*args)

    def test_nodes_read_only(self):
        with pytest.raises(ValueError):
            make_grid(0, 1, 2).nodes[0] = 5.0


class TestSeries:
    def test_length_checked(self, grid10):
        with pytest.raises(ValidationError):
            Series(grid10, np.zeros(10))

    def test_finite_checked(self, grid10):
        vals = np.zeros(11)
        vals[3] = np.inf
        with pytest.raises(ValidationError):
            Series(grid10, vals)

    def test_immutable(self, grid10):
        src = np.ones(11)
        s = Series(grid10, src)
        src[0] = 99.0
        assert s.values[0] == 1.0
        with pytest.raises(ValueError):
            s.values[0] = 2.0

    def test_interp(self, grid10):
        s = Series(grid10, np.arange(11.0))
        assert s.at(2.5) == 2.5


class TestSuperProfit:
    @pytest.mark.parametrize("p, q, p0, expected", [
        (29, 1000, 29, 0.0),
        (39, 1, 29, 10.0),
        (14, 2, 29, -30.0),
    ])
    def test_examples(self, p, q, p0, expected):
        assert super_profit(p, q, p0) == expected

    def test_default_pivot_is_29(self):
        assert super_profit(30, 1) == 1.0

    def test_rejects_nonfinite_and_negative_q(self):
        with pytest.raises(ValidationError):
            super_profit(float("nan"), 1)
        with pytest.raises(ValidationError):
            super_profit(30, -1)

    def test_series_pivot(self, grid10):
        p0 = Series(grid10, np.linspace(20, 40, 11))
        s = super_profit(p0, Series.constant(grid10, 3.0), p0)
        assert isinstance(s, Series)
        assert np.all(s.values == 0)

    @given(q=nonneg, p0=st.floats(min_value=1, max_value=1e3))
    def test_zero_at_pivot(self, q, p0):
        assert super_profit(p0, q, p0) == 0

    @given(p=finite, q=st.floats(min_value=0, max_value=1e3), lam=st.floats(min_value=0, max_value=1e3))
    def test_linear_in_quantity(self, p, q, lam):
        assert math.isclose(super_profit(p, lam * q), lam * super_profit(p, q), rel_tol=1e-12, abs_tol=1e-6)

    @given(d=st.floats(min_value=-1e3, max_value=1e3), q=nonneg)
    def test_antisymmetric_about_pivot(self, d, q):
        # 29 + d and 29 - d are both exact when d is a small binary fraction
        d = round(d * 64) / 64
        assert super_profit(29 + d, q) == -super_profit(29 - d, q)


class TestTotalDemand:
    def test_examples(self):
        g = make_grid(0, 1, 1)
        assert np.all(total_demand(DemandSplit(Series.constant(g, 0), Series.constant(g, 3))).values == 3)
        assert np.all(total_demand(DemandSplit(Series.constant(g, 2), Series.constant(g, 0))).values == 2)
        v = total_demand(DemandSplit(Series(g, [1, 2]), Series(g, [3, 4])))
        assert list(v.values) == [4, 6]

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            DemandSplit(Series.constant(make_grid(0, 1, 1), 1), Series.constant(make_grid(0, 2, 1), 1))

    @given(st.lists(st.floats(min_value=0, max_value=1e9), min_size=6, max_size=6),
           st.lists(st.floats(min_value=0, max_value=1e9), min_size=6, max_size=6))
    def test_commutative(self, a, w):
        g = make_grid(0, 5, 5)
        v1 = total_demand(DemandSplit(Series(g, a), Series(g, w)))
        v2 = total_demand(DemandSplit(Series(g, w), Series(g, a)))
        assert v1 == v2
        assert len(v1) == g.n_nodes
