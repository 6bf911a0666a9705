"""Optimal non-producer demand under the super-profit cost.

The control problem minimises the integral of S(t)**m subject to the
reserves equation, with S = (p - p0) * a. The Hamiltonian is

    H = S**m + lambda * (-(a + w) + alpha * R)

and stationarity in ``a`` gives m * S**(m-1) * (p - p0) = lambda, hence

    S* = (lambda / (m (p - p0)))**(1/(m-1)),    a* = S* / (p - p0).

The costate obeys -dlambda/dt = alpha*lambda, so lambda = c0*exp(-alpha t).
For m = 2 this reduces to a* = c0 exp(-alpha t) / (2 (p - p0)**2).

Every closed form divides by (p - p0), so prices within ``epsilon_band``
of the pivot are rejected (or clipped to the band edge on request).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import integrate_costate, integrate_reserves
from .errors import GridMismatch, NonRealRoot, SingularPrice, ValidationError
from .model import (
    ModelParams,
    PriceLike,
    Series,
    TimeGrid,
    pivot_values,
    require_same_grid,
)

DEFAULT_EPSILON_BAND = 0.5


@dataclass(frozen=True)
class PriceContext:
    """Exogenous price and rest-of-world demand for one solve.

    ``p0`` overrides ``ModelParams.p0_base`` and may be a time series.
    With ``clip`` set, prices inside the band are moved to its edge
    instead of raising ``SingularPrice``.
    """

    p: Series
    w: Series
    epsilon_band: float = DEFAULT_EPSILON_BAND
    clip: bool = False
    p0: Optional[PriceLike] = None

    def __post_init__(self):
        require_same_grid(self.p, self.w)
        if not (math.isfinite(self.epsilon_band) and self.epsilon_band > 0):
            raise ValidationError(f"epsilon_band must be positive, got {self.epsilon_band}")

    @property
    def grid(self) -> TimeGrid:
        return self.p.grid

    def pivot(self, params: ModelParams) -> np.ndarray:
        return pivot_values(params.p0_base if self.p0 is None else self.p0, self.grid)


@dataclass(frozen=True)
class Trajectory:
    """Joint paths of one solve, all on ``grid``.

    ``p`` is the price actually used (after clipping), ``pivot`` the
    reference price per node.
    """

    grid: TimeGrid
    p: Series
    pivot: Series
    w: Series
    R: Series
    lam: Series
    a_star: Series
    S: Series
    H: Series

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def v(self) -> np.ndarray:
        return self.a_star.values + self.w.values


def _real_root(x, n: int):
    x = np.asarray(x, dtype=float)
    if n == 1:
        return x
    if n % 2 == 0:
        if np.any(x < 0):
            raise NonRealRoot(f"even root (order {n}) of a negative number")
        return np.sqrt(x) if n == 2 else x ** (1.0 / n)
    if n == 3:
        return np.cbrt(x)
    return np.sign(x) * np.abs(x) ** (1.0 / n)


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def check_band(p, p0, epsilon_band: float, t=None):
    """Raise SingularPrice for the first price within the band around p0."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    p0 = np.broadcast_to(np.asarray(p0, dtype=float), p.shape)
    bad = np.flatnonzero(np.abs(p - p0) < epsilon_band)
    if bad.size:
        i = int(bad[0])
        index = i if p.size > 1 else None
        ti = None if t is None else float(np.atleast_1d(t)[i])
        raise SingularPrice(float(p[i]), float(p0[i]), epsilon_band, index=index, t=ti)


def clip_price(p, p0, epsilon_band: float):
    """Move prices inside the band to p0 +/- epsilon_band (upper edge at p == p0)."""
    p = np.asarray(p, dtype=float)
    gap = p - p0
    edge = np.where(gap < 0, p0 - epsilon_band, p0 + epsilon_band)
    return np.where(np.abs(gap) < epsilon_band, edge, p)


def hamiltonian(R, a, lam, p, w, params: ModelParams, p0=None):
    """H = ((p - p0) a)**m + lam * (-(a + w) + alpha R)."""
    p0 = params.p0_base if p0 is None else p0
    args = [np.asarray(x, dtype=float) for x in (R, a, lam, p, w, p0)]
    if not all(np.all(np.isfinite(x)) for x in args):
        raise ValidationError("hamiltonian inputs must be finite")
    R, a, lam, p, w, p0 = args
    S = (p - p0) * a
    return _unwrap(S ** params.m + lam * (-(a + w) + params.alpha * R))


def dH_da(a, lam, p, params: ModelParams, p0=None):
    """Exact derivative m * S**(m-1) * (p - p0) - lam."""
    p0 = params.p0_base if p0 is None else p0
    a, lam, p, p0 = (np.asarray(x, dtype=float) for x in (a, lam, p, p0))
    gap = p - p0
    return _unwrap(params.m * (gap * a) ** (params.m - 1) * gap - lam)


def dH_da_fd(R, a, lam, p, w, params: ModelParams, p0=None, step=None):
    """Centred finite-difference estimate of dH/da."""
    a = np.asarray(a, dtype=float)
    if step is None:
        step = 1e-5 * np.maximum(1.0, np.abs(a))
    hi = hamiltonian(R, a + step, lam, p, w, params, p0)
    lo = hamiltonian(R, a - step, lam, p, w, params, p0)
    return _unwrap((np.asarray(hi) - np.asarray(lo)) / (2.0 * step))


def optimal_superprofit(lam, p, params: ModelParams, epsilon_band=DEFAULT_EPSILON_BAND, p0=None):
    """Stationary super profit S* = (lam / (m (p - p0)))**(1/(m-1)).

    For odd m - 1 a negative radicand yields the signed real root; for
    even m - 1 it raises NonRealRoot.
    """
    p0 = params.p0_base if p0 is None else p0
    check_band(p, p0, epsilon_band)
    lam, p, p0 = (np.asarray(x, dtype=float) for x in (lam, p, p0))
    return _unwrap(_stationary_superprofit(lam, p - p0, params.m))


def _stationary_superprofit(lam, gap, m):
    return _real_root(lam / (m * gap), m - 1)


def optimal_demand(t, p, params: ModelParams, epsilon_band=DEFAULT_EPSILON_BAND, origin=0.0, p0=None):
    """Optimal non-producer demand a*(t) = S*(t) / (p - p0).

    Time is measured from ``origin``: lambda(t) = c0*exp(-alpha*(t - origin)).
    """
    p0 = params.p0_base if p0 is None else p0
    check_band(p, p0, epsilon_band, t=t if np.ndim(t) else None)
    t, p, p0 = (np.asarray(x, dtype=float) for x in (t, p, p0))
    lam = params.c0 * np.exp(-params.alpha * (t - origin))
    S = optimal_superprofit(lam, p, params, epsilon_band, p0)
    return _unwrap(np.asarray(S) / (p - p0))


def calibrate_c0(a_obs, p_at_t0, t0, params: ModelParams, epsilon_band=DEFAULT_EPSILON_BAND, origin=0.0, p0=None):
    """c0 making the m = 2 optimal demand equal ``a_obs`` at ``t0``."""
    if params.m != 2:
        raise ValidationError("c0 calibration is defined for m = 2 only")
    if not (math.isfinite(a_obs) and a_obs > 0):
        raise ValidationError(f"observed demand must be positive, got {a_obs!r}")
    p0 = params.p0_base if p0 is None else p0
    check_band(p_at_t0, p0, epsilon_band)
    return 2.0 * a_obs * (p_at_t0 - p0) ** 2 * math.exp(params.alpha * (t0 - origin))


def effective_price(ctx: PriceContext, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(price, pivot) node arrays with the context's band policy applied."""
    p0 = ctx.pivot(params)
    p = ctx.p.values
    if ctx.clip:
        p = clip_price(p, p0, ctx.epsilon_band)
    else:
        check_band(p, p0, ctx.epsilon_band, t=ctx.grid.nodes)
    return p, p0


def control_law(params: ModelParams, ctx: PriceContext):
    """State-independent part of a solve: (p, p0, lambda, a*, S*) node arrays."""
    p, p0 = effective_price(ctx, params)
    lam = integrate_costate(params, ctx.grid).values
    # band already enforced (or clipped) above
    S = _stationary_superprofit(lam, p - p0, params.m)
    a = S / (p - p0)
    return p, p0, lam, a, S


def assemble(params: ModelParams, ctx: PriceContext, R: Series, law) -> Trajectory:
    p, p0, lam, a, S = law
    grid = ctx.grid
    H = hamiltonian(R.values, a, lam, p, ctx.w.values, params, p0)
    return Trajectory(
        grid=grid,
        p=Series(grid, p),
        pivot=Series(grid, p0),
        w=ctx.w,
        R=R,
        lam=Series(grid, lam),
        a_star=Series(grid, a),
        S=Series(grid, S),
        H=Series(grid, H),
    )


def solve_pmp(params: ModelParams, ctx: PriceContext, Q: float, grid: Optional[TimeGrid] = None) -> Trajectory:
    """Costate, optimal demand and super profit, then the reserves they imply."""
    if grid is not None and grid != ctx.grid:
        raise GridMismatch(f"price context is on {ctx.grid}, expected {grid}")
    law = control_law(params, ctx)
    v = Series(ctx.grid, law[3] + ctx.w.values)
    R = integrate_reserves(params, v, Q, ctx.grid).R
    return assemble(params, ctx, R, law)


def stationarity_residual(traj: Trajectory, ctx: PriceContext, params: ModelParams, method: str = "exact") -> float:
    """Max over nodes of |dH/da| along the trajectory.

    S is recomputed from the stored demand, so a perturbed ``a_star``
    shows up in the residual. ``method="fd"`` uses the finite-difference
    derivative instead of the exact one.
    """
    p, p0 = effective_price(ctx, params)
    a = traj.a_star.values
    lam = traj.lam.values
    if method == "exact":
        r = dH_da(a, lam, p, params, p0)
    elif method == "fd":
        r = dH_da_fd(traj.R.values, a, lam, p, ctx.w.values, params, p0)
    else:
        raise ValidationError(f"unknown residual method {method!r}")
    return float(np.max(np.abs(r)))


def trapezoid(y, h: float) -> float:
    y = np.asarray(y, dtype=float)
    return float(h * (0.5 * y[0] + y[1:-1].sum() + 0.5 * y[-1]))


def objective(traj: Trajectory, params: ModelParams) -> float:
    """Trapezoid estimate of the integral of S**m over the grid."""
    return trapezoid(traj.S.values ** params.m, traj.grid.h)
