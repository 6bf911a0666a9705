"""Families of solves over varied initial stocks or terminal reserves.

Start values follow the affine rule

    value(k) = lo + (k / (t0 + h)) * (hi - lo)      (paper-exact indexing)
    value(k) = lo + (k / K) * (hi - lo)             (normalized indexing)

With paper-exact indexing k = t0 does not map to ``lo``; only k = 0 does.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from numbers import Integral
from typing import Optional

import numpy as np

from .dynamics import CONSISTENT, ReversedState, integrate_reversed
from .errors import GridMismatch, ValidationError, WadeError
from .model import ModelParams, Series, TimeGrid
from .pontryagin import (
    PriceContext,
    Trajectory,
    assemble,
    control_law,
    objective,
    solve_pmp,
    trapezoid,
)

INITIAL = "initial"
TERMINAL = "terminal"
PAPER_EXACT = "paper-exact"
NORMALIZED = "normalized"


@dataclass(frozen=True)
class SweepSpec:
    t0: float
    h: float
    lo: float
    hi: float
    k_values: tuple
    mode: str = INITIAL
    indexing: str = PAPER_EXACT
    k_max: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(self.k_values))
        for name in ("t0", "h", "lo", "hi"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if not self.h > 0:
            raise ValidationError(f"horizon h must be positive, got {self.h}")
        if not self.k_values:
            raise ValidationError("k_values must not be empty")
        if self.mode not in (INITIAL, TERMINAL):
            raise ValidationError(f"unknown sweep mode {self.mode!r}")
        if self.indexing not in (PAPER_EXACT, NORMALIZED):
            raise ValidationError(f"unknown indexing {self.indexing!r}")
        if self.indexing == PAPER_EXACT:
            if not self.t0 + self.h > 0:
                raise ValidationError("t0 + h must be positive for paper-exact indexing")
        elif self.k_max is None or self.k_max < 1:
            raise ValidationError("normalized indexing needs k_max >= 1")
        for k in self.k_values:
            if isinstance(k, bool) or not isinstance(k, Integral):
                raise ValidationError(f"k must be an integer, got {k!r}")
            self.check_k(k)

    @property
    def denominator(self) -> float:
        return self.t0 + self.h if self.indexing == PAPER_EXACT else float(self.k_max)

    def check_k(self, k):
        if not 0 <= k <= self.denominator:
            raise ValidationError(
                f"k={k} outside [0, {self.denominator:g}] for {self.indexing} indexing"
            )


def qk(k: int, spec: SweepSpec) -> float:
    spec.check_k(k)
    weight = k / spec.denominator
    if weight == 1.0:
        # lo + (hi - lo) can miss hi by an ulp
        return spec.hi
    return spec.lo + weight * (spec.hi - spec.lo)


@dataclass(frozen=True)
class SweepEntry:
    k: int
    start_value: float
    trajectory: Trajectory
    objective: float
    reversed: Optional[ReversedState] = None


@dataclass(frozen=True)
class SweepResult:
    mode: str
    entries: tuple

    def __len__(self):
        return len(self.entries)


def _sweep_grid(ctx: PriceContext, grid: Optional[TimeGrid]) -> TimeGrid:
    if grid is not None and grid != ctx.grid:
        raise GridMismatch(f"price context is on {ctx.grid}, sweep requested {grid}")
    return ctx.grid


def _run(fn, ks, workers):
    if workers <= 1:
        return [fn(k) for k in ks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, ks))


def _annotated(fn):
    def wrapper(k):
        try:
            return fn(k)
        except WadeError as exc:
            exc.sweep_k = k
            if exc.args:
                exc.args = (f"k={k}: {exc.args[0]}",) + exc.args[1:]
            raise

    return wrapper


def run_initial_sweep(
    spec: SweepSpec,
    params: ModelParams,
    ctx: PriceContext,
    grid: Optional[TimeGrid] = None,
    workers: int = 1,
) -> SweepResult:
    """One forward solve per k with initial stock qk(k); entries sorted by k."""
    if spec.mode != INITIAL:
        raise ValidationError("run_initial_sweep needs mode='initial'")
    grid = _sweep_grid(ctx, grid)

    @_annotated
    def one(k):
        q = qk(k, spec)
        traj = solve_pmp(params, ctx, q, grid)
        return SweepEntry(k, q, traj, objective(traj, params))

    ks = sorted(spec.k_values)
    return SweepResult(INITIAL, tuple(_run(one, ks, workers)))


def reversed_objective(traj: Trajectory, params: ModelParams) -> float:
    """Trapezoid integral over s in [0, T] of S(T - s)**m."""
    return trapezoid(traj.S.values[::-1] ** params.m, traj.grid.h)


def run_terminal_sweep(
    spec: SweepSpec,
    params: ModelParams,
    ctx: PriceContext,
    grid: Optional[TimeGrid] = None,
    workers: int = 1,
    convention: str = CONSISTENT,
) -> SweepResult:
    """Integrate the reserves backwards from R_T = qk(k) under the optimal demand.

    Each entry's trajectory carries the reserves mapped back to forward
    time; the reversed-time state is kept in ``entry.reversed``.
    """
    if spec.mode != TERMINAL:
        raise ValidationError("run_terminal_sweep needs mode='terminal'")
    grid = _sweep_grid(ctx, grid)
    law = control_law(params, ctx)
    v = Series(grid, law[3] + ctx.w.values)

    @_annotated
    def one(k):
        r_t = qk(k, spec)
        rev = integrate_reversed(params, v, r_t, grid, convention=convention)
        traj = assemble(params, ctx, rev.as_forward(grid), law)
        return SweepEntry(k, r_t, traj, reversed_objective(traj, params), rev)

    ks = sorted(spec.k_values)
    return SweepResult(TERMINAL, tuple(_run(one, ks, workers)))


def reversal_roundtrip_error(params: ModelParams, ctx: PriceContext, Q: float) -> float:
    """Max relative gap between a forward solve and its reversal from R(T)."""
    fwd = solve_pmp(params, ctx, Q)
    v = Series(ctx.grid, fwd.v)
    rev = integrate_reversed(params, v, float(fwd.R.values[-1]), ctx.grid)
    target = fwd.R.values[::-1]
    scale = np.maximum(np.abs(target), 1e-300)
    return float(np.max(np.abs(rev.Y.values - target) / scale))
