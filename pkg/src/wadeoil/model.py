"""Core domain types and the super-profit identity.

Everything here is an immutable value. Series values are stored as
read-only numpy arrays so that sharing them between threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Integral, Real
from typing import Union

import numpy as np

from .errors import GridMismatch, ValidationError

WIN_WIN_PRICE = 29.0


def _finite(x, name):
    if not isinstance(x, Real) or not math.isfinite(x):
        raise ValidationError(f"{name} must be a finite real number, got {x!r}")


@dataclass(frozen=True)
class ModelParams:
    """Constants of the optimal demand problem.

    Attributes:
        alpha: Reserve growth rate per year, in [0, 1).
        m: Integer exponent of the running cost S**m, at least 2.
        c0: Scale of the costate, lambda(t_start) = c0.
        p0_base: Win-win reference price in USD/barrel.
    """

    alpha: float = 0.2
    m: int = 2
    c0: float = 0.2
    p0_base: float = WIN_WIN_PRICE

    def __post_init__(self):
        _finite(self.alpha, "alpha")
        _finite(self.c0, "c0")
        _finite(self.p0_base, "p0_base")
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in [0, 1), got {self.alpha}")
        if isinstance(self.m, bool) or not isinstance(self.m, Integral):
            raise ValidationError(f"m must be an integer, got {self.m!r}")
        if self.m < 2:
            raise ValidationError(f"m must be >= 2, got {self.m}")
        if self.p0_base <= 0:
            raise ValidationError(f"p0_base must be positive, got {self.p0_base}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with ``n_steps + 1`` nodes on [t_start, t_end]."""

    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        _finite(self.t_start, "t_start")
        _finite(self.t_end, "t_end")
        if isinstance(self.n_steps, bool) or not isinstance(self.n_steps, Integral):
            raise ValidationError(f"n_steps must be an integer, got {self.n_steps!r}")
        if self.n_steps < 1:
            raise ValidationError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.t_end > self.t_start:
            raise ValidationError(
                f"degenerate interval [{self.t_start}, {self.t_end}]"
            )

    @property
    def h(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    @property
    def span(self) -> float:
        return self.t_end - self.t_start

    @property
    def nodes(self) -> np.ndarray:
        t = self.t_start + np.arange(self.n_nodes) * self.h
        # pin the last node so t_end is hit exactly
        t[-1] = self.t_end
        t.flags.writeable = False
        return t


def make_grid(t_start: float, t_end: float, n_steps: int) -> TimeGrid:
    return TimeGrid(float(t_start), float(t_end), n_steps)


@dataclass(frozen=True, eq=False)
class Series:
    """Values sampled on every node of a grid."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n_nodes:
            raise ValidationError(
                f"series needs {self.grid.n_nodes} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("series values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, grid: TimeGrid, value: float) -> "Series":
        return cls(grid, np.full(grid.n_nodes, float(value)))

    @classmethod
    def from_function(cls, grid: TimeGrid, fn) -> "Series":
        return cls(grid, np.array([fn(t) for t in grid.nodes], dtype=float))

    def __len__(self):
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def at(self, t):
        """Linear interpolation between nodes."""
        return np.interp(t, self.grid.nodes, self.values)


PriceLike = Union[float, Series]


def require_same_grid(*series: Series) -> TimeGrid:
    grid = series[0].grid
    for s in series[1:]:
        if s.grid != grid:
            raise GridMismatch(f"grid mismatch: {grid} vs {s.grid}")
    return grid


def require_on_grid(series: Series, grid: TimeGrid, name: str = "series"):
    if series.grid != grid:
        raise GridMismatch(f"{name} is sampled on {series.grid}, expected {grid}")


@dataclass(frozen=True)
class DemandSplit:
    """World demand split into the non-producer part ``a`` and the rest ``w``."""

    a: Series
    w: Series

    def __post_init__(self):
        require_same_grid(self.a, self.w)


def total_demand(split: DemandSplit) -> Series:
    return Series(split.a.grid, split.a.values + split.w.values)


def super_profit(p, q, p0=WIN_WIN_PRICE):
    """Super profit (p - p0) * q.

    Works on scalars or numpy arrays (and on ``Series`` for any argument,
    which must then share a grid). A price below ``p0`` gives a negative
    value, i.e. the super cost is reversed.
    """
    grids = [x.grid for x in (p, q, p0) if isinstance(x, Series)]
    if grids:
        require_same_grid(*[x for x in (p, q, p0) if isinstance(x, Series)])
    pv, qv, p0v = (
        np.asarray(x.values if isinstance(x, Series) else x, dtype=float)
        for x in (p, q, p0)
    )
    if not (np.all(np.isfinite(pv)) and np.all(np.isfinite(qv)) and np.all(np.isfinite(p0v))):
        raise ValidationError("super_profit inputs must be finite")
    if np.any(qv < 0):
        raise ValidationError("quantity must be non-negative")
    s = (pv - p0v) * qv
    if grids:
        return Series(grids[0], np.broadcast_to(s, (grids[0].n_nodes,)))
    if s.ndim == 0:
        return float(s)
    return s


def pivot_values(p0: PriceLike, grid: TimeGrid) -> np.ndarray:
    """Reference price on every node of ``grid``."""
    if isinstance(p0, Series):
        require_on_grid(p0, grid, "reference price")
        return p0.values
    _finite(p0, "p0")
    return np.full(grid.n_nodes, float(p0))
