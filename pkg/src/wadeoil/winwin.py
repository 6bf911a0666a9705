"""Time-varying win-win reference price.

The reference price evolves as dP0/dt = f(i(t)) - mu * P0(t), where i is
the investment per barrel. The identity P0 = i + pr is not imposed; it is
reported as a residual series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics import rk4_affine
from .errors import ValidationError
from .model import Series, TimeGrid, require_on_grid, require_same_grid


def linear(kappa: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    return lambda i: kappa * np.asarray(i, dtype=float)


def saturating(F: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    def f(i):
        i = np.asarray(i, dtype=float)
        return F * i / (1.0 + i)

    return f


def constant(c: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    return lambda i: np.full(np.shape(i), float(c))


INVESTMENT_RESPONSES = {
    "linear": linear,
    "saturating": saturating,
    "constant": constant,
}


def make_response(name: str, value: float) -> Callable:
    """Named investment response; ``value`` is kappa, F or c respectively."""
    try:
        factory = INVESTMENT_RESPONSES[name]
    except KeyError:
        raise ValidationError(
            f"unknown response {name!r}; choose from {sorted(INVESTMENT_RESPONSES)}"
        ) from None
    return factory(value)


@dataclass(frozen=True)
class WinWinParams:
    mu: float
    pr: float
    i: Series
    f: Callable = field(default_factory=linear)

    def __post_init__(self):
        if not (math.isfinite(self.mu) and 0.0 <= self.mu < 1.0):
            raise ValidationError(f"mu must lie in [0, 1), got {self.mu}")
        if not (math.isfinite(self.pr) and self.pr >= 0):
            raise ValidationError(f"pr must be non-negative, got {self.pr}")


def evolve_winwin_price(ww: WinWinParams, p0_init: float, grid: TimeGrid) -> Series:
    require_on_grid(ww.i, grid, "investment i")
    if not math.isfinite(p0_init):
        raise ValidationError(f"p0_init must be finite, got {p0_init!r}")
    i = ww.i.values
    # f is applied to the interpolated investment, not interpolated itself
    g_nodes = np.asarray(ww.f(i), dtype=float)
    g_mid = np.asarray(ww.f(0.5 * (i[:-1] + i[1:])), dtype=float)
    if g_nodes.shape != i.shape or not np.all(np.isfinite(g_nodes)) or not np.all(np.isfinite(g_mid)):
        raise ValidationError("investment response must return finite values of matching shape")
    P0 = rk4_affine(g_nodes, np.full(grid.n_nodes, -ww.mu), float(p0_init), grid.h, g_mid=g_mid)
    return Series(grid, P0)


def winwin_consistency(P0: Series, ww: WinWinParams) -> Series:
    """Residual P0(t) - i(t) - pr."""
    require_same_grid(P0, ww.i)
    return Series(P0.grid, P0.values - ww.i.values - ww.pr)
