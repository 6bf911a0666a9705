"""Fixed-step RK4 integration of the reserves, reversed-reserves and costate equations.

Every equation in the model is scalar and affine in the state,

    y'(t) = g(t) + c(t) * y(t),

with g and c known on the grid nodes. Mid-step values are taken by linear
interpolation between neighbouring nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .model import ModelParams, Series, TimeGrid, make_grid, require_on_grid

CONSISTENT = "consistent"
SAME_SIGN = "same-sign"
REVERSAL_CONVENTIONS = (CONSISTENT, SAME_SIGN)


def rk4_affine(g_nodes, c_nodes, y0: float, h: float, g_mid=None, c_mid=None) -> np.ndarray:
    """Classical RK4 for y' = g + c*y on a uniform grid.

    ``g_nodes``/``c_nodes`` hold node values (length n+1). Mid-step values
    default to the average of the two neighbouring nodes.
    """
    g = np.asarray(g_nodes, dtype=float)
    c = np.asarray(c_nodes, dtype=float)
    n = g.shape[0] - 1
    gm = 0.5 * (g[:-1] + g[1:]) if g_mid is None else np.asarray(g_mid, dtype=float)
    cm = 0.5 * (c[:-1] + c[1:]) if c_mid is None else np.asarray(c_mid, dtype=float)

    y = np.empty(n + 1)
    y[0] = y0
    for i in range(n):
        yi = y[i]
        k1 = g[i] + c[i] * yi
        k2 = gm[i] + cm[i] * (yi + 0.5 * h * k1)
        k3 = gm[i] + cm[i] * (yi + 0.5 * h * k2)
        k4 = g[i + 1] + c[i + 1] * (yi + h * k3)
        y[i + 1] = yi + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return y


def _alpha_nodes(params: ModelParams, grid: TimeGrid, alpha: Optional[Series]):
    if alpha is None:
        return np.full(grid.n_nodes, params.alpha)
    require_on_grid(alpha, grid, "alpha")
    if np.any(alpha.values < 0) or np.any(alpha.values >= 1):
        raise ValidationError("alpha series must lie in [0, 1)")
    return alpha.values


@dataclass(frozen=True)
class ReservesState:
    Q: float
    R: Series


@dataclass(frozen=True)
class ReversedState:
    """Reserves in reversed time s = T - t, with Y(s) = R(T - s)."""

    R_T: float
    Y: Series

    def as_forward(self, grid: TimeGrid) -> Series:
        """Map Y back onto the forward grid: R(t) = Y(T - t)."""
        return Series(grid, self.Y.values[::-1])


def integrate_reserves(
    params: ModelParams,
    v: Series,
    Q: float,
    grid: TimeGrid,
    alpha: Optional[Series] = None,
) -> ReservesState:
    """Solve dR/dt = -v(t) + alpha*R with R(t_start) = Q."""
    require_on_grid(v, grid, "demand v")
    if not math.isfinite(Q):
        raise ValidationError(f"Q must be finite, got {Q!r}")
    a = _alpha_nodes(params, grid, alpha)
    R = rk4_affine(-v.values, a, float(Q), grid.h)
    R[0] = Q
    return ReservesState(float(Q), Series(grid, R))


def costate_closed_form(params: ModelParams, grid: TimeGrid) -> Series:
    return Series(grid, params.c0 * np.exp(-params.alpha * (grid.nodes - grid.t_start)))


def integrate_costate(
    params: ModelParams,
    grid: TimeGrid,
    method: str = "closed",
    alpha: Optional[Series] = None,
) -> Series:
    """Costate lambda with -dlambda/dt = alpha*lambda and lambda(t_start) = c0.

    ``method="closed"`` evaluates c0*exp(-alpha*(t - t_start)); ``"numeric"``
    integrates the ODE with RK4 and is the only option for a time-varying
    alpha series.
    """
    if method not in ("closed", "numeric"):
        raise ValidationError(f"unknown costate method {method!r}")
    if method == "closed":
        if alpha is not None:
            raise ValidationError("closed-form costate needs a constant alpha")
        return costate_closed_form(params, grid)
    a = _alpha_nodes(params, grid, alpha)
    lam = rk4_affine(np.zeros(grid.n_nodes), -a, params.c0, grid.h)
    return Series(grid, lam)


def reversed_grid(grid: TimeGrid) -> TimeGrid:
    """The s-grid [0, T - t_start] matching ``grid`` node for node."""
    return make_grid(0.0, grid.span, grid.n_steps)


def integrate_reversed(
    params: ModelParams,
    v: Series,
    R_T: float,
    grid: TimeGrid,
    alpha: Optional[Series] = None,
    convention: str = CONSISTENT,
) -> ReversedState:
    """Integrate the reserves backwards from the terminal value R_T.

    Node j of the s-grid corresponds to forward node n - j, so v(T - s) is
    the reflected node series. The ``consistent`` convention solves
    dY/ds = v(T - s) - alpha*Y, the exact time reversal of the forward
    equation. ``same-sign`` keeps the forward signs,
    dY/ds = -v(T - s) + alpha*Y, which does not retrace the forward path.
    """
    require_on_grid(v, grid, "demand v")
    if not math.isfinite(R_T):
        raise ValidationError(f"R_T must be finite, got {R_T!r}")
    if convention not in REVERSAL_CONVENTIONS:
        raise ValidationError(f"unknown reversal convention {convention!r}")
    v_rev = v.values[::-1]
    a_rev = _alpha_nodes(params, grid, alpha)[::-1]
    if convention == CONSISTENT:
        Y = rk4_affine(v_rev, -a_rev, float(R_T), grid.h)
    else:
        Y = rk4_affine(-v_rev, a_rev, float(R_T), grid.h)
    Y[0] = R_T
    return ReversedState(float(R_T), Series(reversed_grid(grid), Y))

