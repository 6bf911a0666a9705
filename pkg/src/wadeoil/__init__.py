"""Super-profit model of oil prices with optimal non-producer demand."""

__version__ = "0.1.0"

from .errors import (
    DataError,
    DuplicateYear,
    GridMismatch,
    NonRealRoot,
    SingularPrice,
    ValidationError,
    WadeError,
)
from .model import (
    WIN_WIN_PRICE,
    DemandSplit,
    ModelParams,
    Series,
    TimeGrid,
    make_grid,
    super_profit,
    total_demand,
)
from .dynamics import (
    ReservesState,
    ReversedState,
    integrate_costate,
    integrate_reserves,
    integrate_reversed,
)
from .pontryagin import (
    PriceContext,
    Trajectory,
    calibrate_c0,
    hamiltonian,
    optimal_demand,
    optimal_superprofit,
    solve_pmp,
    stationarity_residual,
)
from .sweeps import SweepResult, SweepSpec, qk, run_initial_sweep, run_terminal_sweep
from .winwin import WinWinParams, evolve_winwin_price, winwin_consistency

__all__ = [
    "DataError",
    "DuplicateYear",
    "GridMismatch",
    "NonRealRoot",
    "SingularPrice",
    "ValidationError",
    "WadeError",
    "WIN_WIN_PRICE",
    "DemandSplit",
    "ModelParams",
    "Series",
    "TimeGrid",
    "make_grid",
    "super_profit",
    "total_demand",
    "ReservesState",
    "ReversedState",
    "integrate_costate",
    "integrate_reserves",
    "integrate_reversed",
    "PriceContext",
    "Trajectory",
    "calibrate_c0",
    "hamiltonian",
    "optimal_demand",
    "optimal_superprofit",
    "solve_pmp",
    "stationarity_residual",
    "SweepResult",
    "SweepSpec",
    "qk",
    "run_initial_sweep",
    "run_terminal_sweep",
    "WinWinParams",
    "evolve_winwin_price",
    "winwin_consistency",
]
