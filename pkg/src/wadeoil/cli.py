"""Command-line front end.

Every command writes into ``<out>/<run-name>/`` together with a flat
``manifest.txt`` of the resolved configuration. Exit codes: 0 success,
1 computation error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .data_io import (
    LINEAR,
    STEP,
    load_annual_csv,
    out_root,
    resample,
    write_result_csv,
    write_table,
    yearly_grid,
)
from .errors import ValidationError, WadeError
from .model import ModelParams, Series, make_grid, super_profit
from .pontryagin import (
    PriceContext,
    calibrate_c0,
    objective,
    solve_pmp,
    stationarity_residual,
)
from .svgplot import CRISIS_PRICE_MARKERS, Marker, PlotSeries, PlotSpec, line_plot, write_svg_plot
from .sweeps import (
    INITIAL,
    NORMALIZED,
    PAPER_EXACT,
    TERMINAL,
    SweepSpec,
    reversal_roundtrip_error,
    run_initial_sweep,
    run_terminal_sweep,
)
from .winwin import INVESTMENT_RESPONSES, WinWinParams, evolve_winwin_price, make_response, winwin_consistency

log = logging.getLogger("wadeoil")

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_USAGE = 2

INPUT_FLAGS = ("prices", "quantity", "w", "investment")


@dataclass
class RunConfig:
    command: str
    out_dir: Path
    settings: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        settings = {
            k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "command", "out", "run_name", "verbose") and v is not None
        }
        for key in INPUT_FLAGS:
            path = settings.get(key)
            if path is not None and not Path(path).is_file():
                raise ValidationError(f"--{key.replace('_', '-')}: no such file {path!r}")
        if args.command in ("optimal", "sweep") and args.c0 is not None and args.calibrate is not None:
            raise ValidationError("--c0 and --calibrate are mutually exclusive")
        root = Path(args.out) if args.out else out_root()
        return cls(args.command, root / (args.run_name or args.command), settings)

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out_dir / name

    def write_manifest(self):
        lines = [f"command={self.command}", f"version={__version__}"]
        lines += [f"{k}={_manifest_value(v)}" for k, v in self.settings.items()]
        lines += [f"result.{k}={_manifest_value(v)}" for k, v in sorted(self.results.items())]
        lines.append("outputs=" + ",".join(sorted(self.outputs)))
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _manifest_value(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(_manifest_value(x) for x in v)
    return str(v).replace("\n", " ")


# -- argument helpers ---------------------------------------------------------

def _k_list(text: str):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_output(p):
    p.add_argument("--out", help="output root (default: $WADE_OUT_DIR or ./runs)")
    p.add_argument("--run-name", help="run directory name (default: command name)")
    p.add_argument("--plot", action="store_true", help="also write SVG plots")


def _add_grid(p):
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--n-steps", type=int)


def _add_model(p, calibration=True):
    p.add_argument("--alpha", type=float, default=0.2, help="reserve growth rate (default 0.2)")
    p.add_argument("--m", type=int, default=2, help="objective exponent (default 2)")
    p.add_argument("--p0", type=float, default=29.0, help="win-win price (default 29)")
    p.add_argument("--epsilon-band", type=float, default=0.5)
    p.add_argument("--clip", action="store_true", help="clip prices inside the band instead of failing")
    if calibration:
        p.add_argument("--c0", type=float, help="costate scale (default 0.2)")
        p.add_argument("--calibrate", type=float, metavar="A_OBS",
                       help="calibrate c0 so that a* equals A_OBS at the first node")


def _add_price_source(p, required=True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--prices", help="price CSV (year,value)")
    src.add_argument("--synthetic-price", type=float, nargs=2, metavar=("LO", "HI"),
                     help="linear price ramp from LO to HI over the grid")
    p.add_argument("--price-resample", choices=(STEP, LINEAR), default=STEP)
    w = p.add_mutually_exclusive_group()
    w.add_argument("--w", help="rest-of-world demand CSV (year,value)")
    w.add_argument("--w-const", type=float, default=0.0)
    p.add_argument("--demand-resample", choices=(STEP, LINEAR), default=LINEAR)
    p.add_argument("--Q", type=float, default=1000.0, help="initial reserves (default 1000)")


def _grid(args, records=None, default=(0.0, 100.0, 100)):
    if records is not None:
        base = yearly_grid(records)
        default = (base.t_start, base.t_end, base.n_steps)
    t0 = default[0] if args.t_start is None else args.t_start
    t1 = default[1] if args.t_end is None else args.t_end
    n = default[2] if args.n_steps is None else args.n_steps
    return make_grid(t0, t1, n)


def _price_context(args, grid=None):
    """(grid, PriceContext) from the price and demand flags.

    Without an explicit ``grid`` a price file sets a yearly grid over its
    records and a synthetic ramp uses the grid flags.
    """
    if args.prices:
        records = load_annual_csv(args.prices)
        grid = grid or _grid(args, records)
        p = resample(records, grid, args.price_resample)
    elif args.synthetic_price:
        grid = grid or _grid(args)
        lo, hi = args.synthetic_price
        p = Series(grid, lo + (hi - lo) * (grid.nodes - grid.t_start) / grid.span)
    else:
        raise ValidationError("a price source is required (--prices or --synthetic-price)")
    if args.w:
        w = resample(load_annual_csv(args.w), grid, args.demand_resample)
    else:
        w = Series.constant(grid, args.w_const)
    return grid, PriceContext(p, w, epsilon_band=args.epsilon_band, clip=args.clip)


def _params(args, ctx: Optional[PriceContext] = None, cfg: Optional[RunConfig] = None) -> ModelParams:
    base = ModelParams(alpha=args.alpha, m=args.m, c0=0.2 if args.c0 is None else args.c0, p0_base=args.p0)
    if getattr(args, "calibrate", None) is None:
        return base
    p_first = float(ctx.p.values[0])
    c0 = calibrate_c0(args.calibrate, p_first, ctx.grid.t_start, base,
                      epsilon_band=ctx.epsilon_band, origin=ctx.grid.t_start)
    if cfg is not None:
        cfg.results["calibrated_c0"] = c0
    return ModelParams(alpha=args.alpha, m=args.m, c0=c0, p0_base=args.p0)


def _trajectory_plots(cfg: RunConfig, traj, params: ModelParams):
    order = np.argsort(traj.p.values, kind="stable")
    write_svg_plot(PlotSpec(
        (PlotSeries("a*(p)", traj.p.values[order], traj.a_star.values[order]),),
        x_label="price (USD/barrel)", y_label="optimal demand a*", title="Optimal demand against price",
    ), cfg.path("demand_vs_price.svg"))
    running = traj.S.values ** params.m
    cumulative = np.concatenate(([0.0], np.cumsum(0.5 * (running[1:] + running[:-1]) * traj.grid.h)))
    write_svg_plot(line_plot(
        traj.t, {f"S^{params.m}": running, "cumulative objective": cumulative},
        x_label="t", y_label="objective", title="Objective along the optimal path",
    ), cfg.path("objective.svg"))
    write_svg_plot(line_plot(
        traj.t, {"R(t)": traj.R.values}, x_label="t", y_label="reserves", title="Reserves",
    ), cfg.path("reserves.svg"))


# -- commands -------------------------------------------------------------------

def cmd_superprofit(args, cfg: RunConfig) -> int:
    prices = load_annual_csv(args.prices)
    if not prices:
        raise ValidationError("price file has no records")
    years = [r.year for r in prices]
    p = np.array([r.value for r in prices])
    if args.quantity:
        qrec = {r.year: r.value for r in load_annual_csv(args.quantity)}
        missing = [y for y in years if y not in qrec]
        if missing:
            raise ValidationError(f"quantity file lacks years {missing}")
        q = np.array([qrec[y] for y in years])
    else:
        q = np.full(len(years), args.q_const)
    S = super_profit(p, q, args.p0)
    write_table(("year", "p", "q", "S"), zip(years, p, q, S), cfg.path("superprofit.csv"))
    if args.plot:
        write_svg_plot(line_plot(years, {"S(t)": S}, x_label="year", y_label="super profit (USD)",
                                 title="Super profit", hlines=(Marker(0.0, "S = 0"),)),
                       cfg.path("superprofit.svg"))
        write_svg_plot(line_plot(years, {"price": p}, x_label="year", y_label="USD/barrel",
                                 title="Oil price", hlines=(Marker(args.p0, f"win-win {args.p0:g}"),) + CRISIS_PRICE_MARKERS),
                       cfg.path("prices.svg"))
    return EXIT_OK


def cmd_optimal(args, cfg: RunConfig) -> int:
    grid, ctx = _price_context(args)
    params = _params(args, ctx, cfg)
    traj = solve_pmp(params, ctx, args.Q, grid)
    write_result_csv(traj, cfg.path("trajectory.csv"))
    cfg.results["objective"] = objective(traj, params)
    cfg.results["stationarity_residual"] = stationarity_residual(traj, ctx, params)
    if args.plot:
        _trajectory_plots(cfg, traj, params)
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    grid, ctx = _price_context(args)
    params = _params(args, ctx, cfg)
    spec = SweepSpec(
        t0=args.t0, h=args.horizon, lo=args.lo, hi=args.hi, k_values=args.k,
        mode=args.mode, indexing=args.indexing, k_max=args.k_max,
    )
    if args.mode == INITIAL:
        result = run_initial_sweep(spec, params, ctx, grid, workers=args.workers)
    else:
        result = run_terminal_sweep(spec, params, ctx, grid, workers=args.workers, convention=args.convention)
    write_result_csv(result, cfg.path("sweep.csv"))
    write_table(("k", "start_value", "objective"),
                ((e.k, e.start_value, e.objective) for e in result.entries),
                cfg.path("objectives.csv"))
    if args.roundtrip_check:
        err = reversal_roundtrip_error(params, ctx, args.Q)
        cfg.results["roundtrip_max_rel_error"] = err
        print(f"max reversal error: {err:.3e}")
    if args.plot:
        write_svg_plot(PlotSpec(
            tuple(PlotSeries(f"k={e.k}", e.trajectory.t, e.trajectory.R.values) for e in result.entries),
            x_label="t", y_label="reserves", title=f"{args.mode} condition sweep",
        ), cfg.path("sweep.svg"))
    return EXIT_OK


def cmd_winwin(args, cfg: RunConfig) -> int:
    if args.investment:
        records = load_annual_csv(args.investment)
        grid = _grid(args, records)
        i = resample(records, grid, LINEAR)
    else:
        grid = _grid(args, default=(0.0, 10.0, 100))
        i = Series.constant(grid, args.i_const)
    ww = WinWinParams(mu=args.mu, pr=args.pr, i=i, f=make_response(args.f, args.f_param))
    P0 = evolve_winwin_price(ww, args.p0_init, grid)
    resid = winwin_consistency(P0, ww)
    write_table(("t", "P0", "i", "residual"), zip(grid.nodes, P0.values, i.values, resid.values),
                cfg.path("winwin.csv"))
    cfg.results["final_P0"] = float(P0.values[-1])
    cfg.results["max_abs_residual"] = float(np.max(np.abs(resid.values)))
    if args.chain:
        _, ctx = _price_context(args, grid)
        ctx = PriceContext(ctx.p, ctx.w, ctx.epsilon_band, ctx.clip, p0=P0)
        params = ModelParams(alpha=args.alpha, m=args.m, c0=args.c0, p0_base=args.p0_init)
        traj = solve_pmp(params, ctx, args.Q, grid)
        write_result_csv(traj, cfg.path("trajectory.csv"))
        cfg.results["objective"] = objective(traj, params)
    if args.plot:
        write_svg_plot(line_plot(grid.nodes, {"P0(t)": P0.values, "i(t) + pr": i.values + args.pr},
                                 x_label="t", y_label="USD/barrel", title="Win-win price"),
                       cfg.path("winwin.svg"))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wadeoil", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("superprofit", help="super profit table from price and quantity series")
    p.add_argument("--prices", required=True, help="price CSV (year,value)")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--quantity", help="quantity CSV (year,value)")
    q.add_argument("--q-const", type=float, default=1.0, help="constant quantity (default 1)")
    p.add_argument("--p0", type=float, default=29.0)
    _add_output(p)
    p.set_defaults(func=cmd_superprofit)

    p = sub.add_parser("optimal", help="solve for optimal demand, costate and reserves")
    _add_model(p)
    _add_price_source(p)
    _add_grid(p)
    _add_output(p)
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("sweep", help="initial or terminal condition sweep")
    _add_model(p)
    _add_price_source(p)
    _add_grid(p)
    p.add_argument("--mode", choices=(INITIAL, TERMINAL), required=True)
    p.add_argument("--lo", type=float, required=True, help="reserve value at window start")
    p.add_argument("--hi", type=float, required=True, help="reserve value at window end")
    p.add_argument("--k", type=_k_list, required=True, help="comma-separated indices")
    p.add_argument("--t0", type=float, default=0.0, help="window start (default 0)")
    p.add_argument("--horizon", type=float, required=True, help="window length h")
    p.add_argument("--indexing", choices=(PAPER_EXACT, NORMALIZED), default=PAPER_EXACT)
    p.add_argument("--k-max", type=int, help="K for normalized indexing")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--convention", choices=("consistent", "same-sign"), default="consistent",
                   help="reversed-time sign convention for terminal sweeps")
    p.add_argument("--roundtrip-check", action="store_true",
                   help="report the forward/reversed reserves mismatch for --Q")
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("winwin", help="evolve the win-win reference price")
    inv = p.add_mutually_exclusive_group()
    inv.add_argument("--investment", help="investment per barrel CSV (year,value)")
    inv.add_argument("--i-const", type=float, default=0.0)
    p.add_argument("--f", choices=sorted(INVESTMENT_RESPONSES), default="linear")
    p.add_argument("--f-param", type=float, default=1.0, help="kappa, F or c of the response")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--pr", type=float, default=0.0)
    p.add_argument("--p0-init", type=float, default=29.0)
    _add_grid(p)
    p.add_argument("--chain", action="store_true", help="solve with P0(t) as the time-varying pivot")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--prices")
    src.add_argument("--synthetic-price", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--price-resample", choices=(STEP, LINEAR), default=STEP)
    w = p.add_mutually_exclusive_group()
    w.add_argument("--w")
    w.add_argument("--w-const", type=float, default=0.0)
    p.add_argument("--demand-resample", choices=(STEP, LINEAR), default=LINEAR)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--c0", type=float, default=0.2)
    p.add_argument("--epsilon-band", type=float, default=0.5)
    p.add_argument("--clip", action="store_true")
    p.add_argument("--Q", type=float, default=1000.0)
    _add_output(p)
    p.set_defaults(func=cmd_winwin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.from_args(args)
        log.debug("writing %s outputs to %s", args.command, cfg.out_dir)
        code = args.func(args, cfg)
        cfg.write_manifest()
        return code
    except (ValidationError, OSError) as exc:
        print(f"wadeoil: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WadeError as exc:
        print(f"wadeoil: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ArithmeticError, ValueError) as exc:
        print(f"wadeoil: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
