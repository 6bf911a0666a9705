"""Annual `year,value` CSV ingestion, resampling and result tables.

Input files are UTF-8 with a ``year,value`` header, LF or CRLF line
endings and optional ``#`` comment lines. Result tables write floats with
``repr`` so that re-reading them reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import io
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, DuplicateYear, ValidationError
from .model import Series, TimeGrid, make_grid
from .pontryagin import Trajectory
from .sweeps import SweepResult

HEADER = ("year", "value")
TRAJECTORY_COLUMNS = ("t", "R", "lambda", "a_star", "S", "H")
STEP = "step"
LINEAR = "linear"


@dataclass(frozen=True)
class AnnualRecord:
    year: int
    value: float


def parse_annual_csv(text: str) -> list[AnnualRecord]:
    records: list[AnnualRecord] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if lineno == 1:
            line = line.lstrip("\ufeff")
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            if tuple(f.lower() for f in fields) != HEADER:
                raise DataError(f"expected header 'year,value', got {line!r}", lineno)
            header_seen = True
            continue
        if len(fields) != 2:
            raise DataError(f"expected 2 fields, got {len(fields)}", lineno)
        try:
            year = int(fields[0])
            value = float(fields[1])
        except ValueError:
            raise DataError(f"malformed row {line!r}", lineno) from None
        if not math.isfinite(value):
            raise DataError(f"non-finite value {fields[1]!r}", lineno)
        if records:
            prev = records[-1].year
            if year == prev:
                raise DuplicateYear(f"duplicate year {year}", lineno)
            if year < prev:
                raise DataError(f"year {year} follows {prev}; years must increase", lineno)
        records.append(AnnualRecord(year, value))
    if not header_seen:
        raise DataError("missing header 'year,value'")
    return records


def load_annual_csv(source) -> list[AnnualRecord]:
    """Read records from a path or an open text stream."""
    if hasattr(source, "read"):
        return parse_annual_csv(source.read())
    with open(source, encoding="utf-8", newline="") as fh:
        return parse_annual_csv(fh.read())


def fixture_path(name: str = "oil_prices.csv") -> Path:
    """Path of a CSV fixture shipped with the package."""
    return Path(str(resources.files("wadeoil") / "data" / name))


def yearly_grid(records: Sequence[AnnualRecord]) -> TimeGrid:
    if not records:
        raise ValidationError("no records")
    first, last = records[0].year, records[-1].year
    if first == last:
        return make_grid(first, first + 1, 1)
    return make_grid(first, last, last - first)


def resample(records: Sequence[AnnualRecord], grid: TimeGrid, mode: str = STEP) -> Series:
    """Sample annual records on ``grid``.

    ``step`` holds each record's value over [year, year + 1) and carries it
    forward over gaps, so the span is [first, last + 1]. ``linear``
    interpolates between values anchored at the record years, span
    [first, last]. Both return record values exactly on record years.
    """
    if not records:
        raise ValidationError("cannot resample an empty record list")
    years = np.array([r.year for r in records], dtype=float)
    values = np.array([r.value for r in records], dtype=float)
    t = grid.nodes
    if mode == STEP:
        lo, hi = years[0], years[-1] + 1.0
    elif mode == LINEAR:
        lo, hi = years[0], years[-1]
    else:
        raise ValidationError(f"unknown resample mode {mode!r}")
    if t[0] < lo or t[-1] > hi:
        raise ValidationError(
            f"grid [{t[0]:g}, {t[-1]:g}] outside data span [{lo:g}, {hi:g}]"
        )
    if mode == LINEAR:
        if len(records) == 1:
            return Series(grid, np.full(grid.n_nodes, values[0]))
        return Series(grid, np.interp(t, years, values))
    idx = np.searchsorted(years, np.floor(t), side="right") - 1
    return Series(grid, values[np.clip(idx, 0, len(values) - 1)])


@contextmanager
def _text_sink(sink):
    if hasattr(sink, "write"):
        yield sink
        return
    path = Path(sink)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    # repr round-trips doubles exactly
    return repr(float(x))


def write_table(columns: Sequence[str], rows: Iterable[Sequence], sink) -> None:
    with _text_sink(sink) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(c) for c in row])


def _trajectory_rows(traj: Trajectory):
    cols = (traj.t, traj.R.values, traj.lam.values, traj.a_star.values, traj.S.values, traj.H.values)
    return zip(*cols)


def write_result_csv(result, sink) -> None:
    """Write a Trajectory (``t,R,lambda,a_star,S,H``) or a SweepResult (prefixed by ``k``)."""
    if isinstance(result, Trajectory):
        write_table(TRAJECTORY_COLUMNS, _trajectory_rows(result), sink)
    elif isinstance(result, SweepResult):
        rows = (
            (e.k, *row)
            for e in result.entries
            for row in _trajectory_rows(e.trajectory)
        )
        write_table(("k",) + TRAJECTORY_COLUMNS, rows, sink)
    else:
        raise TypeError(f"cannot write {type(result).__name__}")


def read_table(source) -> dict[str, np.ndarray]:
    """Read a result table back into float columns."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(x) for x in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, j] for j, name in enumerate(header)}


def out_root(default: str = "runs") -> Path:
    return Path(os.environ.get("WADE_OUT_DIR", default))
