"""Minimal deterministic SVG line charts.

Identical input produces byte-identical output: element order follows
input order, coordinates are printed with 6 significant digits and no
timestamps or random ids are emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .data_io import _text_sink
from .errors import ValidationError

WIDTH = 720
HEIGHT = 440
MARGIN_LEFT = 80
MARGIN_RIGHT = 160
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")


def num(x: float) -> str:
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


@dataclass(frozen=True)
class PlotSeries:
    label: str
    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if not self.label or not self.label.strip():
            raise ValidationError("plot series needs a non-empty label")
        if len(self.x) != len(self.y) or not self.x:
            raise ValidationError(f"series {self.label!r}: x and y must be non-empty and equally long")
        if not all(math.isfinite(v) for v in self.x + self.y):
            raise ValidationError(f"series {self.label!r} has non-finite values")


@dataclass(frozen=True)
class Marker:
    value: float
    caption: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError("marker value must be finite")


@dataclass(frozen=True)
class PlotSpec:
    series: tuple
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    hlines: tuple = field(default_factory=tuple)
    vlines: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "hlines", tuple(self.hlines))
        object.__setattr__(self, "vlines", tuple(self.vlines))
        if not self.series:
            raise ValidationError("plot needs at least one series")


# Horizontal price markers for crisis peaks, USD/barrel.
CRISIS_PRICE_MARKERS = (
    Marker(146.0, "Subprime ~$146"),
    Marker(85.0, "Covid-19, pre-war ~$85"),
    Marker(124.0, "Russo-Ukrainian war ~$124"),
)


def _range(values: Sequence[float]):
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5):
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    k = 0
    while start + k * step <= hi + step * 1e-9:
        ticks.append(start + k * step)
        k += 1
    return ticks


def render_svg(spec: PlotSpec) -> str:
    xs = [v for s in spec.series for v in s.x] + [m.value for m in spec.vlines]
    ys = [v for s in spec.series for v in s.y] + [m.value for m in spec.hlines]
    x0, x1 = _range(xs)
    y0, y1 = _range(ys)
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def X(x):
        return MARGIN_LEFT + (x - x0) / (x1 - x0) * pw

    def Y(y):
        return MARGIN_TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{WIDTH / 2:g}" y="22" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    out.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    for t in _ticks(x0, x1):
        out.append(f'<line class="tick" x1="{num(X(t))}" y1="{MARGIN_TOP + ph}" x2="{num(X(t))}" y2="{MARGIN_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{num(X(t))}" y="{MARGIN_TOP + ph + 18}" text-anchor="middle">{num(t)}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line class="tick" x1="{MARGIN_LEFT - 5}" y1="{num(Y(t))}" x2="{MARGIN_LEFT}" y2="{num(Y(t))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{num(Y(t) + 4)}" text-anchor="end">{num(t)}</text>')
    if spec.x_label:
        out.append(f'<text x="{num(MARGIN_LEFT + pw / 2)}" y="{HEIGHT - 15}" text-anchor="middle">{escape(spec.x_label)}</text>')
    if spec.y_label:
        cy = num(MARGIN_TOP + ph / 2)
        out.append(f'<text x="18" y="{cy}" text-anchor="middle" transform="rotate(-90 18 {cy})">{escape(spec.y_label)}</text>')

    for m in spec.hlines:
        y = num(Y(m.value))
        out.append(f'<line class="marker" x1="{MARGIN_LEFT}" y1="{y}" x2="{MARGIN_LEFT + pw}" y2="{y}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text class="marker-caption" x="{MARGIN_LEFT + pw + 4}" y="{num(Y(m.value) + 4)}">{escape(m.caption)}</text>')
    for m in spec.vlines:
        x = num(X(m.value))
        out.append(f'<line class="marker" x1="{x}" y1="{MARGIN_TOP}" x2="{x}" y2="{MARGIN_TOP + ph}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text class="marker-caption" x="{num(X(m.value) + 3)}" y="{MARGIN_TOP + 12}">{escape(m.caption)}</text>')

    for i, s in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{num(X(x))},{num(Y(y))}" for x, y in zip(s.x, s.y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}">'
                   f'<title>{escape(s.label)}</title></polyline>')
        ly = MARGIN_TOP + 14 * (i + 1)
        lx = MARGIN_LEFT + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 16}" y2="{ly - 4}" stroke={quoteattr(color)} stroke-width="2"/>')
        out.append(f'<text x="{lx + 20}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg_plot(spec: PlotSpec, sink) -> None:
    text = render_svg(spec)
    with _text_sink(sink) as fh:
        fh.write(text)


def line_plot(x, ys: dict, **kwargs) -> PlotSpec:
    """PlotSpec with several labelled series over a shared x array."""
    x = np.asarray(x, dtype=float)
    return PlotSpec(tuple(PlotSeries(label, x, np.asarray(y, dtype=float)) for label, y in ys.items()), **kwargs)
