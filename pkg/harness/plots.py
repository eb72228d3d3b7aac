"""Self-contained SVG line plots."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")

# Longer series are thinned to this many points before drawing
MAX_POINTS = 5000


@dataclass
class Series:
    """One polyline of a plot."""

    label: str
    x: np.ndarray
    y: np.ndarray
    markers: bool = False


def _thin(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(x) <= MAX_POINTS:
        return x, y
    stride = math.ceil(len(x) / MAX_POINTS)
    return x[::stride], y[::stride]


def _linear_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    step = 10.0 ** math.floor(math.log10(raw))
    for factor in (1.0, 2.0, 5.0, 10.0):
        if raw <= factor * step:
            step *= factor
            break
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _log_ticks(lo: float, hi: float) -> list[float]:
    return [float(k) for k in range(math.ceil(lo), math.floor(hi) + 1)]


@dataclass
class LinePlot:
    """
    Line plot with linear or log-log axes, rendered as an SVG document.

    Log axes drop non-positive and non-finite points.
    """

    title: str
    xlabel: str
    ylabel: str
    loglog: bool = False
    width: int = 640
    height: int = 480
    series: list[Series] = field(default_factory=list)

    margin_left = 80
    margin_right = 20
    margin_top = 40
    margin_bottom = 60

    def add_series(
        self,
        label: str,
        x: Sequence[float] | np.ndarray,
        y: Sequence[float] | np.ndarray,
        markers: bool = False,
    ) -> None:
        """Add a series; points that cannot be drawn are dropped."""
        xs = np.asarray(x, dtype=np.float64)
        ys = np.asarray(y, dtype=np.float64)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if self.loglog:
            keep &= (xs > 0) & (ys > 0)
            xs, ys = np.log10(xs[keep]), np.log10(ys[keep])
        else:
            xs, ys = xs[keep], ys[keep]
        xs, ys = _thin(xs, ys)
        self.series.append(Series(label, xs, ys, markers))

    def _bounds(self) -> tuple[float, float, float, float]:
        xs = [s.x for s in self.series if len(s.x)]
        ys = [s.y for s in self.series if len(s.y)]
        if not xs:
            return 0.0, 1.0, 0.0, 1.0
        x_lo, x_hi = float(min(a.min() for a in xs)), float(max(a.max() for a in xs))
        y_lo, y_hi = float(min(a.min() for a in ys)), float(max(a.max() for a in ys))
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        return x_lo, x_hi, y_lo, y_hi

    def render(self) -> str:
        """Return the SVG document."""
        x_lo, x_hi, y_lo, y_hi = self._bounds()
        left, top = self.margin_left, self.margin_top
        plot_w = self.width - left - self.margin_right
        plot_h = self.height - top - self.margin_bottom

        def px(v: float) -> float:
            return left + (v - x_lo) / (x_hi - x_lo) * plot_w

        def py(v: float) -> float:
            return top + (y_hi - v) / (y_hi - y_lo) * plot_h

        parts = [
            '<?xml version="1.0" standalone="no"?>',
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>',
            f'<text x="{self.width / 2:.1f}" y="24" text-anchor="middle" font-size="16">{escape(self.title)}</text>',
            f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
        ]

        ticks = _log_ticks if self.loglog else _linear_ticks
        for tick in ticks(x_lo, x_hi):
            label = f"1e{int(tick)}" if self.loglog else f"{tick:.4g}"
            parts.append(
                f'<line x1="{px(tick):.1f}" y1="{top + plot_h}" x2="{px(tick):.1f}" '
                f'y2="{top + plot_h + 5}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{px(tick):.1f}" y="{top + plot_h + 20}" text-anchor="middle" '
                f'font-size="11">{label}</text>'
            )
        for tick in ticks(y_lo, y_hi):
            label = f"1e{int(tick)}" if self.loglog else f"{tick:.4g}"
            parts.append(f'<line x1="{left - 5}" y1="{py(tick):.1f}" x2="{left}" y2="{py(tick):.1f}" stroke="black"/>')
            parts.append(
                f'<text x="{left - 8}" y="{py(tick) + 4:.1f}" text-anchor="end" font-size="11">{label}</text>'
            )

        parts.append(
            f'<text x="{left + plot_w / 2:.1f}" y="{self.height - 15}" text-anchor="middle" '
            f'font-size="13">{escape(self.xlabel)}</text>'
        )
        parts.append(
            f'<text x="18" y="{top + plot_h / 2:.1f}" text-anchor="middle" font-size="13" '
            f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">{escape(self.ylabel)}</text>'
        )

        for i, s in enumerate(self.series):
            color = PALETTE[i % len(PALETTE)]
            points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(s.x, s.y))
            if points:
                parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1"/>')
            if s.markers:
                for a, b in zip(s.x, s.y):
                    parts.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{color}"/>')
            legend_y = top + 16 + 16 * i
            parts.append(
                f'<line x1="{left + 10}" y1="{legend_y - 4}" x2="{left + 30}" y2="{legend_y - 4}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            parts.append(f'<text x="{left + 36}" y="{legend_y}" font-size="11">{escape(s.label)}</text>')

        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def save(self, path: str | Path) -> Path:
        """Write the SVG document to path."""
        path = Path(path)
        path.write_text(self.render())
        return path
