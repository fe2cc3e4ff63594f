"""Minimal deterministic SVG charts (no plotting dependency).

Every function renders a complete SVG document string from plain data.
Numbers are formatted with a fixed precision so identical inputs always
produce byte-identical files.
"""

from __future__ import annotations

from typing import Sequence

_W, _H = 640.0, 420.0
_ML, _MR, _MT, _MB = 64.0, 20.0, 24.0, 48.0
_PLOT_W = _W - _ML - _MR
_PLOT_H = _H - _MT - _MB


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


class _Frame:
    """Data-to-pixel mapping over the fixed plot rectangle."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        self.x_lo, self.x_hi = x_lo, (x_hi if x_hi > x_lo else x_lo + 1.0)
        self.y_lo, self.y_hi = y_lo, (y_hi if y_hi > y_lo else y_lo + 1.0)

    def x(self, v: float) -> float:
        return _ML + (v - self.x_lo) / (self.x_hi - self.x_lo) * _PLOT_W

    def y(self, v: float) -> float:
        return _MT + _PLOT_H - (v - self.y_lo) / (self.y_hi - self.y_lo) * _PLOT_H


def _open_svg(parts: list[str]) -> None:
    parts.append(f'<svg xmlns="http://www.w3.org/2000/svg" '
                 f'width="{_fmt(_W)}" height="{_fmt(_H)}" '
                 f'viewBox="0 0 {_fmt(_W)} {_fmt(_H)}">')
    parts.append(f'<rect width="{_fmt(_W)}" height="{_fmt(_H)}" fill="white"/>')


def _axes(parts: list[str], fr: _Frame, x_label: str, y_label: str) -> None:
    x0, y0 = _ML, _MT + _PLOT_H
    parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
                 f'x2="{_fmt(_ML + _PLOT_W)}" y2="{_fmt(y0)}" stroke="black"/>')
    parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
                 f'x2="{_fmt(x0)}" y2="{_fmt(_MT)}" stroke="black"/>')
    for t in _ticks(fr.x_lo, fr.x_hi):
        px = fr.x(t)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" '
                     f'y2="{_fmt(y0 + 5)}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_fmt(y0 + 18)}" '
                     f'font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(fr.y_lo, fr.y_hi):
        py = fr.y(t)
        parts.append(f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(py)}" '
                     f'x2="{_fmt(x0)}" y2="{_fmt(py)}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(x0 - 8)}" y="{_fmt(py + 4)}" '
                     f'font-size="11" text-anchor="end">{_fmt(t)}</text>')
    parts.append(f'<text x="{_fmt(_ML + _PLOT_W / 2)}" y="{_fmt(_H - 10)}" '
                 f'font-size="12" text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="14" y="{_fmt(_MT + _PLOT_H / 2)}" font-size="12" '
                 f'text-anchor="middle" transform="rotate(-90 14 '
                 f'{_fmt(_MT + _PLOT_H / 2)})">{y_label}</text>')


def _polyline(parts: list[str], pts: Sequence[tuple[float, float]],
              color: str, width: float = 1.5) -> None:
    if not pts:
        return
    coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
    parts.append(f'<polyline points="{coords}" fill="none" '
                 f'stroke="{color}" stroke-width="{_fmt(width)}"/>')


def front_svg(rows: Sequence[dict]) -> str:
    """Payload vs minimal lifetime cost; infeasible payloads get markers."""
    feas = [r for r in rows if r["feasible"]]
    xs = [r["payload_g"] for r in rows] or [0.0, 1.0]
    ys = [r["min_cost_usd"] for r in feas] or [0.0, 1.0]
    fr = _Frame(min(xs), max(xs), 0.0, max(ys) * 1.05)
    parts: list[str] = []
    _open_svg(parts)
    _axes(parts, fr, "payload [g]", "min lifetime cost [$]")
    _polyline(parts, [(fr.x(r["payload_g"]), fr.y(r["min_cost_usd"]))
                      for r in feas], "#1f6fb2", 2.0)
    for r in feas:
        parts.append(f'<circle cx="{_fmt(fr.x(r["payload_g"]))}" '
                     f'cy="{_fmt(fr.y(r["min_cost_usd"]))}" r="2.5" '
                     f'fill="#1f6fb2"/>')
    for r in rows:
        if not r["feasible"]:
            px = fr.x(r["payload_g"])
            parts.append(f'<text x="{_fmt(px)}" y="{_fmt(_MT + 14)}" '
                         f'font-size="11" text-anchor="middle" '
                         f'fill="#c23b22">x</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_svg(values: Sequence[float], bins: int = 30,
                  x_label: str = "min lifetime cost [$]") -> str:
    """Counts over equal-width bins as filled bars."""
    parts: list[str] = []
    _open_svg(parts)
    vals = sorted(float(v) for v in values)
    if not vals:
        parts.append(f'<text x="{_fmt(_W / 2)}" y="{_fmt(_H / 2)}" '
                     f'font-size="14" text-anchor="middle">no feasible '
                     f'samples</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
    lo, hi = vals[0], vals[-1]
    if hi <= lo:
        hi = lo + 1.0
    width = (hi - lo) / bins
    counts = [0] * bins
    for v in vals:
        idx = min(int((v - lo) / width), bins - 1)
        counts[idx] += 1
    fr = _Frame(lo, hi, 0.0, max(counts) * 1.05)
    _axes(parts, fr, x_label, "count")
    for i, c in enumerate(counts):
        if c == 0:
            continue
        x0 = fr.x(lo + i * width)
        x1 = fr.x(lo + (i + 1) * width)
        y1 = fr.y(c)
        parts.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y1)}" '
                     f'width="{_fmt(x1 - x0)}" '
                     f'height="{_fmt(_MT + _PLOT_H - y1)}" '
                     f'fill="#1f6fb2" stroke="white" stroke-width="0.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def quantile_band_svg(summaries: Sequence[dict]) -> str:
    """Per-payload 5-95% cost band with the median drawn on top."""
    cells = [s for s in summaries if s.get("q50_cost_usd") is not None]
    parts: list[str] = []
    _open_svg(parts)
    if not cells:
        parts.append(f'<text x="{_fmt(_W / 2)}" y="{_fmt(_H / 2)}" '
                     f'font-size="14" text-anchor="middle">no feasible '
                     f'cells</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
    xs = [c["payload_g"] for c in cells]
    his = [c["q95_cost_usd"] for c in cells]
    fr = _Frame(min(xs), max(xs), 0.0, max(his) * 1.05)
    band = [(fr.x(c["payload_g"]), fr.y(c["q95_cost_usd"])) for c in cells]
    band += [(fr.x(c["payload_g"]), fr.y(c["q05_cost_usd"]))
             for c in reversed(cells)]
    coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in band)
    _axes(parts, fr, "payload [g]", "lifetime cost [$]")
    parts.append(f'<polygon points="{coords}" fill="#aecde8" stroke="none"/>')
    _polyline(parts, [(fr.x(c["payload_g"]), fr.y(c["q50_cost_usd"]))
                      for c in cells], "#1f6fb2", 2.0)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
