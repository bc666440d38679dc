"""SVG panel grid of Gamma level lines over (theta, pi) offsets."""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from . import thermo
from .landscape import (DEFAULT_WINDOW, DEGENERATE, MAXIMUM, SADDLE, LandscapeParams,
                        contours, evaluate_grid, find_critical_points, panel_levels)
from .thermo import ModelParams

THETA_OFFSETS = (0.16, 0.00, -0.08)
PI_OFFSETS = (-0.010, -0.001, 0.000, 0.001, 0.010)


@dataclass(frozen=True)
class FigureStyle:
    panel_width: float = 220.0
    panel_height: float = 160.0
    margin: float = 28.0
    n_cells: int = 200
    window: tuple[float, float, float, float] = DEFAULT_WINDOW
    stroke: str = "#4a6fa5"
    saddle_stroke: str = "#c0392b"
    stroke_width: float = 0.6


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _panel(lp: LandscapeParams, params: ModelParams, style: FigureStyle, ox: float, oy: float,
           label: str, ident: str) -> list[str]:
    c_min, c_max, y_min, y_max = style.window
    w, h = style.panel_width, style.panel_height
    sx = lambda c: ox + (c - c_min) / (c_max - c_min) * w
    sy = lambda y: oy + (y_max - y) / (y_max - y_min) * h

    grid = evaluate_grid(lp, params, style.window, style.n_cells)
    crit = find_critical_points(lp, params)
    levels = panel_levels(crit)
    saddle_levels = {cp.level for cp in crit if cp.kind in (SADDLE, DEGENERATE)}
    out = [f'<g class="panel" id="{ident}">',
           f'<rect x="{_fmt(ox)}" y="{_fmt(oy)}" width="{_fmt(w)}" height="{_fmt(h)}" '
           f'fill="none" stroke="#888" stroke-width="0.5"/>',
           f'<text x="{_fmt(ox + 4)}" y="{_fmt(oy - 6)}" font-size="9" '
           f'font-family="sans-serif">{escape(label)}</text>']
    for pl in contours(lp, params, levels=levels, grid=grid):
        if len(pl.c) < 2:
            continue
        pts = " ".join(f"{_fmt(sx(c))},{_fmt(sy(y))}" for c, y in zip(pl.c, pl.y))
        is_saddle = pl.level in saddle_levels
        color = style.saddle_stroke if is_saddle else style.stroke
        width = style.stroke_width * (2.0 if is_saddle else 1.0)
        out.append(f'<polyline class="{"saddle-level" if is_saddle else "level"}" '
                   f'points="{pts}" fill="none" stroke="{color}" stroke-width="{width:.2f}"/>')
    for cp in crit:
        px, py = sx(cp.point.c), sy(cp.point.y)
        kind = cp.kind.lower()
        if cp.kind == MAXIMUM:
            out.append(f'<circle class="crit {kind}" cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.5" fill="#222"/>')
        else:
            out.append(f'<path class="crit {kind}" d="M{_fmt(px - 3)},{_fmt(py - 3)} '
                       f'L{_fmt(px + 3)},{_fmt(py + 3)} M{_fmt(px - 3)},{_fmt(py + 3)} '
                       f'L{_fmt(px + 3)},{_fmt(py - 3)}" stroke="#222" stroke-width="1"/>')
    out.append("</g>")
    return out


def render_figure(theta_offsets=THETA_OFFSETS, pi_offsets=PI_OFFSETS,
                  params: ModelParams | None = None, style: FigureStyle | None = None) -> str:
    """Panels with rows over theta - theta_star and columns over pi - p_star."""
    params = params or ModelParams()
    style = style or FigureStyle()
    p_star = thermo.critical_pressure(params)
    nr, nc = len(theta_offsets), len(pi_offsets)
    m = style.margin
    W = nc * style.panel_width + (nc + 1) * m
    H = nr * style.panel_height + (nr + 1) * m
    body = []
    for i, dth in enumerate(theta_offsets):
        for k, dpi in enumerate(pi_offsets):
            lp = LandscapeParams(params.theta_star + dth, p_star + dpi)
            ox = m + k * (style.panel_width + m)
            oy = m + i * (style.panel_height + m)
            label = f"theta-theta*={dth:+.2f}  pi-p*={dpi:+.3f}"
            body.extend(_panel(lp, params, style, ox, oy, label, f"panel-r{i + 1}-c{k + 1}"))
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(W)}" '
        f'height="{_fmt(H)}" viewBox="0 0 {_fmt(W)} {_fmt(H)}">',
        f'<desc>Level lines of Gamma, tau1={params.tau1:g}</desc>',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def count_panels(svg: str) -> int:
    return svg.count('class="panel"')
