"""Deterministic SVG drawings of planar bodies.

Arc bodies are drawn exactly (one ``<path>`` per arc, or a ``<circle>`` for
a disk); support samples become closed polylines through the intersections
of consecutive support lines. World coordinates are used directly with the
y axis flipped, so counterclockwise arcs carry sweep flag 0.
"""

from __future__ import annotations

import math
from html import escape

import numpy as np

from .arcs import ArcBody2D, arcs_from_generators
from .body import GeneratorSet, SupportSample, sample_support
from .errors import DimensionError
from .geom import make_grid

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
HULL_RESOLUTION = 1024
MARGIN = 0.05


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def sample_outline(s: SupportSample) -> np.ndarray:
    """Vertices of the polygon cut out by the grid's support lines, in angular order."""
    if s.dim != 2:
        raise DimensionError("only planar samples can be drawn")
    d = s.grid.directions
    order = np.argsort(np.arctan2(d[:, 1], d[:, 0]))
    u, h = d[order], s.values[order]
    u2, h2 = np.roll(u, -1, axis=0), np.roll(h, -1)
    det = u[:, 0] * u2[:, 1] - u[:, 1] * u2[:, 0]
    x = (h * u2[:, 1] - h2 * u[:, 1]) / det
    y = (u[:, 0] * h2 - u2[:, 0] * h) / det
    return np.column_stack([x, y])


def _as_drawable(body):
    if isinstance(body, ArcBody2D):
        return body
    if isinstance(body, GeneratorSet):
        if body.dim != 2:
            raise DimensionError("only planar bodies can be drawn")
        if not body.hull:
            return arcs_from_generators(body.points)
        return sample_support(body, make_grid(2, HULL_RESOLUTION))
    if isinstance(body, SupportSample):
        if body.dim != 2:
            raise DimensionError("only planar samples can be drawn")
        return body
    raise TypeError(f"cannot draw {type(body).__name__}")


def _arc_extent(body: ArcBody2D) -> np.ndarray:
    pts = []
    for a in body.arcs:
        phi = np.linspace(a.start, a.end, 64)
        pts.append(np.asarray(a.center) + a.radius * np.column_stack([np.cos(phi), np.sin(phi)]))
    return np.vstack(pts)


def _arc_elements(body: ArcBody2D) -> list[str]:
    if len(body.arcs) == 1:
        a = body.arcs[0]
        r = a.radius if a.radius > 0 else None
        cx, cy = a.center
        if r is None:
            return [f'<circle cx="{_f(cx)}" cy="{_f(-cy)}" r="0.01"/>']
        return [f'<circle cx="{_f(cx)}" cy="{_f(-cy)}" r="{_f(r)}"/>']
    out = []
    for a in body.arcs:
        p, q = a.start_point, a.end_point
        large = 1 if a.span > math.pi else 0
        out.append(
            f'<path d="M {_f(p[0])} {_f(-p[1])} A {_f(a.radius)} {_f(a.radius)} 0 {large} 0 '
            f'{_f(q[0])} {_f(-q[1])}"/>'
        )
    return out


def _polyline(pts: np.ndarray) -> str:
    closed = np.vstack([pts, pts[:1]])
    coords = " ".join(f"{_f(x)},{_f(-y)}" for x, y in closed)
    return f'<polyline points="{coords}"/>'


def render_svg(layers, width: int = 640) -> str:
    """SVG text for ``layers``: a sequence of ``(label, body)`` pairs, drawn in order."""
    if not layers:
        raise ValueError("nothing to draw")
    drawn = [(str(label), _as_drawable(b)) for label, b in layers]
    extents = [_arc_extent(b) if isinstance(b, ArcBody2D) else sample_outline(b) for _, b in drawn]
    allpts = np.vstack(extents)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-6)
    pad = MARGIN * span
    x0, x1 = lo[0] - pad, hi[0] + pad
    y0, y1 = -hi[1] - pad, -lo[1] + pad
    w, h = x1 - x0, y1 - y0
    height = max(1, int(round(width * h / w)))
    font = 0.035 * max(w, h)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(w)} {_f(h)}">',
    ]
    for i, (label, b) in enumerate(drawn):
        color = PALETTE[i % len(PALETTE)]
        lines.append(f'<g id="layer{i}" fill="none" stroke="{color}" stroke-width="1.5" '
                     f'vector-effect="non-scaling-stroke">')
        lines.append(f"<title>{escape(label)}</title>")
        elements = _arc_elements(b) if isinstance(b, ArcBody2D) else [_polyline(sample_outline(b))]
        for el in elements:
            lines.append(el.replace("/>", ' vector-effect="non-scaling-stroke"/>'))
        lines.append("</g>")
    lines.append(f'<g id="legend" font-family="sans-serif" font-size="{_f(font)}">')
    for i, (label, _) in enumerate(drawn):
        y = y0 + (i + 1.2) * 1.3 * font
        color = PALETTE[i % len(PALETTE)]
        lines.append(f'<text x="{_f(x0 + 0.5 * font)}" y="{_f(y)}" fill="{color}">{escape(label)}</text>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
