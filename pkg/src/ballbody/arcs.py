"""Exact planar bodies bounded by circular arcs.

An arc is parametrised by its outer-normal angle: the point at angle ``phi``
is ``center + radius * (cos phi, sin phi)`` and its outer normal is
``(cos phi, sin phi)``. Arcs are listed counterclockwise; between the end of
one arc and the start of the next sits a corner whose normal cone is the
angular gap. A single point is a zero-radius full-turn arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .body import GeneratorSet, SupportSample, validate
from .errors import DimensionError, EmptyBody, MalformedArcs
from .geom import SphereGrid, as_points, make_grid, min_enclosing_ball

TWO_PI = 2.0 * math.pi
CERT_TOL = 1e-9


@dataclass(frozen=True)
class Arc:
    center: tuple[float, float]
    radius: float
    start: float
    end: float

    @property
    def span(self) -> float:
        return self.end - self.start

    def point_at(self, phi: float) -> np.ndarray:
        return np.asarray(self.center) + self.radius * np.array([math.cos(phi), math.sin(phi)])

    @property
    def start_point(self) -> np.ndarray:
        return self.point_at(self.start)

    @property
    def end_point(self) -> np.ndarray:
        return self.point_at(self.end)

    def covers(self, phi) -> np.ndarray:
        """Whether the normal angle(s) ``phi`` fall inside the arc."""
        rel = np.mod(np.asarray(phi) - self.start, TWO_PI)
        full = self.span >= TWO_PI - 1e-15
        return full | (rel <= self.span + 1e-15)


@dataclass(frozen=True)
class ArcBody2D:
    arcs: tuple[Arc, ...]

    def __post_init__(self):
        arcs = tuple(self.arcs)
        object.__setattr__(self, "arcs", arcs)
        check_chain(arcs)

    @property
    def dim(self) -> int:
        return 2

    @property
    def max_radius(self) -> float:
        return max(a.radius for a in self.arcs)

    def vertices(self) -> np.ndarray:
        if len(self.arcs) == 1:
            return np.zeros((0, 2))
        return np.array([a.end_point for a in self.arcs])


def check_chain(arcs, tol: float = 1e-9) -> None:
    """Raise :class:`MalformedArcs` unless the arcs close up into a convex CCW boundary."""
    if not arcs:
        raise MalformedArcs("no arcs")
    for a in arcs:
        if a.radius < 0 or a.span < 0 or a.span > TWO_PI + 1e-12:
            raise MalformedArcs(f"bad arc {a}")
    if len(arcs) == 1:
        if arcs[0].span < TWO_PI - 1e-12:
            raise MalformedArcs("a single arc must be a full circle")
        return
    turn = 0.0
    for a, b in zip(arcs, arcs[1:] + arcs[:1]):
        if np.linalg.norm(a.end_point - b.start_point) > tol * max(1.0, a.radius, b.radius):
            raise MalformedArcs("consecutive arcs do not meet")
        gap = (b.start - a.end) % TWO_PI
        if gap > math.pi + 1e-12:
            raise MalformedArcs("boundary turns clockwise at a corner")
        turn += a.span + gap
    if abs(turn - TWO_PI) > 1e-8:
        raise MalformedArcs(f"total turning {turn:.12g} != 2 pi")


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _intersect_intervals(xs, ys):
    out = []
    for a0, a1 in xs:
        for b0, b1 in ys:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi >= lo:
                out.append((lo, hi))
    return out


def _circle_interval(mid: float, half: float):
    lo = (mid - half) % TWO_PI
    hi = lo + 2 * half
    if hi <= TWO_PI:
        return [(lo, hi)]
    return [(lo, TWO_PI), (0.0, hi - TWO_PI)]


def arcs_from_generators(points, radius: float = 1.0) -> ArcBody2D:
    """Exact boundary of the intersection of the disks ``p + radius * B``."""
    pts = np.unique(as_points(points, 2), axis=0)
    fit = min_enclosing_ball(pts)
    if fit.radius > radius * (1 + CERT_TOL):
        raise EmptyBody(f"circumradius {fit.radius:.12g} > {radius}")
    if fit.radius >= radius * (1 - 1e-12):
        return ArcBody2D((Arc((float(fit.center[0]), float(fit.center[1])), 0.0, 0.0, TWO_PI),))
    if len(pts) == 1:
        return ArcBody2D((Arc((float(pts[0, 0]), float(pts[0, 1])), radius, 0.0, TWO_PI),))
    arcs = []
    for i, p in enumerate(pts):
        allowed = [(0.0, TWO_PI)]
        for j, q in enumerate(pts):
            if i == j:
                continue
            d = q - p
            dist = float(np.hypot(*d))
            half = math.acos(min(1.0, dist / (2 * radius)))
            allowed = _intersect_intervals(allowed, _circle_interval(math.atan2(d[1], d[0]), half))
            if not allowed:
                break
        allowed = [iv for iv in allowed if iv[1] - iv[0] > 1e-13]
        if not allowed:
            continue
        if len(allowed) == 2:
            allowed.sort()
            (a0, a1), (b0, b1) = allowed
            if a0 <= 1e-13 and abs(b1 - TWO_PI) <= 1e-13:
                allowed = [(b0, a1 + TWO_PI)]
        if len(allowed) != 1:
            raise MalformedArcs("disk boundary contributes a disconnected arc")
        lo, hi = allowed[0]
        arcs.append(Arc((float(p[0]), float(p[1])), radius, lo, hi))
    arcs.sort(key=lambda a: a.start % TWO_PI)
    return ArcBody2D(tuple(arcs))


def make_lens_2d(spec) -> ArcBody2D:
    """Arc body of the lens ``(a + rB) & (b + rB)`` described by a :class:`~ballbody.body.LensSpec`."""
    if spec.center_a.shape != (2,):
        raise DimensionError("make_lens_2d works in the plane only")
    return arcs_from_generators(np.array([spec.center_a, spec.center_b]), spec.radius)


def translate_arcs(body: ArcBody2D, t) -> ArcBody2D:
    t = np.asarray(t, dtype=float)
    return ArcBody2D(tuple(
        Arc((a.center[0] + t[0], a.center[1] + t[1]), a.radius, a.start, a.end) for a in body.arcs
    ))


# ---------------------------------------------------------------------------
# Exact support, distances, certification
# ---------------------------------------------------------------------------

def _support_many(body: ArcBody2D, phi: np.ndarray):
    dirs = np.column_stack([np.cos(phi), np.sin(phi)])
    best = np.full(len(phi), -np.inf)
    arg = np.zeros((len(phi), 2))
    cands = []
    for a in body.arcs:
        c = np.asarray(a.center)
        on = a.covers(phi)
        pts = c + a.radius * dirs
        val = np.where(on, dirs @ c + a.radius, -np.inf)
        cands.append((val, pts))
    for v in body.vertices():
        cands.append((dirs @ v, np.broadcast_to(v, dirs.shape)))
    for val, pts in cands:
        better = val > best
        best[better] = val[better]
        arg[better] = pts[better]
    return best, arg


def support_exact_2d(body: ArcBody2D, u) -> tuple[float, np.ndarray]:
    """Exact support value and supporting point in direction ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (2,):
        raise DimensionError("support_exact_2d expects a planar direction")
    h, x = _support_many(body, np.array([math.atan2(u[1], u[0])]))
    return float(h[0]), x[0]


def sample_arcs(body: ArcBody2D, grid: SphereGrid) -> SupportSample:
    """Lower an arc body to a support sample on a planar grid."""
    if grid.dim != 2:
        raise DimensionError("arc bodies live in the plane")
    d = grid.directions
    h, _ = _support_many(body, np.arctan2(d[:, 1], d[:, 0]))
    return SupportSample(grid, h)


def hausdorff_2d(a0: ArcBody2D, a1: ArcBody2D, resolution: int = 4096) -> tuple[float, float]:
    """Hausdorff distance by dense angular sampling of exact supports.

    Returns ``(value, bound)``: the sampled value is at most ``bound`` below
    the true distance.
    """
    g = make_grid(2, resolution)
    from .body import discretization_bound, hausdorff

    s0, s1 = sample_arcs(a0, g), sample_arcs(a1, g)
    d = hausdorff(s0, s1)
    return d, discretization_bound(g, d, max(a0.max_radius, a1.max_radius, 1e-12))


def certify_s2(body: ArcBody2D) -> bool:
    """True iff every boundary arc has radius at most 1 (curvature criterion)."""
    return all(a.radius <= 1 + CERT_TOL for a in body.arcs)


def point_distance_2d(x, body: ArcBody2D) -> float:
    """Exact farthest-point distance from ``x`` to the body."""
    x = np.asarray(x, dtype=float)
    best = 0.0
    for a in body.arcs:
        c = np.asarray(a.center)
        off = c - x
        n = float(np.hypot(*off))
        if n > 0 and a.covers(math.atan2(off[1], off[0])):
            best = max(best, n + a.radius)
        elif n == 0:
            best = max(best, a.radius)
        best = max(best, float(np.linalg.norm(a.start_point - x)), float(np.linalg.norm(a.end_point - x)))
    return best


def contains_2d(body: ArcBody2D, pts, tol: float = 1e-12) -> np.ndarray:
    """Membership test for bodies that are the intersection of their arcs' disks.

    Every body built by :func:`arcs_from_generators` has this property.
    """
    pts = as_points(pts, 2)
    inside = np.ones(len(pts), dtype=bool)
    for a in body.arcs:
        inside &= np.linalg.norm(pts - np.asarray(a.center), axis=1) <= a.radius + tol
    return inside


def generators_to_arcs(body: GeneratorSet) -> ArcBody2D:
    """Exact arc body of a planar generator body ``P^c`` (not of a ball hull)."""
    if body.dim != 2 or body.hull:
        raise DimensionError("only planar P^c bodies have a direct arc form")
    validate(body)
    return arcs_from_generators(body.points)
