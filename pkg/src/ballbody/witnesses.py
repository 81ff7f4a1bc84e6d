"""Midpoint witnesses and the cuteness semi-decision.

A *midpoint* of ``(K0, K1)`` is a body at distance ``d/2`` from both, where
``d = delta(K0, K1)``. The Minkowski average is always one; a pair is cute
when the average is the only midpoint inside the class. Every witness here
is re-measured by the kernel before it is reported, whatever its
construction promises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arcs as arcmod
from .body import (
    GeneratorSet,
    LensSpec,
    SupportSample,
    average,
    ball_sample,
    cc_hull,
    discretization_bound,
    hausdorff,
    make_lens,
    sample_support,
    sample_support_points,
    support_point,
    support_values,
    supporting_points,
)
from .errors import EmptyBody, GridMismatch, NotApplicable, NotBallBody
from .geom import SphereGrid, make_grid, min_enclosing_ball

KINDS = ("average", "segment_cc", "tangent_lens", "big_ball_lens", "perturbed")
DISTINCT_FACTOR = 3.0
FAR = 4.0


@dataclass
class MidpointWitness:
    body: object                 # SupportSample or ArcBody2D
    kind: str
    distances: tuple[float, float]
    in_sn: str                   # "certified" | "assumed" | "refuted"
    separation: float = 0.0      # distance to the Minkowski average
    notes: dict = field(default_factory=dict)

    def is_midpoint(self, d: float, tol: float) -> bool:
        d0, d1 = self.distances
        return abs(d0 - d1) <= tol and abs(d0 - d / 2) <= tol and abs(d1 - d / 2) <= tol

    def is_distinct(self, tol: float, threshold: float | None = None) -> bool:
        if threshold is None:
            threshold = DISTINCT_FACTOR * tol
        return self.separation > threshold


@dataclass
class CutenessReport:
    distance: float
    tol: float
    verdict: str                 # "not_cute" | "no_witness_found"
    witnesses: list = field(default_factory=list)
    deciding: str | None = None
    budget: int = 0
    tried: int = 0
    pair: tuple = ("K0", "K1")

    @property
    def not_cute(self) -> bool:
        return self.verdict == "not_cute"

    def kinds(self) -> list[str]:
        return [w.kind for w in self.witnesses]


def default_tol(grid: SphereGrid, d: float) -> float:
    """Witness tolerance: twice the grid discretization bound at distance ``d``, floored at 1e-9."""
    return max(1e-9, 2.0 * discretization_bound(grid, d))


def random_threshold(d: float, tol: float) -> float:
    """Separation a randomly found witness must exceed.

    A body whose distances to two points at distance ``d`` are within
    ``tol`` of ``d/2`` can still sit ``sqrt(tol * (d + tol))`` away from the
    midpoint, so unproven candidates need more than ``3 * tol`` to count as
    distinct. The factor 2 absorbs the candidate's own grid error.
    """
    return max(DISTINCT_FACTOR * tol, 2.0 * math.sqrt(tol * (d + tol)))


def _measure(body: SupportSample, s0: SupportSample, s1: SupportSample, kind: str, in_sn: str,
             notes: dict | None = None) -> MidpointWitness:
    return MidpointWitness(
        body, kind, (hausdorff(body, s0), hausdorff(body, s1)), in_sn,
        hausdorff(body, average(s0, s1)), notes or {},
    )


def _check_pair(s0: SupportSample, s1: SupportSample) -> None:
    if not s0.grid.same_as(s1.grid):
        raise GridMismatch("samples live on different grids")
    for s in (s0, s1):
        if not s.is_ball_body(1e-8):
            raise NotBallBody("cuteness is only defined for bodies of the class")


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def average_midpoint(s0: SupportSample, s1: SupportSample) -> MidpointWitness:
    """The Minkowski average, always a midpoint."""
    m = average(s0, s1)
    return _measure(m, s0, s1, "average", "certified")


def _halfball_region_points(x: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    out = []
    dim = len(x)
    while len(out) < n:
        p = rng.uniform(-1, 1, dim) + x / 2
        if np.linalg.norm(p) <= 1 and np.linalg.norm(p - x) <= 1:
            out.append(p)
    return np.array(out)


def halfball_witnesses(x, grid: SphereGrid, count: int = 5, seed: int = 0,
                       tol: float | None = None, max_attempts: int = 1000) -> list[MidpointWitness]:
    """Distinct midpoints of ``(B/2, x + B/2)`` for a unit vector ``x``.

    Each is the ball hull of ``{0, x}`` plus a few points of ``B & (x + B)``,
    so it contains the segment ``[0, x]`` and sits inside ``B & (x + B)``.
    The first is the bare 1-lens ``[0, x]^cc``; the second adds the boundary
    point of ``B & (x + B)`` perpendicular to ``x``.
    """
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1) > 1e-12:
        raise ValueError("x must be a unit vector")
    s0 = ball_sample(np.zeros(grid.dim), grid, 0.5)
    s1 = ball_sample(x, grid, 0.5)
    tol = default_tol(grid, 1.0) if tol is None else tol
    rng = np.random.default_rng(seed)
    perp = np.linalg.svd(x[None, :])[2][1]
    seeds = [np.array([np.zeros_like(x), x]),
             np.array([np.zeros_like(x), x, x / 2 + math.sqrt(3) / 2 * perp])]
    found: list[MidpointWitness] = []
    attempts = 0
    while len(found) < count and attempts < max_attempts:
        if seeds:
            gens = seeds.pop(0)
        else:
            extra = _halfball_region_points(x, int(rng.integers(1, 4)), rng)
            gens = np.vstack([np.zeros_like(x), x, extra])
        attempts += 1
        w = _measure(cc_hull(gens, grid), s0, s1, "segment_cc", "certified", {"generators": gens})
        if not w.is_midpoint(1.0, tol):
            continue
        if all(hausdorff(w.body, v.body) > DISTINCT_FACTOR * tol for v in found):
            found.append(w)
    return found


def lens_translate_pair(x, z, grid: SphereGrid) -> tuple[SupportSample, SupportSample]:
    """Samples of ``L + z`` and ``L - z`` for ``L = (B + x) & (B - x)``."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if not np.linalg.norm(x) <= 1 + 1e-12 < np.linalg.norm(z):
        raise ValueError("need |x| <= 1 < |z|")
    gens = np.array([x, -x])
    return sample_support(GeneratorSet(gens + z), grid), sample_support(GeneratorSet(gens - z), grid)


def normal_cone_width(points: np.ndarray, grid: SphereGrid, y: np.ndarray, atol: float = 1e-9) -> float:
    """Angular width of the set of grid normals whose supporting point is ``y``."""
    hits = grid.directions[np.linalg.norm(points - y, axis=1) <= atol]
    if len(hits) < 2:
        return 0.0
    cos = np.clip(hits @ hits.T, -1.0, 1.0)
    return float(np.arccos(cos.min()))


def is_corner(body: GeneratorSet, u, grid: SphereGrid) -> bool:
    """Whether the supporting point in direction ``u`` is a singular boundary point.

    Singular means its normal cone on the grid spans more than ten mesh angles.
    """
    y = support_point(body, u)
    return normal_cone_width(supporting_points(body, grid), grid, y) > 10 * grid.mesh_angle


def _proper_lens_inputs(x, z):
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    nx, nz = np.linalg.norm(x), np.linalg.norm(z)
    if not (0 < nx < 1):
        raise NotApplicable("lens is not proper (need 0 < |x| < 1)")
    if nz <= 1:
        raise NotApplicable("need |z| > 1")
    lens = GeneratorSet(np.array([x, -x]))
    return x, z, nz, lens, support_point(lens, z / nz)


def witness_M(x, z, grid: SphereGrid, tol: float | None = None) -> MidpointWitness:
    """Ball hull of ``{-y, y}``, ``y`` the supporting point of the lens in direction ``z``.

    Applies in dim >= 3, and in the plane when ``y`` is a smooth boundary point.
    """
    x, z, nz, lens, y = _proper_lens_inputs(x, z)
    if grid.dim == 2 and is_corner(lens, z / nz, grid):
        raise NotApplicable("y is a corner of the planar lens; use witness_P")
    s0, s1 = lens_translate_pair(x, z, grid)
    w = _measure(cc_hull(np.array([-y, y]), grid), s0, s1, "segment_cc", "certified",
                 {"y": y, "expected_distance": nz})
    w.notes["tol"] = default_tol(grid, 2 * nz) if tol is None else tol
    return w


def witness_P(x, z, resolution: int = 4096) -> MidpointWitness:
    """Intersection of the two radius-|z| disks centered at ``z - y`` and ``y - z`` (plane only).

    Applies when ``y`` is a corner of the lens. Distances are computed exactly
    on arc bodies; the class membership of the witness is decided by the
    curvature criterion and recorded, not assumed.
    """
    x, z, nz, lens, y = _proper_lens_inputs(x, z)
    if len(x) != 2:
        raise NotApplicable("witness_P is planar")
    grid = make_grid(2, resolution)
    if not is_corner(lens, z / nz, grid):
        raise NotApplicable("y is a smooth boundary point; use witness_M")
    L = arcmod.arcs_from_generators(np.array([x, -x]))
    P = arcmod.arcs_from_generators(np.array([z - y, y - z]), nz)
    d0, b0 = arcmod.hausdorff_2d(P, arcmod.translate_arcs(L, z), resolution)
    d1, b1 = arcmod.hausdorff_2d(P, arcmod.translate_arcs(L, -z), resolution)
    hp, hl = arcmod.sample_arcs(P, grid).values, arcmod.sample_arcs(L, grid).values
    rng = np.random.default_rng(0)
    probe = rng.uniform(-1, 1, (20000, 2))
    in_l = arcmod.contains_2d(L, probe)
    contains = bool(np.all(hl <= hp + 1e-12) and np.all(arcmod.contains_2d(P, probe[in_l])))
    gap = float(np.max(hp - hl))
    w = MidpointWitness(
        P, "big_ball_lens", (d0, d1), "certified" if arcmod.certify_s2(P) else "refuted",
        gap, {"y": y, "expected_distance": nz, "bound": max(b0, b1),
              "contains_L": contains, "strict": gap > 1e-9},
    )
    return w


def tangent_lens(s0: SupportSample, s1: SupportSample) -> MidpointWitness:
    """Lens of the two unit balls supporting the average at its extreme directions.

    ``u`` maximises ``h1 - h0`` and ``w`` maximises ``h0 - h1`` over the grid;
    the lens is ``(x_M(u) - u + B) & (x_M(w) - w + B)`` for ``M`` the average.
    For pairs at distance at least 4 this lens is again a midpoint.
    """
    if not s0.grid.same_as(s1.grid):
        raise GridMismatch("samples live on different grids")
    grid = s0.grid
    diff = s1.values - s0.values
    u = grid.directions[int(np.argmax(diff))]
    w = grid.directions[int(np.argmax(-diff))]
    m = average(s0, s1)
    a = support_point(m, u) - u
    b = support_point(m, w) - w
    try:
        lens = make_lens(LensSpec(a, b), grid)
    except EmptyBody as exc:
        raise NotApplicable(f"tangent balls do not meet: {exc}") from exc
    d = hausdorff(s0, s1)
    return _measure(lens, s0, s1, "tangent_lens", "certified",
                    {"guaranteed": d >= FAR, "centers": (a, b)})


# ---------------------------------------------------------------------------
# Cuteness semi-decision
# ---------------------------------------------------------------------------

def translate_offset(s0: SupportSample, s1: SupportSample, tol: float) -> np.ndarray | None:
    """Half the translation taking ``K1`` to ``K0`` when the two are translates, else None."""
    diff = s0.values - s1.values
    t, *_ = np.linalg.lstsq(s0.grid.directions, diff, rcond=None)
    if np.max(np.abs(s0.grid.directions @ t - diff)) > tol:
        return None
    return t / 2


def translate_witnesses(s0: SupportSample, s1: SupportSample, z: np.ndarray) -> list[MidpointWitness]:
    """Witnesses for a translate pair ``(M + z, M - z)`` with ``|z| > 1``.

    With ``y+ = x_M(z)`` and ``y- = x_M(-z)``: the ball hull of ``{y-, y+}``
    lies in M and within ``|z|`` of both translates, because M sits in the
    unit ball supporting it at ``y+`` (and at ``y-``). In the plane the
    radius-``|z|`` lens through ``y- + z`` and ``y+ - z`` is added as well.
    """
    nz = float(np.linalg.norm(z))
    if nz <= 1:
        return []
    grid = s0.grid
    m = average(s0, s1)
    zh = z / nz
    yp, ym = support_point(m, grid.directions[grid.nearest(zh)]), support_point(m, grid.directions[grid.nearest(-zh)])
    out = []
    if min_enclosing_ball(np.array([ym, yp])).radius <= 1:
        out.append(_measure(cc_hull(np.array([ym, yp]), grid), s0, s1, "segment_cc", "certified",
                            {"y": (ym, yp)}))
    if grid.dim == 2:
        try:
            big = make_lens(LensSpec(ym + z, yp - z, nz), grid)
        except EmptyBody:
            big = None
        if big is not None:
            out.append(_measure(big, s0, s1, "big_ball_lens", "refuted", {"radius": nz}))
    return out


def _perturbed_candidate(m_points: np.ndarray, grid: SphereGrid, rng: np.random.Generator,
                         scale: float):
    k = int(rng.integers(2, 7))
    idx = rng.integers(0, len(m_points), k)
    sigma = scale * math.exp(rng.uniform(math.log(0.02), math.log(0.2)))
    gens = m_points[idx] + sigma * rng.standard_normal((k, grid.dim))
    if min_enclosing_ball(gens).radius > 1:
        return None
    return gens


def cuteness_check(s0: SupportSample, s1: SupportSample, budget: int = 1000, seed: int = 0,
                   tol: float | None = None) -> CutenessReport:
    """Search for a midpoint of the class other than the Minkowski average.

    Constructions are tried first (tangent lens when ``d >= 4``, then the
    translate-pair witnesses), then ``budget`` random ball hulls of jittered
    boundary points of the average. Constructions must sit ``3 * tol`` away
    from the average; random candidates must clear :func:`random_threshold`.
    Only witnesses certified to lie in the class can decide ``not_cute``.
    ``no_witness_found`` is a budget-limited
    outcome, never a proof of cuteness.
    """
    _check_pair(s0, s1)
    grid = s0.grid
    d = hausdorff(s0, s1)
    tol = default_tol(grid, d) if tol is None else tol
    report = CutenessReport(d, tol, "no_witness_found", budget=budget)

    def accept(w: MidpointWitness, threshold: float | None = None) -> bool:
        return w.is_midpoint(d, tol) and w.is_distinct(tol, threshold)

    constructive = []
    if d >= FAR:
        try:
            constructive.append(tangent_lens(s0, s1))
        except NotApplicable:
            pass
    z = translate_offset(s0, s1, tol)
    if z is not None:
        constructive.extend(translate_witnesses(s0, s1, z))
    for w in constructive:
        report.tried += 1
        if accept(w):
            report.witnesses.append(w)
            if report.deciding is None and w.in_sn != "refuted":
                report.deciding = w.kind
    if report.deciding is not None:
        report.verdict = "not_cute"
        return report

    rng = np.random.default_rng(seed)
    m = average(s0, s1)
    m_points = sample_support_points(m)
    scale = max(1.0, float(np.max(m.widths())) / 2)
    # cheap lower bound on a coarse sub-grid before the full evaluation
    stride = max(1, len(grid) // 64)
    sub = np.arange(0, len(grid), stride)
    for _ in range(budget):
        report.tried += 1
        gens = _perturbed_candidate(m_points, grid, rng, scale)
        if gens is None:
            continue
        # the hull contains its generators: their excess over K_i is a lower bound
        proj = gens @ grid.directions.T
        if max(np.max(proj - s0.values), np.max(proj - s1.values)) > d / 2 + tol:
            continue
        h_sub = support_values(GeneratorSet(gens, hull=True), grid.directions[sub])
        if max(np.max(np.abs(h_sub - s0.values[sub])), np.max(np.abs(h_sub - s1.values[sub]))) > d / 2 + tol:
            continue
        w = _measure(cc_hull(gens, grid), s0, s1, "perturbed", "certified", {"generators": gens})
        if accept(w, random_threshold(d, tol)):
            report.witnesses.append(w)
            report.deciding = "perturbed"
            report.verdict = "not_cute"
            break
    return report
