"""Property suites, one per structural fact the kernel relies on.

Each suite returns a :class:`LemmaSuiteResult`; on failure the offending
case's inputs are attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .body import (
    GeneratorSet,
    LensSpec,
    SupportSample,
    average,
    ball_sample,
    c_transform,
    discretization_bound,
    hausdorff,
    make_lens,
    minkowski_combine,
    point_distance,
    point_sample,
    sample_support,
)
from .classifier import probe_lattice, reconstruct_from_distances
from .config import RunConfig
from .corpus import CORPUS_KINDS, random_body
from .errors import NotApplicable
from .geom import RigidMotion, SphereGrid
from .witnesses import (
    cuteness_check,
    default_tol,
    halfball_witnesses,
    lens_translate_pair,
    tangent_lens,
    witness_M,
    witness_P,
)

EXACT_TOL = 1e-12


@dataclass
class LemmaSuiteResult:
    lemma: str
    cases: int
    max_deviation: float
    tolerance: float
    passed: bool
    failure: dict | None = None
    details: dict = field(default_factory=dict)


class _Tracker:
    """Running maximum of deviations with the first failing case kept."""

    def __init__(self, lemma: str, tolerance: float):
        self.lemma, self.tolerance = lemma, tolerance
        self.cases, self.worst, self.failure = 0, 0.0, None
        self.details: dict = {}

    def record(self, deviation: float, inputs: dict, tolerance: float | None = None, ok: bool | None = None):
        tol = self.tolerance if tolerance is None else tolerance
        self.cases += 1
        self.worst = max(self.worst, float(deviation))
        good = (deviation <= tol) if ok is None else ok
        if not good and self.failure is None:
            self.failure = {"case": self.cases - 1, "deviation": float(deviation), "tolerance": tol, **inputs}

    def result(self) -> LemmaSuiteResult:
        return LemmaSuiteResult(self.lemma, self.cases, self.worst, self.tolerance,
                                self.failure is None, self.failure, self.details)


def random_sample(dim: int, grid: SphereGrid, rng: np.random.Generator, kind: str | None = None,
                  spread: float = 1.5) -> SupportSample:
    kind = CORPUS_KINDS[int(rng.integers(len(CORPUS_KINDS)))] if kind is None else kind
    return sample_support(random_body(kind, dim, rng, spread), grid)


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# Exact grid identities
# ---------------------------------------------------------------------------

def suite_scaling(cfg: RunConfig, cases: int = 100) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("scaling", EXACT_TOL)
    for _ in range(cases):
        a, b, c = (random_sample(cfg.dim, grid, rng) for _ in range(3))
        lam = float(rng.uniform())
        lhs = (1 - lam) * hausdorff(a, b)
        rhs = hausdorff(minkowski_combine(a, c, lam), minkowski_combine(b, c, lam))
        t.record(abs(lhs - rhs), {"lam": lam})
    return t.result()


def suite_geodesic(cfg: RunConfig, cases: int = 100) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("geodesic", EXACT_TOL)
    for _ in range(cases):
        s0, s1 = random_sample(cfg.dim, grid, rng), random_sample(cfg.dim, grid, rng)
        lam = float(rng.uniform())
        sl = minkowski_combine(s0, s1, lam)
        d = hausdorff(s0, s1)
        a, b = hausdorff(s0, sl), hausdorff(sl, s1)
        t.record(max(abs(a + b - d), abs(a - lam * d), abs(b - (1 - lam) * d)), {"lam": lam, "d": d})
    return t.result()


def suite_cc_involution(cfg: RunConfig, cases: int = 100) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("cc-involution", EXACT_TOL)
    for _ in range(cases):
        s = random_sample(cfg.dim, grid, rng)
        t.record(float(np.max(np.abs(c_transform(c_transform(s)).values - s.values))), {})
    return t.result()


def suite_c_isometry(cfg: RunConfig, cases: int = 100) -> LemmaSuiteResult:
    """Isometry and order reversal of the c-transform."""
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("c-isometry", EXACT_TOL)
    for _ in range(cases):
        s0, s1 = random_sample(cfg.dim, grid, rng), random_sample(cfg.dim, grid, rng)
        c0, c1 = c_transform(s0), c_transform(s1)
        dev = abs(hausdorff(c0, c1) - hausdorff(s0, s1))
        # order reversal: one more generator gives a smaller body
        c = rng.uniform(-1.5, 1.5, cfg.dim)
        pts = c + 0.8 * rng.uniform(-1, 1, (int(rng.integers(3, 7)), cfg.dim)) / math.sqrt(cfg.dim)
        big = sample_support(GeneratorSet(pts[:-1]), grid)
        small = sample_support(GeneratorSet(pts), grid)
        order = float(np.max(small.values - big.values))
        flipped = float(np.max(c_transform(big).values - c_transform(small).values))
        t.record(max(dev, order, flipped), {"generators": pts})
    return t.result()


def suite_c_average(cfg: RunConfig, cases: int = 100) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("c-average", EXACT_TOL)
    for _ in range(cases):
        s0, s1 = random_sample(cfg.dim, grid, rng), random_sample(cfg.dim, grid, rng)
        lhs = c_transform(average(s0, s1)).values
        rhs = average(c_transform(s0), c_transform(s1)).values
        t.record(float(np.max(np.abs(lhs - rhs))), {})
    return t.result()


# ---------------------------------------------------------------------------
# Midpoints and cuteness
# ---------------------------------------------------------------------------

def suite_halfball_midpoints(cfg: RunConfig, count: int = 5) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    x = _unit(rng, cfg.dim)
    bound = discretization_bound(grid, 0.5)
    tol = default_tol(grid, 1.0) if cfg.tol is None else cfg.tol
    t = _Tracker("halfball-midpoints", bound)
    found = halfball_witnesses(x, grid, count=count, seed=cfg.seed, tol=tol)
    for w in found:
        t.record(max(abs(w.distances[0] - 0.5), abs(w.distances[1] - 0.5)), {"x": x})
    t.details["found"] = len(found)
    if len(found) < count and t.failure is None:
        t.failure = {"x": x, "found": len(found), "required": count}
    return t.result()


def _far_pair_suite(name: str, make: Callable, cfg: RunConfig, cases: int, distance: float) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker(name, 0.0)
    verdicts = []
    for _ in range(cases):
        a = rng.uniform(-1, 1, cfg.dim)
        b = a + distance * _unit(rng, cfg.dim)
        rep = cuteness_check(make(a, grid), make(b, grid), budget=cfg.budget, seed=int(rng.integers(2**31)),
                             tol=cfg.tol)
        verdicts.append(rep.verdict)
        t.record(0.0, {"a": a, "b": b, "verdict": rep.verdict}, ok=rep.verdict == "no_witness_found")
    t.details["verdicts"] = verdicts
    return t.result()


def suite_cute_points(cfg: RunConfig, cases: int = 3, distance: float = 5.0) -> LemmaSuiteResult:
    return _far_pair_suite("cute-points", point_sample, cfg, cases, distance)


def suite_cute_balls(cfg: RunConfig, cases: int = 3, distance: float = 5.0) -> LemmaSuiteResult:
    return _far_pair_suite("cute-balls", ball_sample, cfg, cases, distance)


LENS_NORMS = (0.3, 0.6, 0.9)
SHIFT_NORMS = (2.0, 3.0)


def suite_lens_witness(cfg: RunConfig) -> LemmaSuiteResult:
    """Proper-lens translates are never cute.

    The plane uses ``z`` parallel to ``x`` (smooth supporting point, so the
    ball-hull witness applies) and ``z`` perpendicular (corner, where the
    checker must still find a midpoint).
    """
    grid = cfg.grid
    e = np.eye(cfg.dim)
    t = _Tracker("lens-witness", 0.0)
    for nx in LENS_NORMS:
        for nz in SHIFT_NORMS:
            for zdir in (0, 1):
                x, z = nx * e[0], nz * e[zdir]
                s0, s1 = lens_translate_pair(x, z, grid)
                rep = cuteness_check(s0, s1, budget=0, tol=cfg.tol)
                bound = discretization_bound(grid, nz)
                try:
                    w = witness_M(x, z, grid, cfg.tol)
                    dev = max(abs(w.distances[0] - nz), abs(w.distances[1] - nz))
                    ok = rep.not_cute and dev <= bound
                except NotApplicable:
                    if cfg.dim != 2 or zdir == 0:
                        raise
                    dev, ok = 0.0, rep.not_cute
                t.record(dev, {"x": x, "z": z, "verdict": rep.verdict}, tolerance=bound, ok=ok)
    t.tolerance = discretization_bound(grid, max(SHIFT_NORMS))
    return t.result()


def suite_tangent_lens(cfg: RunConfig, cases: int = 50, min_distance: float = 4.0) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("tangent-lens", 0.0)
    for _ in range(cases):
        s0 = random_sample(cfg.dim, grid, rng)
        d_shift = float(rng.uniform(min_distance + 2.5, min_distance + 6.0))
        kind = CORPUS_KINDS[int(rng.integers(len(CORPUS_KINDS)))]
        g = RigidMotion.random(cfg.dim, rng, scale=0.0)
        g = RigidMotion(g.linear, d_shift * _unit(rng, cfg.dim))
        s1 = sample_support(random_body(kind, cfg.dim, rng).moved(g), grid)
        d = hausdorff(s0, s1)
        if d < min_distance:
            continue
        w = tangent_lens(s0, s1)
        bound = discretization_bound(grid, d / 2)
        dev = max(abs(w.distances[0] - d / 2), abs(w.distances[1] - d / 2))
        t.record(dev, {"d": d}, tolerance=bound)
        t.tolerance = max(t.tolerance, bound)
    return t.result()


def suite_both_are_lens_forward(cfg: RunConfig, cases: int = 20) -> LemmaSuiteResult:
    grid, rng = cfg.grid, np.random.default_rng(cfg.seed)
    t = _Tracker("both-are-lens-forward", EXACT_TOL)
    for _ in range(cases):
        x = float(rng.uniform(0.05, 0.95)) * _unit(rng, cfg.dim)
        c = rng.uniform(-1, 1, cfg.dim)
        m = make_lens(LensSpec(c + x, c - x), grid)
        x0 = float(rng.uniform(1.0, 4.0)) * _unit(rng, cfg.dim)
        k0 = SupportSample(grid, m.values + grid.directions @ x0)
        k1 = SupportSample(grid, m.values - grid.directions @ x0)
        t.record(float(np.max(np.abs(average(k0, k1).values - m.values))), {"x": x, "x0": x0})
    return t.result()


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

RECON_DENSITIES = {2: (11, 21, 41)}


def reconstruction_errors(grid: SphereGrid, body: SupportSample, densities) -> list[tuple[float, float]]:
    """``(max |h_rec - h|, max (h - h_rec))`` per lattice density."""
    out = []
    for n in densities:
        rec = reconstruct_from_distances(lambda x: point_distance(x, body), probe_lattice(grid.dim, n), grid)
        diff = rec.values - body.values
        out.append((float(np.max(np.abs(diff))), float(np.max(-diff))))
    return out


def suite_reconstruction(cfg: RunConfig, tolerance: float = 0.05) -> LemmaSuiteResult:
    grid = cfg.grid
    x = np.zeros(cfg.dim)
    x[0] = 0.6
    body = sample_support(GeneratorSet(np.array([x, -x])), grid)
    densities = RECON_DENSITIES.get(cfg.dim, (3, 5, 9))
    errs = reconstruction_errors(grid, body, densities)
    t = _Tracker("reconstruction", tolerance)
    monotone = all(b[0] < a[0] for a, b in zip(errs, errs[1:]))
    sandwich = all(gap <= EXACT_TOL for _, gap in errs)
    t.record(errs[-1][0], {"densities": densities, "errors": [e for e, _ in errs]},
             ok=errs[-1][0] <= tolerance and monotone and sandwich)
    t.details.update({"densities": list(densities), "errors": [e for e, _ in errs],
                      "monotone": monotone, "sandwich": sandwich})
    return t.result()


def suite_witness_p(cfg: RunConfig) -> LemmaSuiteResult:
    """Distance audit of the big-disk witness at planar lens corners (membership only recorded)."""
    t = _Tracker("witness-p", 0.0)
    certified = []
    for nx in LENS_NORMS:
        for nz in SHIFT_NORMS:
            w = witness_P(np.array([nx, 0.0]), np.array([0.0, nz]))
            bound = w.notes["bound"]
            dev = max(abs(w.distances[0] - nz), abs(w.distances[1] - nz))
            t.tolerance = max(t.tolerance, bound)
            t.record(dev, {"x": nx, "z": nz}, tolerance=bound,
                     ok=dev <= bound and w.notes["contains_L"] and w.notes["strict"])
            certified.append(w.in_sn)
    t.details["in_sn"] = certified
    return t.result()


SUITES: dict[str, Callable[[RunConfig], LemmaSuiteResult]] = {
    "scaling": suite_scaling,
    "geodesic": suite_geodesic,
    "cc-involution": suite_cc_involution,
    "c-isometry": suite_c_isometry,
    "c-average": suite_c_average,
    "halfball-midpoints": suite_halfball_midpoints,
    "cute-points": suite_cute_points,
    "cute-balls": suite_cute_balls,
    "lens-witness": suite_lens_witness,
    "tangent-lens": suite_tangent_lens,
    "reconstruction": suite_reconstruction,
    "both-are-lens-forward": suite_both_are_lens_forward,
}


def run_suite(name: str, cfg: RunConfig) -> LemmaSuiteResult:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown lemma {name!r}; choose from {', '.join(SUITES)}") from None
    return suite(cfg)


__all__ = ["LemmaSuiteResult", "SUITES", "run_suite", "random_sample", "reconstruction_errors"]
