"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (also repeated in the
terminal summary) and then asserts. Where an independent oracle exists the
check uses it: the rejection-sampling support search in ``conftest``, exact
arc bodies in the plane, and the known motion behind each synthetic oracle.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, brute_force_support, random_generators

from ballbody.arcs import (
    arcs_from_generators,
    make_lens_2d,
    point_distance_2d,
    sample_arcs,
    support_exact_2d,
)
from ballbody.body import (
    GeneratorSet,
    LensSpec,
    average,
    ball_sample,
    c_transform,
    discretization_bound,
    hausdorff,
    minkowski_combine,
    point_sample,
    sample_support,
    support_value,
)
from ballbody.classifier import (
    SyntheticOracleSpec,
    make_adversarial_oracle,
    make_synthetic_oracle,
    motion_error,
    probe_lattice,
    reconstruct_from_distances,
    recover,
)
from ballbody.config import default_resolution
from ballbody.corpus import CORPUS_KINDS, random_body
from ballbody.geom import RigidMotion, make_grid
from ballbody.witnesses import (
    DISTINCT_FACTOR,
    cuteness_check,
    default_tol,
    halfball_witnesses,
    lens_translate_pair,
    tangent_lens,
    witness_M,
    witness_P,
)

pytestmark = pytest.mark.acceptance

EXACT = 1e-12
DIMS = (2, 3, 4)


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _grid(dim):
    return make_grid(dim, default_resolution(dim))


def _unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _random_body(rng, dim, spread=1.5):
    kind = CORPUS_KINDS[int(rng.integers(len(CORPUS_KINDS)))]
    return random_body(kind, dim, rng, spread)


def test_c_duality_algebra():
    worst = {"involution": 0.0, "order": 0.0, "isometry": 0.0, "average": 0.0}
    samples = 0
    for dim in DIMS:
        grid, rng = _grid(dim), np.random.default_rng(100 + dim)
        while samples < 1000 * (dim - 1) // 3:
            s0 = sample_support(_random_body(rng, dim), grid)
            s1 = sample_support(_random_body(rng, dim), grid)
            c0, c1 = c_transform(s0), c_transform(s1)
            worst["involution"] = max(worst["involution"], float(np.max(np.abs(c_transform(c0).values - s0.values))))
            worst["isometry"] = max(worst["isometry"], abs(hausdorff(c0, c1) - hausdorff(s0, s1)))
            lhs, rhs = c_transform(average(s0, s1)), average(c0, c1)
            worst["average"] = max(worst["average"], float(np.max(np.abs(lhs.values - rhs.values))))
            # order reversal on a nested pair: adding a generator shrinks the body
            pts = random_generators(rng, dim, k=int(rng.integers(2, 7)), spread=1.5)
            big, small = sample_support(GeneratorSet(pts[:-1]), grid), sample_support(GeneratorSet(pts), grid)
            nested = float(np.max(small.values - big.values))
            flipped = float(np.max(c_transform(big).values - c_transform(small).values))
            worst["order"] = max(worst["order"], nested, flipped)
            samples += 3
    ok = all(v <= EXACT for v in worst.values())
    detail = f"{samples} samples, " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f" (tol {EXACT:g})"
    report(1, "c-duality algebra", ok, detail)


def test_metric_identities():
    worst_scale = worst_geo = 0.0
    for dim in DIMS:
        grid, rng = _grid(dim), np.random.default_rng(200 + dim)
        for _ in range(100):
            a, b, c = (sample_support(_random_body(rng, dim), grid) for _ in range(3))
            lam = float(rng.uniform())
            lhs = (1 - lam) * hausdorff(a, b)
            rhs = hausdorff(minkowski_combine(a, c, lam), minkowski_combine(b, c, lam))
            worst_scale = max(worst_scale, abs(lhs - rhs))
            sl = minkowski_combine(a, b, lam)
            d, d0, d1 = hausdorff(a, b), hausdorff(a, sl), hausdorff(sl, b)
            worst_geo = max(worst_geo, abs(d0 + d1 - d), abs(d0 - lam * d), abs(d1 - (1 - lam) * d))
    ok = worst_scale <= EXACT and worst_geo <= EXACT
    report(2, "metric identities", ok,
           f"100 cases per dim {DIMS}, scaling {worst_scale:.1e}, geodesic {worst_geo:.1e} (tol {EXACT:g})")


def test_support_kernel_correctness():
    rng = np.random.default_rng(300)
    worst_brute = worst_arcs = 0.0
    brute_above = 0.0
    bodies = 0
    for i in range(200):
        dim = 2 if i < 120 else (3 if i < 170 else 4)
        pts = random_generators(rng, dim)
        body = GeneratorSet(pts)
        u = _unit(rng, dim)
        h, _ = support_value(body, u)
        hb, _ = brute_force_support(pts, u, n_samples=4000, refine_steps=1500, seed=i)
        worst_brute = max(worst_brute, h - hb)
        brute_above = max(brute_above, hb - h)
        if dim == 2:
            arc_body = arcs_from_generators(pts)
            for phi in rng.uniform(0, 2 * math.pi, 16):
                v = np.array([math.cos(phi), math.sin(phi)])
                worst_arcs = max(worst_arcs, abs(support_value(body, v)[0] - support_exact_2d(arc_body, v)[0]))
        bodies += 1
    ok = worst_brute <= 1e-2 and brute_above <= 1e-12 and worst_arcs <= 1e-8
    report(3, "support kernel", ok,
           f"{bodies} bodies, brute-force gap {worst_brute:.1e} (tol 1e-2), brute above exact {brute_above:.1e}, "
           f"arc enumeration {worst_arcs:.1e} (tol 1e-8)")


def test_halfball_midpoint_multiplicity():
    lines, ok = [], True
    for dim in (2, 3):
        grid, rng = _grid(dim), np.random.default_rng(400 + dim)
        x = _unit(rng, dim)
        found = halfball_witnesses(x, grid, count=5, seed=dim)
        bound = discretization_bound(grid, 0.5)
        tol = default_tol(grid, 1.0)
        # the half balls themselves, sampled independently of the witness code
        s0, s1 = ball_sample(np.zeros(dim), grid, 0.5), ball_sample(x, grid, 0.5)
        dev = max(max(abs(hausdorff(w.body, s0) - 0.5), abs(hausdorff(w.body, s1) - 0.5)) for w in found)
        sep = min(hausdorff(a.body, b.body) for i, a in enumerate(found) for b in found[i + 1:])
        good = len(found) >= 5 and dev <= bound and sep > DISTINCT_FACTOR * tol
        ok &= good
        lines.append(f"dim {dim}: {len(found)} midpoints, deviation {dev:.1e} (bound {bound:.1e}), "
                     f"min separation {sep:.3f}")
    report(4, "half-ball midpoints", ok, "; ".join(lines))


def test_cute_pairs():
    parts, ok = [], True
    for dim in (2, 3):
        grid = _grid(dim)
        a = np.zeros(dim)
        b = np.zeros(dim)
        b[0], b[1] = 3.0, 4.0
        for name, make in (("points", point_sample), ("balls", ball_sample)):
            rep = cuteness_check(make(a, grid), make(b, grid), budget=10_000, seed=dim)
            good = rep.verdict == "no_witness_found" and rep.tried >= 10_000
            ok &= good
            parts.append(f"dim {dim} {name} {rep.verdict} ({rep.tried} tried)")
    lens_cases = 0
    worst = 0.0
    for dim in (2, 3):
        grid = _grid(dim)
        e = np.eye(dim)
        for nx in (0.3, 0.6, 0.9):
            for nz in (2.0, 3.0):
                # dim 2 smooth case: z parallel to x; dim 3: z orthogonal to x
                x, z = nx * e[0], nz * (e[0] if dim == 2 else e[2])
                s0, s1 = lens_translate_pair(x, z, grid)
                rep = cuteness_check(s0, s1, budget=0)
                w = witness_M(x, z, grid)
                bound = discretization_bound(grid, nz)
                dev = max(abs(w.distances[0] - nz), abs(w.distances[1] - nz))
                worst = max(worst, dev / bound)
                good = rep.not_cute and dev <= bound and w.separation > DISTINCT_FACTOR * w.notes["tol"]
                ok &= good
                lens_cases += 1
    parts.append(f"{lens_cases} lens translate pairs not_cute via witness_M, worst deviation {worst:.2f} x bound")
    report(5, "cute pairs", ok, "; ".join(parts))


def test_tangent_lens_witness():
    ok, cases, worst = True, 0, 0.0
    for dim in (2, 3):
        grid, rng = _grid(dim), np.random.default_rng(600 + dim)
        while cases < 50 * (dim - 1):
            s0 = sample_support(_random_body(rng, dim), grid)
            g = RigidMotion.random(dim, rng, scale=0.0)
            g = RigidMotion(g.linear, float(rng.uniform(6.5, 10.0)) * _unit(rng, dim))
            s1 = sample_support(_random_body(rng, dim).moved(g), grid)
            d = hausdorff(s0, s1)
            if d < 4.0:
                continue
            w = tangent_lens(s0, s1)
            bound = discretization_bound(grid, d / 2)
            dev = max(abs(w.distances[0] - d / 2), abs(w.distances[1] - d / 2))
            worst = max(worst, dev / bound)
            ok &= dev <= bound
            cases += 1
    report(6, "tangent lens", ok, f"{cases} far pairs in dims 2 and 3, worst deviation {worst:.2f} x bound")


def test_reconstruction():
    grid = make_grid(2, 512)
    x = np.array([0.6, 0.0])
    lens = make_lens_2d(LensSpec(x, -x))
    h = sample_arcs(lens, grid).values  # exact arc supports, not the generator kernel
    errors, below = [], 0.0
    for n in (11, 21, 41):
        rec = reconstruct_from_distances(lambda y: point_distance_2d(y, lens), probe_lattice(2, n), grid)
        errors.append(float(np.max(np.abs(rec.values - h))))
        below = max(below, float(np.max(h - rec.values)))
    monotone = errors[0] > errors[1] > errors[2]
    ok = errors[-1] <= 0.05 and monotone and below <= EXACT
    report(7, "reconstruction", ok,
           "errors " + ", ".join(f"{n}^2 {e:.2e}" for n, e in zip((11, 21, 41), errors))
           + f" (tol 0.05), monotone {monotone}, max(h_K - h_rec) {below:.1e}")


def test_classifier_round_trip():
    ok, parts = True, []
    for dim in (2, 3):
        grid, rng = _grid(dim), np.random.default_rng(800 + dim)
        worst_motion, worst_ratio, wrong, improper = 0.0, 0.0, 0, 0
        for i in range(200):
            proper = bool(rng.integers(2))
            mode = ("identity", "c")[int(rng.integers(2))]
            g = RigidMotion.random(dim, rng, proper=proper)
            improper += not proper
            rep = recover(make_synthetic_oracle(SyntheticOracleSpec(g, mode, seed=i), grid))
            if not rep.classified or rep.mode != mode:
                wrong += 1
                continue
            worst_motion = max(worst_motion, *motion_error(rep.g, g))
            worst_ratio = max(worst_ratio, rep.residual / rep.tol_verify)
        good = wrong == 0 and worst_motion <= 1e-6 and worst_ratio <= 1.0
        ok &= good
        parts.append(f"dim {dim}: 200 oracles ({improper} improper), {wrong} misclassified, "
                     f"motion error {worst_motion:.1e}, residual/tol_verify {worst_ratio:.1e}")
        scale = recover(make_adversarial_oracle("scale", grid))
        mixed = recover(make_adversarial_oracle("mixed", grid))
        good = (scale.reason == "not distance preserving on points" and mixed.reason == "not point-rigid")
        ok &= good
        parts.append(f"dim {dim} adversarial: scale '{scale.reason}', mixed '{mixed.reason}'")
    report(8, "classifier round trip", ok, "; ".join(parts))


def test_witness_p_audit():
    ok, outcomes, worst = True, [], 0.0
    for nx in (0.3, 0.6, 0.9):
        for nz in (2.0, 3.0):
            w = witness_P(np.array([nx, 0.0]), np.array([0.0, nz]))
            bound = w.notes["bound"]
            dev = max(abs(w.distances[0] - nz), abs(w.distances[1] - nz))
            worst = max(worst, dev / bound)
            ok &= dev <= bound and w.notes["contains_L"] and w.notes["strict"]
            outcomes.append(w.in_sn)
    counts = {k: outcomes.count(k) for k in sorted(set(outcomes))}
    report(9, "witness P audit", ok,
           f"6 corner cases, worst deviation {worst:.2f} x bound, P strictly contains L, membership {counts}")
