import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballbody.errors import DegenerateError, DimensionError, RankError
from ballbody.geom import (
    RigidMotion,
    apply_motion,
    circle_pair_points,
    circumball,
    compose,
    fit_motion,
    invert,
    make_grid,
    min_enclosing_ball,
)


@pytest.mark.parametrize("dim,res", [(2, 16), (2, 512), (3, 8), (3, 24), (4, 4)])
def test_grid_is_negation_closed(dim, res):
    g = make_grid(dim, res)
    assert np.allclose(np.linalg.norm(g.directions, axis=1), 1.0, atol=1e-14)
    assert np.array_equal(g.directions[g.pairing], -g.directions)
    assert np.array_equal(g.pairing[g.pairing], np.arange(len(g)))


def test_planar_grid_mesh_is_exact():
    g = make_grid(2, 64)
    assert len(g) == 128
    assert g.mesh == pytest.approx(2 * math.sin(math.pi / 256), rel=1e-15)
    # the worst-covered direction is halfway between neighbours
    phi = math.pi / 128
    assert np.min(np.linalg.norm(g.directions - [math.cos(phi), math.sin(phi)], axis=1)) == pytest.approx(g.mesh)


def test_grid_mesh_estimate_covers_random_directions():
    g = make_grid(3, 16)
    rng = np.random.default_rng(7)
    u = rng.standard_normal((5000, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    d = np.min(np.linalg.norm(u[:, None] - g.directions[None], axis=-1), axis=1)
    assert d.max() <= g.mesh * 1.05


def test_grid_is_deterministic_and_seeded():
    a, b = make_grid(3, 10, seed=3), make_grid(3, 10, seed=3)
    assert np.array_equal(a.directions, b.directions)
    assert not np.array_equal(make_grid(3, 10, seed=4).directions, a.directions)


def test_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        make_grid(2, 1)
    with pytest.raises(DimensionError):
        make_grid(1, 10)
    with pytest.raises(DimensionError):
        make_grid(9, 2)


def test_grid_lookup():
    g = make_grid(2, 8)
    assert g.index_of(np.array([1.0, 0.0])) == 0
    assert g.index_of(np.array([math.cos(0.1), math.sin(0.1)])) is None
    assert g.nearest(np.array([math.cos(0.1), math.sin(0.1)])) == 0


def test_rigid_motion_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        RigidMotion(np.array([[1.0, 0.1], [0.0, 1.0]]), np.zeros(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_compose_and_invert(dim, seed):
    rng = np.random.default_rng(seed)
    g, h = RigidMotion.random(dim, rng), RigidMotion.random(dim, rng)
    x = rng.standard_normal((5, dim))
    assert np.allclose(compose(g, h)(x), g(h(x)), atol=1e-12)
    assert np.allclose(invert(g)(g(x)), x, atol=1e-12)
    assert np.allclose(apply_motion(g, x), g(x))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1), st.booleans())
def test_fit_motion_recovers_exact_motion(dim, seed, proper):
    rng = np.random.default_rng(seed)
    g = RigidMotion.random(dim, rng, proper=proper)
    src = rng.standard_normal((dim + 3, dim)) * 3
    fit = fit_motion(src, g(src))
    assert np.max(np.abs(fit.motion.linear - g.linear)) <= 1e-9
    assert np.linalg.norm(fit.motion.translation - g.translation) <= 1e-9
    assert fit.motion.orientation == (1 if proper else -1)
    assert fit.rms <= 1e-9


def test_fit_motion_needs_affinely_spanning_sources():
    with pytest.raises(RankError):
        fit_motion(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(RankError):
        src = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        fit_motion(src, src)


def _brute_enclosing_radius(pts):
    # smallest circumball of subsets of size <= dim+1 that encloses every point
    best = np.inf
    dim = pts.shape[1]
    for k in range(1, dim + 2):
        for sub in itertools.combinations(range(len(pts)), k):
            try:
                fit = circumball(pts[list(sub)])
            except DegenerateError:
                continue
            if np.all(np.linalg.norm(pts - fit.center, axis=1) <= fit.radius + 1e-9):
                best = min(best, fit.radius)
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.integers(1, 7), st.integers(0, 2**31 - 1))
def test_min_enclosing_ball_matches_subset_search(dim, n, seed):
    pts = np.random.default_rng(seed).standard_normal((n, dim))
    fit = min_enclosing_ball(pts)
    assert np.all(np.linalg.norm(pts - fit.center, axis=1) <= fit.radius + 1e-9)
    assert fit.radius == pytest.approx(_brute_enclosing_radius(pts), abs=1e-9)


def test_min_enclosing_ball_examples():
    assert min_enclosing_ball(np.array([[0.0, 0.0]])).radius == 0
    fit = min_enclosing_ball(np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 0.5]]))
    assert fit.radius == pytest.approx(1.0)
    assert np.allclose(fit.center, 0.0)
    with pytest.raises(ValueError):
        min_enclosing_ball(np.zeros((0, 2)))


def test_circumball_of_triangle():
    fit = circumball(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]))
    assert np.allclose(fit.center, 0.0, atol=1e-12)
    assert fit.radius == pytest.approx(1.0)


def test_circle_pair_points():
    pts = circle_pair_points([-0.6, 0.0], 1.0, [0.6, 0.0], 1.0)
    assert len(pts) == 2
    assert sorted(round(p[1], 12) for p in pts) == [-0.8, 0.8]
    assert len(circle_pair_points([-1.0, 0.0], 1.0, [1.0, 0.0], 1.0)) == 1
    assert circle_pair_points([-2.0, 0.0], 0.5, [2.0, 0.0], 0.5) == []
    with pytest.raises(DegenerateError):
        circle_pair_points([0.0, 0.0], 1.0, [0.0, 0.0], 1.0)
    with pytest.raises(DimensionError):
        circle_pair_points([0.0, 0.0, 0.0], 1.0, [1.0, 0.0, 0.0], 1.0)
