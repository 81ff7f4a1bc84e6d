"""Shared fixtures and the independent brute-force support oracle."""

import numpy as np
import pytest

from ballbody.geom import make_grid, min_enclosing_ball


def brute_force_support(points, u, n_samples=20000, refine_steps=3000, seed=0):
    """Lower estimate of max <y, u> over the intersection of the unit balls at ``points``.

    Rejection sampling in a ball containing the body, then a random local
    search that only ever accepts feasible points. Shares no code with the
    kernel's active-set enumeration.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    u = np.asarray(u, dtype=float)
    rng = np.random.default_rng(seed)
    dim = pts.shape[1]
    centre = min_enclosing_ball(pts).center  # feasible because the circumradius is <= 1

    def feasible(y):
        return np.all(np.linalg.norm(y[:, None, :] - pts[None], axis=-1) <= 1.0, axis=1)

    v = rng.standard_normal((n_samples, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    cand = pts[0] + v * rng.uniform(0, 1, (n_samples, 1)) ** (1.0 / dim)
    cand = np.vstack([centre, cand[feasible(cand)]])
    best = cand[np.argmax(cand @ u)]
    step = 0.1
    for _ in range(refine_steps):
        trial = best + step * rng.standard_normal((16, dim))
        ok = trial[feasible(trial)]
        if len(ok) and np.max(ok @ u) > best @ u:
            best = ok[np.argmax(ok @ u)]
        else:
            step *= 0.97
        if step < 1e-7:
            break
    return float(best @ u), best


def random_generators(rng, dim, k=None, spread=1.0):
    """Random generator set with circumradius at most 1."""
    k = int(rng.integers(1, 7)) if k is None else k
    c = rng.uniform(-spread, spread, dim)
    v = rng.standard_normal((k, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return c + v * rng.uniform(0, 0.98, (k, 1))


@pytest.fixture
def grid2():
    return make_grid(2, 512)


@pytest.fixture
def grid3():
    return make_grid(3, 24)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One line per acceptance criterion, repeated in the terminal summary so the
# verdicts are visible even when output capture is on.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
