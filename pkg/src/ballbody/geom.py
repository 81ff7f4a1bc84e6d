"""Euclidean primitives: sphere grids, rigid motions, enclosing balls, Procrustes fits.

Points are plain ``numpy`` float arrays of shape ``(dim,)``; point lists are
arrays of shape ``(n, dim)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .errors import DegenerateError, DimensionError, RankError

MIN_DIM = 2
MAX_DIM = 8


def as_points(points, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite ``(n, dim)`` float array."""
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.ndim != 2:
        raise DimensionError(f"expected a list of points, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionError(f"expected dim {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must have finite coordinates")
    return arr


def check_dim(dim: int) -> None:
    if not (MIN_DIM <= dim <= MAX_DIM):
        raise DimensionError(f"dim must be in [{MIN_DIM}, {MAX_DIM}], got {dim}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# Sphere grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Antipodally closed set of unit directions.

    ``directions[pairing[i]] == -directions[i]`` holds bitwise. The first half
    of ``directions`` is a hemisphere, the second half its negation.
    ``mesh`` is the covering radius (chordal distance from any unit vector to
    the nearest direction): exact in the plane, a dense-probe estimate above.
    """

    dim: int
    resolution: int
    seed: int
    directions: np.ndarray
    pairing: np.ndarray
    mesh: float

    def __len__(self) -> int:
        return len(self.directions)

    @property
    def mesh_angle(self) -> float:
        """Covering radius measured as a geodesic angle."""
        return 2.0 * math.asin(min(1.0, self.mesh / 2.0))

    def same_as(self, other: "SphereGrid") -> bool:
        if self is other:
            return True
        return (
            self.dim == other.dim
            and len(self) == len(other)
            and np.array_equal(self.directions, other.directions)
        )

    def nearest(self, u) -> int:
        """Index of the grid direction closest to ``u``."""
        u = np.asarray(u, dtype=float)
        return int(np.argmax(self.directions @ u))

    def index_of(self, u, atol: float = 1e-12) -> int | None:
        """Index of ``u`` in the grid, or None when ``u`` is not a grid direction."""
        i = self.nearest(u)
        if np.max(np.abs(self.directions[i] - u)) <= atol:
            return i
        return None


def _fibonacci_hemisphere(m: int) -> np.ndarray:
    k = np.arange(m) + 0.5
    z = k / m
    r = np.sqrt(1.0 - z * z)
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _lloyd_hemisphere(dim: int, m: int, rng: np.random.Generator, iters: int = 8) -> np.ndarray:
    centers = rng.standard_normal((m, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    n_samples = 12 * m
    for _ in range(iters):
        samples = rng.standard_normal((n_samples, dim))
        samples /= np.linalg.norm(samples, axis=1, keepdims=True)
        tree = cKDTree(np.vstack([centers, -centers]))
        _, idx = tree.query(samples)
        sign = np.where(idx < m, 1.0, -1.0)
        owner = idx % m
        acc = np.zeros_like(centers)
        np.add.at(acc, owner, samples * sign[:, None])
        norms = np.linalg.norm(acc, axis=1)
        keep = norms > 0
        centers[keep] = acc[keep] / norms[keep, None]
    return centers


def _probe_mesh(directions: np.ndarray, seed: int, n_probes: int = 40000) -> float:
    dim = directions.shape[1]
    rng = np.random.default_rng([seed, 0x6D657368])
    probes = rng.standard_normal((n_probes, dim))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    dist, _ = cKDTree(directions).query(probes)
    return float(dist.max())


@functools.lru_cache(maxsize=64)
def make_grid(dim: int, resolution: int, seed: int = 0) -> SphereGrid:
    """Build a negation-closed direction grid.

    In the plane this is the uniform angular grid of ``2 * resolution``
    directions starting at ``e1`` (``seed`` is unused). In dim 3 a Fibonacci
    hemisphere of ``resolution**2`` points is rotated by a seeded random
    rotation; above dim 3 a seeded antipodal spherical k-means set of
    ``resolution**(dim-1)`` points is used. Either way the hemisphere is
    stored and emitted with both signs.
    """
    check_dim(dim)
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    if dim == 2:
        theta = np.pi * np.arange(resolution) / resolution
        half = np.column_stack([np.cos(theta), np.sin(theta)])
        half[np.abs(half) < 1e-15] = 0.0
        mesh = 2.0 * math.sin(math.pi / (4 * resolution))
    else:
        m = resolution ** (dim - 1)
        rng = np.random.default_rng(seed)
        if dim == 3:
            half = _fibonacci_hemisphere(m)
            if seed != 0:
                half = Rotation.random(random_state=seed).apply(half)
        else:
            half = _lloyd_hemisphere(dim, m, rng)
        half /= np.linalg.norm(half, axis=1, keepdims=True)
        mesh = None
    directions = np.vstack([half, -half])
    m = len(half)
    pairing = (np.arange(2 * m) + m) % (2 * m)
    if mesh is None:
        mesh = _probe_mesh(directions, seed)
    return SphereGrid(dim, resolution, seed, _frozen(directions), _frozen(pairing), float(mesh))


# ---------------------------------------------------------------------------
# Rigid motions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RigidMotion:
    """x -> linear @ x + translation with ``linear`` orthogonal (det = +1 or -1)."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if lin.ndim != 2 or lin.shape[0] != lin.shape[1] or t.shape != (lin.shape[0],):
            raise DimensionError("linear must be (d, d) and translation (d,)")
        if np.max(np.abs(lin.T @ lin - np.eye(len(t)))) > 1e-10:
            raise ValueError("linear part is not orthogonal")
        object.__setattr__(self, "linear", _frozen(lin))
        object.__setattr__(self, "translation", _frozen(t))

    @property
    def dim(self) -> int:
        return len(self.translation)

    @property
    def orientation(self) -> int:
        return 1 if np.linalg.det(self.linear) > 0 else -1

    @classmethod
    def identity(cls, dim: int) -> "RigidMotion":
        return cls(np.eye(dim), np.zeros(dim))

    @classmethod
    def translation_by(cls, t) -> "RigidMotion":
        t = np.asarray(t, dtype=float)
        return cls(np.eye(len(t)), t)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, proper: bool | None = None,
               scale: float = 3.0) -> "RigidMotion":
        """Haar-random orthogonal part plus a Gaussian translation."""
        q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
        q = q * np.sign(np.diag(r))
        if proper is not None and (np.linalg.det(q) > 0) != proper:
            q[:, 0] = -q[:, 0]
        return cls(q, scale * rng.standard_normal(dim))

    def __call__(self, x) -> np.ndarray:
        return apply_motion(self, x)


def apply_motion(g: RigidMotion, x) -> np.ndarray:
    """Apply ``g`` to a point ``(d,)`` or to a point list ``(n, d)``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != g.dim:
        raise DimensionError(f"motion has dim {g.dim}, point has dim {x.shape[-1]}")
    return x @ g.linear.T + g.translation


def compose(g1: RigidMotion, g2: RigidMotion) -> RigidMotion:
    """The motion x -> g1(g2(x))."""
    if g1.dim != g2.dim:
        raise DimensionError("cannot compose motions of different dimensions")
    return RigidMotion(g1.linear @ g2.linear, g1.linear @ g2.translation + g1.translation)


def invert(g: RigidMotion) -> RigidMotion:
    return RigidMotion(g.linear.T, -(g.linear.T @ g.translation))


class MotionFit(NamedTuple):
    motion: RigidMotion
    rms: float
    max_residual: float


def fit_motion(sources, targets) -> MotionFit:
    """Least-squares orthogonal-plus-translation map sending sources to targets.

    Reflections are allowed (orthogonal Procrustes without the determinant
    correction of Kabsch).
    """
    src = as_points(sources)
    dst = as_points(targets, src.shape[1])
    if len(src) != len(dst):
        raise ValueError("sources and targets must have equal length")
    dim = src.shape[1]
    if len(src) < dim + 1:
        raise RankError(f"need at least {dim + 1} points in dim {dim}")
    sc, dc = src.mean(axis=0), dst.mean(axis=0)
    s0, d0 = src - sc, dst - dc
    sv = np.linalg.svd(s0, compute_uv=False)
    if sv[-1] <= 1e-9 * max(1.0, sv[0]):
        raise RankError("source points are affinely dependent")
    u, _, vt = np.linalg.svd(s0.T @ d0)
    lin = vt.T @ u.T
    # re-orthogonalise against rounding
    uu, _, vv = np.linalg.svd(lin)
    lin = uu @ vv
    g = RigidMotion(lin, dc - lin @ sc)
    res = np.linalg.norm(apply_motion(g, src) - dst, axis=1)
    return MotionFit(g, float(np.sqrt(np.mean(res ** 2))), float(res.max()))


# ---------------------------------------------------------------------------
# Minimum enclosing ball
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallFit:
    center: np.ndarray
    radius: float


def circumball(points) -> BallFit:
    """Smallest ball having all (at most dim+1) points on its boundary.

    The center is taken in the affine hull of the points.
    """
    pts = as_points(points)
    p0 = pts[0]
    if len(pts) == 1:
        return BallFit(p0.copy(), 0.0)
    b = pts[1:] - p0
    gram = b @ b.T
    rhs = 0.5 * np.diag(gram)
    alpha, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    c = p0 + alpha @ b
    return BallFit(c, float(np.max(np.linalg.norm(pts - c, axis=1))))


def _welzl(pts: np.ndarray, n: int, boundary: list, dim: int) -> BallFit:
    if n == 0 or len(boundary) == dim + 1:
        if not boundary:
            return BallFit(np.zeros(dim), -1.0)
        return circumball(np.array(boundary))
    ball = _welzl(pts, n - 1, boundary, dim)
    p = pts[n - 1]
    if ball.radius >= 0 and np.linalg.norm(p - ball.center) <= ball.radius * (1 + 1e-12) + 1e-12:
        return ball
    return _welzl(pts, n - 1, boundary + [p], dim)


def min_enclosing_ball(points) -> BallFit:
    """Smallest enclosing ball (Welzl's randomized algorithm, any dimension)."""
    pts = as_points(points)
    if len(pts) == 0:
        raise ValueError("min_enclosing_ball of an empty point list")
    pts = np.unique(pts, axis=0)
    dim = pts.shape[1]
    order = np.random.default_rng(len(pts)).permutation(len(pts))
    ball = _welzl(pts[order], len(pts), [], dim)
    radius = float(np.max(np.linalg.norm(pts - ball.center, axis=1)))
    return BallFit(ball.center, radius)


# ---------------------------------------------------------------------------
# Planar circle intersections
# ---------------------------------------------------------------------------

def circle_pair_points(c1, r1: float, c2, r2: float, tol: float = 1e-12) -> list[np.ndarray]:
    """Intersection points of two circles in the plane (0, 1 or 2 points)."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if c1.shape != (2,) or c2.shape != (2,):
        raise DimensionError("circle_pair_points works in the plane only")
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    delta = c2 - c1
    d = float(np.hypot(*delta))
    if d <= tol:
        if abs(r1 - r2) <= tol:
            raise DegenerateError("identical concentric circles")
        return []
    if d > r1 + r2 + tol or d < abs(r1 - r2) - tol:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    h2 = r1 * r1 - a * a
    e = delta / d
    base = c1 + a * e
    if h2 <= (tol * max(1.0, r1)) ** 2:
        return [base]
    h = math.sqrt(h2)
    n = np.array([-e[1], e[0]])
    return [base + h * n, base - h * n]
