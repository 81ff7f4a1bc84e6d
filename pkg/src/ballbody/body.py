"""Bodies in the class of intersections of unit balls, and their metric kernel.

Two representations are used:

* :class:`GeneratorSet` -- finitely many centers ``P``. With ``hull=False`` it
  encodes ``K = P^c``, the intersection of the unit balls ``p + B``. With
  ``hull=True`` it encodes ``K = P^cc``, the ball hull of ``P``.
* :class:`SupportSample` -- support-function values on a negation-closed
  :class:`~ballbody.geom.SphereGrid`.

Generator sets lower to samples; everything else (duality, averages,
Hausdorff distance) happens on samples, where the duality is the pointwise
antipodal formula ``h_{K^c}(u) = 1 - h_K(-u)``.
"""

from __future__ import annotations

import functools
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    ConvergenceError,
    DimensionError,
    EmptyBody,
    GridMismatch,
    NotBallBody,
)
from .geom import BallFit, SphereGrid, apply_motion, as_points, check_dim, circumball, min_enclosing_ball

TOL_SUPPORT = 1e-8
RADIUS_TOL = 1e-9
MAX_ACTIVE_SETS = 50_000


class OffGridWarning(UserWarning):
    """A direction was not found in the grid; the nearest grid direction was used."""


# ---------------------------------------------------------------------------
# Generator sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeneratorSet:
    points: np.ndarray
    hull: bool = False

    def __post_init__(self):
        pts = as_points(self.points)
        check_dim(pts.shape[1])
        if len(pts) == 0:
            raise EmptyBody("generator set is empty")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def dual(self) -> "GeneratorSet":
        """Generators of the c-dual body (``P^c`` and ``P^cc`` swap)."""
        return GeneratorSet(self.points, not self.hull)

    def moved(self, g) -> "GeneratorSet":
        """Image under a rigid motion; exact because motions commute with both constructions."""
        return GeneratorSet(apply_motion(g, self.points), self.hull)

    @classmethod
    def point(cls, x) -> "GeneratorSet":
        """The singleton ``{x}`` as the intersection of two tangent unit balls."""
        x = np.asarray(x, dtype=float)
        e = np.zeros_like(x)
        e[0] = 1.0
        return cls(np.array([x - e, x + e]))

    @classmethod
    def ball(cls, x) -> "GeneratorSet":
        return cls(np.atleast_2d(np.asarray(x, dtype=float)))


def validate(body: GeneratorSet) -> BallFit:
    """Circumball of the generators; raises :class:`EmptyBody` if the radius exceeds 1."""
    fit = min_enclosing_ball(body.points)
    if fit.radius > 1 + RADIUS_TOL:
        raise EmptyBody(f"circumradius {fit.radius:.12g} > 1")
    return fit


def simplify(body: GeneratorSet) -> GeneratorSet:
    """Canonical generators when the body is a point or a unit ball, else the body itself.

    ``P^c`` is the point at the circumcenter when the circumradius is 1, and
    the hull of a single point is the point; dually for balls.
    """
    fit = validate(body)
    if len(body.points) == 1:
        c = body.points[0]
    elif fit.radius >= 1 - RADIUS_TOL:
        c = fit.center
    else:
        return body
    # one generator: P^c is a ball, P^cc the point; circumradius 1: the reverse
    is_point = body.hull if len(body.points) == 1 else not body.hull
    return GeneratorSet.point(c) if is_point else GeneratorSet.ball(c)


@dataclass(frozen=True)
class _ActiveSet:
    center: np.ndarray
    lift: float          # distance from center to the sphere-intersection points
    basis: np.ndarray    # orthonormal basis of the direction space of the affine hull


def _active_sets(points: np.ndarray) -> list[_ActiveSet]:
    m, dim = points.shape
    kmax = min(m, dim + 1)
    total = sum(math.comb(m, k) for k in range(1, kmax + 1))
    if total > MAX_ACTIVE_SETS:
        raise ValueError(f"{total} active sets is too many for enumeration; use method='iterative'")
    sets = []
    for k in range(1, kmax + 1):
        for combo in itertools.combinations(range(m), k):
            a = points[list(combo)]
            if k == 1:
                sets.append(_ActiveSet(a[0], 1.0, np.zeros((0, dim))))
                continue
            _, sv, vt = np.linalg.svd(a[1:] - a[0])
            if sv[-1] <= 1e-10:
                continue
            ball = circumball(a)
            if ball.radius > 1 + RADIUS_TOL:
                continue
            lift = 0.0 if ball.radius > 1 - 1e-12 else math.sqrt(1.0 - ball.radius ** 2)
            if k == dim + 1 and lift > 1e-6:
                continue
            sets.append(_ActiveSet(ball.center, lift, vt[: k - 1]))
    return sets


@functools.lru_cache(maxsize=256)
def _active_sets_cached(key: bytes, shape: tuple) -> list[_ActiveSet]:
    return _active_sets(np.frombuffer(key, dtype=float).reshape(shape))


def _enumerate_support(points: np.ndarray, dirs: np.ndarray, feas_tol: float = 1e-9):
    """Exact maximisation of <y, u> over the intersection of unit balls.

    The maximiser lies on the spheres of some affinely independent active
    set A and equals ``c_A + sqrt(1 - R_A^2) * u_perp / |u_perp|``, where
    ``c_A, R_A`` is the circumball of A and ``u_perp`` the component of u
    orthogonal to A's affine hull. Every feasible candidate is a lower bound
    and the true maximiser is among them, so the best feasible one wins.
    """
    sets = _active_sets_cached(points.tobytes(), points.shape)
    n = len(dirs)
    best = np.full(n, -np.inf)
    arg = np.zeros_like(dirs)
    lim = (1.0 + feas_tol) ** 2
    for s in sets:
        if s.lift > 0:
            perp = dirs - (dirs @ s.basis.T) @ s.basis
            norm = np.linalg.norm(perp, axis=1)
            ok = norm > 1e-12
            y = s.center + s.lift * perp / np.where(ok, norm, 1.0)[:, None]
        else:
            ok = np.ones(n, dtype=bool)
            y = np.broadcast_to(s.center, dirs.shape)
        d2 = ((y[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
        ok &= np.all(d2 <= lim, axis=1)
        val = np.einsum("ij,ij->i", y, dirs)
        better = ok & (val > best)
        best[better] = val[better]
        arg[better] = y[better]
    if not np.all(np.isfinite(best)):
        raise EmptyBody("no feasible support candidate; is the generator set valid?")
    return best, arg


def _iterative_support(points: np.ndarray, u: np.ndarray, x0, tol: float, maxiter: int = 10_000):
    """Log-barrier Newton ascent from a strictly feasible ``x0``.

    Maximises ``<u, y> + mu * sum(log(1 - |y - p|^2))`` for mu decreasing to
    1e-14; the value gap at the end is below ``len(points) * mu``.
    """
    y = np.array(x0, dtype=float)
    if np.max(np.sum((y - points) ** 2, axis=1)) >= 1.0:
        raise ValueError("x0 must lie in the interior of the body")
    dim = len(y)
    mu = 1.0
    steps = 0
    while mu > 1e-14:
        for _ in range(200):
            steps += 1
            if steps > maxiter:
                raise ConvergenceError(f"barrier ascent exceeded {maxiter} Newton steps")
            diff = y - points
            slack = 1.0 - np.sum(diff * diff, axis=1)
            grad = -u + mu * np.sum(2 * diff / slack[:, None], axis=0)
            hess = mu * (2 * np.sum(1 / slack) * np.eye(dim)
                         + 4 * np.einsum("i,ij,ik->jk", 1 / slack ** 2, diff, diff))
            step = -np.linalg.solve(hess, grad)
            decrement = float(-grad @ step)
            t = 1.0
            while np.max(np.sum((y + t * step - points) ** 2, axis=1)) >= 1.0:
                t *= 0.5
                if t < 1e-30:
                    raise ConvergenceError("barrier line search stalled")
            f0 = -u @ y - mu * np.sum(np.log(slack))
            while True:
                yt = y + t * step
                ft = -u @ yt - mu * np.sum(np.log(1.0 - np.sum((yt - points) ** 2, axis=1)))
                if ft <= f0 - 0.25 * t * decrement or t < 1e-30:
                    break
                t *= 0.5
            y = yt
            if decrement < 1e-20 + 1e-3 * mu:
                break
        mu *= 0.1
    if np.max(np.linalg.norm(points - y, axis=1)) > 1.0 + tol:
        raise ConvergenceError("barrier ascent left the body")
    return float(u @ y), y


def support_value(body: GeneratorSet, u, tol: float = TOL_SUPPORT, method: str = "enumerate",
                  x0=None) -> tuple[float, np.ndarray]:
    """Support value ``h_K(u)`` and the supporting point of the encoded body.

    ``method="enumerate"`` is exact up to rounding. ``method="iterative"``
    runs a barrier Newton ascent from the interior point ``x0`` (default:
    the generators' circumcenter) and is meant for cross-checks.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (body.dim,):
        raise DimensionError(f"direction has shape {u.shape}, body has dim {body.dim}")
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    validate(body)
    pts = body.points
    if body.hull:
        h, y = support_value(GeneratorSet(pts), -u, tol, method, x0)
        return 1.0 - h, y + u
    if method == "enumerate":
        h, y = _enumerate_support(pts, u[None, :])
        return float(h[0]), y[0]
    if method == "iterative":
        if x0 is None:
            x0 = min_enclosing_ball(pts).center
        return _iterative_support(pts, u, np.asarray(x0, dtype=float), tol)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Support samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SupportSample:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise GridMismatch(f"{v.shape[0]} values for a grid of {len(self.grid)} directions")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def widths(self) -> np.ndarray:
        return self.values + self.values[self.grid.pairing]

    def is_ball_body(self, tol: float = TOL_SUPPORT) -> bool:
        w = self.widths()
        return bool(np.all(w <= 2 + 2 * tol) and np.all(w >= -2 * tol))

    def radius_bound(self) -> float:
        """Upper estimate of max |x| over the body (the support function's slope bound)."""
        return float(np.max(np.abs(self.values))) / max(1e-12, 1.0 - self.grid.mesh)


def _same_grid(s0: SupportSample, s1: SupportSample) -> None:
    if not s0.grid.same_as(s1.grid):
        raise GridMismatch("samples live on different grids")


def sample_support(body: GeneratorSet, grid: SphereGrid, tol: float = TOL_SUPPORT) -> SupportSample:
    """Support values of a generator body on every grid direction."""
    if body.dim != grid.dim:
        raise DimensionError(f"body dim {body.dim} != grid dim {grid.dim}")
    validate(body)
    h, _ = _enumerate_support(body.points, grid.directions)
    if body.hull:
        h = 1.0 - h[grid.pairing]
    return SupportSample(grid, h)


def support_values(body: GeneratorSet, dirs) -> np.ndarray:
    """Support values for an arbitrary ``(n, dim)`` array of unit directions."""
    dirs = as_points(dirs, body.dim)
    validate(body)
    if body.hull:
        return 1.0 - _enumerate_support(body.points, -dirs)[0]
    return _enumerate_support(body.points, dirs)[0]


def supporting_points(body: GeneratorSet, grid: SphereGrid) -> np.ndarray:
    """Supporting point for every grid direction, shape ``(len(grid), dim)``."""
    validate(body)
    if body.hull:
        _, y = _enumerate_support(body.points, -grid.directions)
        return y + grid.directions
    _, y = _enumerate_support(body.points, grid.directions)
    return y


def point_sample(x, grid: SphereGrid) -> SupportSample:
    return SupportSample(grid, grid.directions @ np.asarray(x, dtype=float))


def ball_sample(x, grid: SphereGrid, radius: float = 1.0) -> SupportSample:
    return SupportSample(grid, grid.directions @ np.asarray(x, dtype=float) + radius)


def c_transform(s: SupportSample, tol: float = TOL_SUPPORT) -> SupportSample:
    """Sample of the c-dual body: ``1 - h(-u)`` at every grid direction."""
    if not s.is_ball_body(tol):
        w = s.widths()
        raise NotBallBody(f"width range [{w.min():.6g}, {w.max():.6g}] outside [0, 2]")
    return SupportSample(s.grid, 1.0 - s.values[s.grid.pairing])


def minkowski_combine(s0: SupportSample, s1: SupportSample, lam: float) -> SupportSample:
    """Sample of ``(1 - lam) K0 + lam K1``."""
    _same_grid(s0, s1)
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    return SupportSample(s0.grid, (1.0 - lam) * s0.values + lam * s1.values)


def average(s0: SupportSample, s1: SupportSample) -> SupportSample:
    return minkowski_combine(s0, s1, 0.5)


def hausdorff(s0: SupportSample, s1: SupportSample) -> float:
    """Grid Hausdorff distance: the sup-norm of the support difference over the grid."""
    _same_grid(s0, s1)
    return float(np.max(np.abs(s0.values - s1.values)))


def discretization_bound(grid: SphereGrid, value: float, curvature: float = 1.0) -> float:
    """How far a grid Hausdorff value can sit below the true one.

    For bodies whose boundary curvature radii are at most ``curvature`` the
    support difference f restricted to great circles satisfies
    ``|f''| <= curvature + |f|``. At the true maximiser f' = 0, so a grid
    direction at angle ``a`` loses at most ``(curvature + |f|) a^2 / 2``.
    """
    a2 = 0.5 * grid.mesh_angle ** 2
    return a2 * (curvature + value) / max(1e-12, 1.0 - a2 * max(1.0, curvature))


def lipschitz_bound(s0: SupportSample, s1: SupportSample) -> float:
    """First-order bound ``Lip * mesh`` valid for arbitrary convex bodies."""
    return (s0.radius_bound() + s1.radius_bound()) * s0.grid.mesh_angle


def hausdorff_with_bound(s0: SupportSample, s1: SupportSample, curvature: float = 1.0):
    d = hausdorff(s0, s1)
    return d, discretization_bound(s0.grid, d, curvature)


def point_distance(x, s: SupportSample) -> float:
    """Hausdorff distance from ``{x}`` to the body: its farthest-point distance."""
    x = np.asarray(x, dtype=float)
    if x.shape != (s.dim,):
        raise DimensionError(f"point has shape {x.shape}, sample has dim {s.dim}")
    return float(np.max(s.values - s.grid.directions @ x))


def point_distances(xs, s: SupportSample) -> np.ndarray:
    """Vectorised :func:`point_distance` over a point list."""
    xs = as_points(xs, s.dim)
    return np.max(s.values[None, :] - xs @ s.grid.directions.T, axis=1)


def cc_hull(points, grid: SphereGrid, tol: float = TOL_SUPPORT) -> SupportSample:
    """Sample of the ball hull ``P^cc``: the smallest body of the class containing P."""
    return sample_support(GeneratorSet(points, hull=True), grid, tol)


# ---------------------------------------------------------------------------
# Lenses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LensSpec:
    center_a: np.ndarray
    center_b: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.center_a, dtype=float)
        b = np.asarray(self.center_b, dtype=float)
        if a.shape != b.shape:
            raise DimensionError("lens centers differ in dimension")
        if self.radius <= 0:
            raise ValueError("lens radius must be positive")
        if np.linalg.norm(a - b) > 2 * self.radius * (1 + RADIUS_TOL):
            raise EmptyBody("lens balls do not meet")
        object.__setattr__(self, "center_a", a)
        object.__setattr__(self, "center_b", b)

    @property
    def kind(self) -> str:
        """``"point"``, ``"ball"`` or ``"proper"``."""
        gap = np.linalg.norm(self.center_a - self.center_b)
        if gap <= 1e-12 * self.radius:
            return "ball"
        if gap >= 2 * self.radius * (1 - RADIUS_TOL):
            return "point"
        return "proper"

    @property
    def is_proper(self) -> bool:
        return self.kind == "proper"


def make_lens(spec: LensSpec, grid: SphereGrid) -> SupportSample:
    r = spec.radius
    if spec.kind == "point":
        return point_sample((spec.center_a + spec.center_b) / 2, grid)
    gens = GeneratorSet(np.array([spec.center_a, spec.center_b]) / r)
    return SupportSample(grid, r * sample_support(gens, grid).values)


# ---------------------------------------------------------------------------
# Supporting points and motions on samples
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=16)
def _fd_operator(grid: SphereGrid):
    dirs = grid.directions
    dim = grid.dim
    k = 2 * dim
    _, nbr = cKDTree(dirs).query(dirs, k=k + 1)
    nbr = nbr[:, 1:]
    n = len(dirs)
    coef = np.zeros((n, dim, k))
    cosines = np.einsum("id,ikd->ik", dirs, dirs[nbr])
    for i in range(n):
        u = dirs[i]
        basis = np.linalg.svd(np.eye(dim) - np.outer(u, u))[0][:, : dim - 1]
        g = dirs[nbr[i]] @ basis
        coef[i] = basis @ np.linalg.pinv(g)
    return nbr, cosines, coef


def sample_support_points(s: SupportSample) -> np.ndarray:
    """Finite-difference supporting points for every grid direction.

    Uses ``x(u) = h(u) u + t`` with the tangential part ``t`` fitted by least
    squares to ``h(v) - h(u) <u, v> ~ <t, v>`` over the 2*dim nearest
    neighbours ``v`` of ``u``.
    """
    nbr, cosines, coef = _fd_operator(s.grid)
    h = s.values
    resid = h[nbr] - h[:, None] * cosines
    return h[:, None] * s.grid.directions + np.einsum("idk,ik->id", coef, resid)


def support_point(body, u) -> np.ndarray:
    """The supporting point of the body with outer normal ``u``."""
    u = np.asarray(u, dtype=float)
    if isinstance(body, GeneratorSet):
        return support_value(body, u)[1]
    grid = body.grid
    i = grid.index_of(u)
    if i is None:
        warnings.warn("direction not in grid; using nearest grid direction", OffGridWarning, stacklevel=2)
        i = grid.nearest(u)
    nbr, cosines, coef = _fd_operator(grid)
    h = body.values
    resid = h[nbr[i]] - h[i] * cosines[i]
    return h[i] * grid.directions[i] + coef[i] @ resid


def transport(s: SupportSample, g, first_order: bool = True) -> SupportSample:
    """Sample of ``g K`` via ``h_{gK}(u) = h_K(A^T u) + <t, u>``.

    ``h_K(A^T u)`` is read at the nearest grid direction ``v``; with
    ``first_order`` it is corrected by ``<x_K(v), A^T u - v>``.
    """
    grid = s.grid
    pulled = grid.directions @ g.linear
    _, idx = cKDTree(grid.directions).query(pulled)
    vals = s.values[idx]
    if first_order:
        xs = sample_support_points(s)[idx]
        vals = vals + np.einsum("id,id->i", xs, pulled - grid.directions[idx])
    return SupportSample(grid, vals + grid.directions @ g.translation)
