"""Recovering an isometry of the class from black-box access.

An oracle maps bodies to bodies. Every surjective isometry of the class is
either ``K -> gK`` or ``K -> gK^c`` for a rigid motion ``g``. :func:`recover`
probes the oracle on far-apart points, decides which of the two forms
applies, fits ``g`` and checks the prediction on a corpus.
"""

from __future__ import annotations

import json
import subprocess
import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .body import (
    GeneratorSet,
    SupportSample,
    c_transform,
    hausdorff,
    point_distance,
    sample_support,
    transport,
)
from .corpus import make_corpus
from .errors import BallBodyError, DimensionError, FormatError, OracleError, RankError
from .fileio import Body, dumps, loads, to_sample
from .geom import RigidMotion, SphereGrid, check_dim, fit_motion, invert

MODES = ("identity", "c")
SURJECTIVITY_NOTE = "surjectivity of the oracle is not verified; acceptance covers finitely many probes"


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

@dataclass
class TransformOracle:
    """A purported isometry: ``evaluate`` maps a body to a body."""

    dim: int
    evaluate: Callable[[Body], Body]
    grid: SphereGrid

    def __call__(self, body: Body) -> SupportSample:
        """Evaluate and lower the answer to a validated sample on the declared grid."""
        try:
            out = self.evaluate(body)
            s = to_sample(out, self.grid)
        except OracleError:
            raise
        except (BallBodyError, TypeError, ValueError) as exc:
            raise OracleError(f"oracle returned an invalid body: {exc}") from None
        if not np.all(np.isfinite(s.values)):
            raise OracleError("oracle returned non-finite support values")
        if not s.is_ball_body():
            w = s.widths()
            raise OracleError(f"oracle output violates the width bound (widths in [{w.min():.6g}, {w.max():.6g}])")
        return s


@dataclass(frozen=True)
class SyntheticOracleSpec:
    g: RigidMotion
    mode: str = "identity"
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")


def _body_key(body: Body) -> int:
    return zlib.crc32(dumps(body).encode())


def _apply(spec_g: RigidMotion, dual: bool, body: Body, grid: SphereGrid) -> Body:
    if isinstance(body, GeneratorSet):
        out = body.moved(spec_g)
        return out.dual() if dual else out
    s = transport(to_sample(body, grid), spec_g)
    return c_transform(s) if dual else s


def make_synthetic_oracle(spec: SyntheticOracleSpec, grid: SphereGrid) -> TransformOracle:
    """Oracle for ``K -> gK`` or ``K -> gK^c``, optionally with seeded additive noise.

    Generator bodies are mapped exactly; samples go through grid transport.
    """
    if spec.g.dim != grid.dim:
        raise DimensionError("motion and grid dimensions differ")

    def evaluate(body: Body) -> Body:
        out = _apply(spec.g, spec.mode == "c", body, grid)
        if spec.noise == 0:
            return out
        s = to_sample(out, grid)
        rng = np.random.default_rng([spec.seed, _body_key(body)])
        return SupportSample(grid, s.values + rng.uniform(-spec.noise, spec.noise, size=len(grid)))

    return TransformOracle(grid.dim, evaluate, grid)


def _anchor(body: Body, grid: SphereGrid) -> np.ndarray:
    if isinstance(body, GeneratorSet):
        return body.points.mean(axis=0)
    s = to_sample(body, grid)
    return np.linalg.lstsq(grid.directions, s.values - s.values[grid.pairing], rcond=None)[0] / 2


def make_adversarial_oracle(kind: str, grid: SphereGrid, g: RigidMotion | None = None) -> TransformOracle:
    """Maps that are not isometries of the class.

    ``"scale"`` doubles every body about the origin; ``"mixed"`` applies the
    dual only to bodies whose centre has first coordinate at least 2.
    """
    g = RigidMotion.identity(grid.dim) if g is None else g
    if kind == "scale":
        def evaluate(body: Body) -> Body:
            s = to_sample(_apply(g, False, body, grid), grid)
            return SupportSample(grid, 2.0 * s.values)
    elif kind == "mixed":
        def evaluate(body: Body) -> Body:
            return _apply(g, _anchor(body, grid)[0] >= 2.0, body, grid)
    else:
        raise ValueError(f"unknown adversarial oracle {kind!r}")
    return TransformOracle(grid.dim, evaluate, grid)


class SubprocessOracle:
    """Out-of-process oracle speaking line-delimited body files over stdin/stdout."""

    def __init__(self, command: Sequence[str], grid: SphereGrid, timeout: float = 60.0):
        self.command = list(command)
        self.grid = grid
        self.dim = grid.dim
        self.timeout = timeout
        self._proc = subprocess.Popen(
            self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, encoding="utf-8",
        )

    def evaluate(self, body: Body) -> Body:
        proc = self._proc
        if proc.poll() is not None:
            raise OracleError(f"oracle process exited with code {proc.returncode}")
        try:
            proc.stdin.write(dumps(body, self.grid) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise OracleError(f"oracle pipe failed: {exc}") from None
        if not line:
            raise OracleError("oracle closed its output")
        try:
            out, _ = loads(line)
        except FormatError as exc:
            raise OracleError(f"malformed oracle response: {exc}") from None
        return out

    def as_oracle(self) -> TransformOracle:
        return TransformOracle(self.dim, self.evaluate, self.grid)

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.stdin.close()
            try:
                self._proc.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


# ---------------------------------------------------------------------------
# Probes and image classification
# ---------------------------------------------------------------------------

def probe_points(dim: int) -> np.ndarray:
    """The origin and ``4 e_i``: affinely independent and pairwise at least 4 apart."""
    check_dim(dim)
    return np.vstack([np.zeros(dim), 4.0 * np.eye(dim)])


@dataclass(frozen=True)
class ImageClass:
    kind: str                  # "Point", "UnitBall" or "Other"
    center: np.ndarray | None


def classify_image(s: SupportSample, tol: float = 1e-6) -> ImageClass:
    """Recognise a point or a unit ball from its widths; the centre is a least-squares fit."""
    w = s.widths()
    dirs = s.grid.directions
    if np.max(np.abs(w)) <= tol:
        kind, offset = "Point", 0.0
    elif np.max(np.abs(w - 2.0)) <= tol:
        kind, offset = "UnitBall", 1.0
    else:
        return ImageClass("Other", None)
    c = np.linalg.lstsq(dirs, s.values - offset, rcond=None)[0]
    return ImageClass(kind, c)


# ---------------------------------------------------------------------------
# Reconstruction from point distances
# ---------------------------------------------------------------------------

def probe_lattice(dim: int, density: int, center=None, half_width: float = 2.0) -> np.ndarray:
    """Cubic lattice with ``density`` points per axis on ``center + [-h, h]^dim``, plus the centre."""
    check_dim(dim)
    if density < 2:
        raise ValueError("density must be at least 2")
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    ticks = np.linspace(-half_width, half_width, density)
    mesh = np.stack(np.meshgrid(*([ticks] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return np.vstack([c, c + mesh])


def reconstruct_from_distances(dist: Callable[[np.ndarray], float], samples, grid: SphereGrid) -> SupportSample:
    """Support sample of ``min_x (<x, u> + dist(x))`` over the sample points.

    When ``dist`` is the farthest-point distance to a body of the class this
    is the support function of the intersection of the balls
    ``x + dist(x) B``, which contains the body.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if pts.size == 0:
        raise ValueError("no sample points")
    if pts.shape[1] != grid.dim:
        raise DimensionError("sample points and grid differ in dimension")
    r = np.array([float(dist(x)) for x in pts])
    h = np.full(len(grid), np.inf)
    for lo in range(0, len(pts), 512):
        chunk = pts[lo:lo + 512] @ grid.directions.T + r[lo:lo + 512, None]
        h = np.minimum(h, chunk.min(axis=0))
    return SupportSample(grid, h)


# ---------------------------------------------------------------------------
# Recovery
# ---------------------------------------------------------------------------

@dataclass
class ClassifierConfig:
    corpus_size: int = 20
    seed: int = 0
    tol_classify: float = 1e-6
    tol_verify: float | None = None
    recon_bodies: int = 3
    recon_density: int | None = None
    recon_tol: float | None = None


@dataclass
class ProbeEvidence:
    probe: np.ndarray
    kind: str
    center: np.ndarray | None


@dataclass
class ClassificationReport:
    status: str                        # "classified" or "rejected"
    reason: str | None = None
    mode: str | None = None
    g: RigidMotion | None = None
    probes: list[ProbeEvidence] = field(default_factory=list)
    fit_rms: float | None = None
    distance_error: float | None = None
    residual: float | None = None
    tol_verify: float | None = None
    reconstruction_residual: float | None = None
    reconstruction_gap: float | None = None
    recon_tol: float | None = None
    corpus_size: int = 0
    note: str = SURJECTIVITY_NOTE

    @property
    def classified(self) -> bool:
        return self.status == "classified"


def _default_recon_density(dim: int) -> int:
    return {2: 41, 3: 13}.get(dim, 5)


def _default_recon_tol(dim: int, density: int, half_width: float = 2.0) -> float:
    # a body at distance r from lattice points h apart is over-estimated by
    # roughly the sagitta of the nearest lattice sphere: 2*h^2/r plus slack
    spacing = 2 * half_width / (density - 1)
    return float(np.sqrt(dim) * spacing)


def recover(oracle: TransformOracle, config: ClassifierConfig | None = None) -> ClassificationReport:
    """Classify an oracle as ``K -> gK`` or ``K -> gK^c`` and verify the fit."""
    config = ClassifierConfig() if config is None else config
    grid = oracle.grid
    dim = oracle.dim
    if grid.dim != dim:
        raise DimensionError("oracle grid and oracle dimension differ")
    report = ClassificationReport("rejected")
    try:
        return _recover(oracle, config, report)
    except OracleError as exc:
        report.status, report.reason = "rejected", f"oracle error: {exc}"
        return report


def _recover(oracle: TransformOracle, config: ClassifierConfig, report: ClassificationReport):
    grid, dim = oracle.grid, oracle.dim
    probes = probe_points(dim)

    # (1) point images must be all points or all unit balls
    for p in probes:
        img = classify_image(oracle(GeneratorSet.point(p)), config.tol_classify)
        report.probes.append(ProbeEvidence(p, img.kind, img.center))
    kinds = {e.kind for e in report.probes}
    if kinds == {"Point"}:
        report.mode = "identity"
    elif kinds == {"UnitBall"}:
        report.mode = "c"
    else:
        report.reason = "not point-rigid"
        return report

    # (2) motion fit and distance preservation on the probes
    centers = np.array([e.center for e in report.probes])
    try:
        fit = fit_motion(probes, centers)
    except RankError:
        report.reason = "not distance preserving on points"
        return report
    report.g, report.fit_rms = fit.motion, fit.rms
    corpus = make_corpus(dim, config.corpus_size, config.seed)
    report.corpus_size = len(corpus)
    lip = max(float(np.max(np.linalg.norm(fit.motion(e.body.points), axis=1))) + 1.0 for e in corpus)
    tol_verify = config.tol_verify
    if tol_verify is None:
        tol_verify = max(1e-6, 4.0 * grid.mesh_angle * lip)
    report.tol_verify = tol_verify
    src = np.linalg.norm(probes[:, None] - probes[None], axis=-1)
    dst = np.linalg.norm(centers[:, None] - centers[None], axis=-1)
    report.distance_error = float(np.max(np.abs(src - dst)))
    if report.distance_error > tol_verify:
        report.reason = "not distance preserving on points"
        return report

    # (3) corpus verification against exact predictions
    dual = report.mode == "c"
    images, residual = [], 0.0
    for e in corpus:
        img = oracle(e.body)
        pred = e.body.moved(fit.motion)
        pred = sample_support(pred.dual() if dual else pred, grid)
        residual = max(residual, hausdorff(img, pred))
        images.append(img)
    report.residual = residual
    if residual > tol_verify:
        report.reason = "corpus residual exceeds tolerance"
        return report

    # (4) independent reconstruction of a few images from point distances:
    # the untwisted map R (T, or c after T) sends {x} to {g x} and preserves
    # distances, so delta(g x, R K) = delta(x, K)
    density = config.recon_density or _default_recon_density(dim)
    recon_tol = config.recon_tol if config.recon_tol is not None else _default_recon_tol(dim, density)
    report.recon_tol = recon_tol
    worst, gap = 0.0, 0.0
    for e, img in list(zip(corpus, images))[: config.recon_bodies]:
        k = sample_support(e.body, grid)
        target = c_transform(img) if dual else img
        center = e.body.points.mean(axis=0)
        lattice = probe_lattice(dim, density, center)
        back = invert(fit.motion)
        rec = reconstruct_from_distances(lambda y: point_distance(back(y), k), fit.motion(lattice), grid)
        diff = rec.values - target.values
        worst = max(worst, float(np.max(np.abs(diff))))
        gap = max(gap, float(np.max(-diff)))
    report.reconstruction_residual, report.reconstruction_gap = worst, gap
    if worst > recon_tol or gap > tol_verify:
        report.reason = "reconstruction from point distances failed"
        return report

    report.status = "classified"
    return report


def motion_error(g_hat: RigidMotion, g: RigidMotion) -> tuple[float, float]:
    """``(max |linear difference|, |translation difference|)``."""
    return (float(np.max(np.abs(g_hat.linear - g.linear))),
            float(np.linalg.norm(g_hat.translation - g.translation)))


def oracle_from_spec_json(text: str, grid: SphereGrid) -> TransformOracle:
    """Synthetic oracle from ``{"mode": ..., "noise": ..., "linear": [[...]], "translation": [...]}``."""
    try:
        d = json.loads(text)
        dim = grid.dim
        linear = np.array(d.get("linear", np.eye(dim).tolist()), dtype=float)
        translation = np.array(d.get("translation", [0.0] * dim), dtype=float)
        spec = SyntheticOracleSpec(RigidMotion(linear, translation), d.get("mode", "identity"),
                                   float(d.get("noise", 0.0)), int(d.get("seed", 0)))
    except (json.JSONDecodeError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"bad oracle spec: {exc}") from None
    return make_synthetic_oracle(spec, grid)


__all__ = [
    "ClassificationReport",
    "ClassifierConfig",
    "ImageClass",
    "SubprocessOracle",
    "SyntheticOracleSpec",
    "TransformOracle",
    "classify_image",
    "make_adversarial_oracle",
    "make_synthetic_oracle",
    "motion_error",
    "probe_lattice",
    "probe_points",
    "reconstruct_from_distances",
    "recover",
]
