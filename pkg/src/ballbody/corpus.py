"""Seeded test bodies: points, balls, lenses, ball hulls and ball intersections."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .body import GeneratorSet
from .geom import check_dim

CORPUS_KINDS = ("point", "ball", "lens", "cc_hull", "intersection")


class CorpusEntry(NamedTuple):
    name: str
    kind: str
    body: GeneratorSet


def _in_ball(rng: np.random.Generator, k: int, dim: int, radius: float) -> np.ndarray:
    v = rng.standard_normal((k, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.uniform(0.0, 1.0, size=(k, 1)) ** (1.0 / dim)
    return v * r


def random_body(kind: str, dim: int, rng: np.random.Generator, spread: float = 1.5) -> GeneratorSet:
    """One random generator body of the requested kind, centred in ``[-spread, spread]^dim``."""
    c = rng.uniform(-spread, spread, size=dim)
    if kind == "point":
        return GeneratorSet.point(c)
    if kind == "ball":
        return GeneratorSet.ball(c)
    if kind == "lens":
        x = _in_ball(rng, 1, dim, 0.95)[0]
        return GeneratorSet(np.array([c + x, c - x]))
    if kind in ("cc_hull", "intersection"):
        k = int(rng.integers(3, 7))
        # generators inside a ball of radius <= 1 keep the intersection nonempty
        pts = c + _in_ball(rng, k, dim, rng.uniform(0.3, 1.0))
        return GeneratorSet(pts, hull=(kind == "cc_hull"))
    raise ValueError(f"unknown corpus kind {kind!r}")


def make_corpus(dim: int, count: int = 20, seed: int = 0) -> list[CorpusEntry]:
    """``count`` bodies cycling through :data:`CORPUS_KINDS`; deterministic per seed."""
    check_dim(dim)
    if count < len(CORPUS_KINDS):
        raise ValueError(f"count must be at least {len(CORPUS_KINDS)} to cover every kind")
    rng = np.random.default_rng([seed, dim])
    out = []
    for i in range(count):
        kind = CORPUS_KINDS[i % len(CORPUS_KINDS)]
        out.append(CorpusEntry(f"{i:03d}_{kind}", kind, random_body(kind, dim, rng)))
    return out
