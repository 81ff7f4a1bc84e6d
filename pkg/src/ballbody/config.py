"""Run configuration shared by the CLI and the lemma suites."""

from __future__ import annotations

from dataclasses import dataclass

from .body import TOL_SUPPORT
from .geom import SphereGrid, check_dim, make_grid

DEFAULT_RESOLUTION = {2: 512, 3: 24}


def default_resolution(dim: int) -> int:
    """512 in the plane, 24 in dim 3, 8 above (8**(dim-1) directions per hemisphere)."""
    check_dim(dim)
    return DEFAULT_RESOLUTION.get(dim, 8)


@dataclass
class RunConfig:
    dim: int = 2
    resolution: int | None = None
    seed: int = 0
    tol_support: float = TOL_SUPPORT
    tol_verify: float | None = None
    tol: float | None = None          # witness tolerance; None means derived from the grid
    budget: int = 1000
    out: str | None = None
    grid_seed: int = 0

    def __post_init__(self):
        check_dim(self.dim)
        if self.resolution is None:
            self.resolution = default_resolution(self.dim)
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        for name in ("tol_support", "tol_verify", "tol"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def grid(self) -> SphereGrid:
        return make_grid(self.dim, self.resolution, self.grid_seed)
