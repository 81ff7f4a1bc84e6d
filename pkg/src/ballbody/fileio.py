"""Body and report files.

A body file is a single line of JSON::

    {"dim": n, "kind": "generators" | "support" | "arcs2d", "data": ..., "grid": {...} | null}

Reals are stored as decimal strings with 17 significant digits, which
round-trips every IEEE double exactly. Reports carry ``"schema": 1``.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from .arcs import Arc, ArcBody2D, sample_arcs
from .body import GeneratorSet, SupportSample, sample_support
from .errors import BallBodyError, FormatError, GridMismatch
from .geom import RigidMotion, SphereGrid, make_grid

SCHEMA = 1
KINDS = ("generators", "support", "arcs2d")

Body = Union[GeneratorSet, SupportSample, ArcBody2D]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _real(s) -> float:
    if isinstance(s, bool):
        raise FormatError(f"expected a real, got {s!r}")
    try:
        return float(s)
    except (TypeError, ValueError):
        raise FormatError(f"expected a real, got {s!r}") from None


def _reals(seq) -> list[float]:
    if not isinstance(seq, list):
        raise FormatError(f"expected a list of reals, got {type(seq).__name__}")
    return [_real(s) for s in seq]


def _grid_dict(grid: SphereGrid | None):
    if grid is None:
        return None
    return {"resolution": grid.resolution, "seed": grid.seed}


def body_to_dict(body: Body, grid: SphereGrid | None = None) -> dict:
    """Serialisable form of a body; ``grid`` is recorded for generator bodies if given."""
    if isinstance(body, GeneratorSet):
        return {
            "dim": body.dim,
            "kind": "generators",
            "data": {"points": [[fmt(v) for v in p] for p in body.points], "hull": bool(body.hull)},
            "grid": _grid_dict(grid),
        }
    if isinstance(body, SupportSample):
        return {
            "dim": body.dim,
            "kind": "support",
            "data": {"values": [fmt(v) for v in body.values]},
            "grid": _grid_dict(body.grid),
        }
    if isinstance(body, ArcBody2D):
        arcs = [
            {"center": [fmt(a.center[0]), fmt(a.center[1])], "radius": fmt(a.radius),
             "start": fmt(a.start), "end": fmt(a.end)}
            for a in body.arcs
        ]
        return {"dim": 2, "kind": "arcs2d", "data": {"arcs": arcs}, "grid": _grid_dict(grid)}
    raise TypeError(f"not a body: {type(body).__name__}")


def _read_grid(d: dict, dim: int) -> SphereGrid | None:
    g = d.get("grid")
    if g is None:
        return None
    try:
        return make_grid(dim, int(g["resolution"]), int(g.get("seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad grid entry {g!r}: {exc}") from None


def body_from_dict(d: Any) -> tuple[Body, SphereGrid | None]:
    """Inverse of :func:`body_to_dict`; returns the body and the recorded grid."""
    if not isinstance(d, dict):
        raise FormatError("body file must hold a JSON object")
    for key in ("dim", "kind", "data"):
        if key not in d:
            raise FormatError(f"missing field {key!r}")
    kind = d["kind"]
    if kind not in KINDS:
        raise FormatError(f"unknown body kind {kind!r}")
    try:
        dim = int(d["dim"])
    except (TypeError, ValueError):
        raise FormatError(f"bad dim {d['dim']!r}") from None
    data = d["data"]
    if not isinstance(data, dict):
        raise FormatError("data must be an object")
    try:
        grid = _read_grid(d, dim)
        if kind == "generators":
            pts = np.array([_reals(p) for p in data["points"]], dtype=float)
            if pts.ndim != 2 or pts.shape[1] != dim:
                raise FormatError(f"generator points do not have dimension {dim}")
            body = GeneratorSet(pts, bool(data.get("hull", False)))
        elif kind == "support":
            if grid is None:
                raise FormatError("support files need a grid")
            body = SupportSample(grid, np.array(_reals(data["values"])))
        else:
            if dim != 2:
                raise FormatError("arcs2d bodies are planar")
            arcs = []
            for a in data["arcs"]:
                c = _reals(a["center"])
                if len(c) != 2:
                    raise FormatError("arc centers are planar points")
                arcs.append(Arc((c[0], c[1]), _real(a["radius"]), _real(a["start"]), _real(a["end"])))
            body = ArcBody2D(tuple(arcs))
    except FormatError:
        raise
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed {kind} data: {exc}") from None
    except (BallBodyError, ValueError) as exc:
        raise FormatError(f"invalid {kind} body: {exc}") from None
    return body, grid


def dumps(body: Body, grid: SphereGrid | None = None) -> str:
    """One-line body file text (no trailing newline)."""
    return json.dumps(body_to_dict(body, grid), separators=(",", ":"))


def loads(text: str) -> tuple[Body, SphereGrid | None]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from None
    return body_from_dict(d)


def save_body(path, body: Body, grid: SphereGrid | None = None) -> None:
    Path(path).write_text(dumps(body, grid) + "\n", encoding="utf-8")


def load_body(path) -> tuple[Body, SphereGrid | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    return loads(text)


def to_sample(body: Body, grid: SphereGrid) -> SupportSample:
    """Lower any body to a support sample on ``grid``."""
    if isinstance(body, SupportSample):
        if not body.grid.same_as(grid):
            raise GridMismatch(
                f"sample is on grid (dim {body.grid.dim}, resolution {body.grid.resolution}, "
                f"seed {body.grid.seed}); expected (dim {grid.dim}, resolution {grid.resolution}, "
                f"seed {grid.seed})"
            )
        return body
    if isinstance(body, GeneratorSet):
        return sample_support(body, grid)
    if isinstance(body, ArcBody2D):
        return sample_arcs(body, grid)
    raise TypeError(f"not a body: {type(body).__name__}")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _plain(obj, grid: SphereGrid | None = None):
    if isinstance(obj, (GeneratorSet, SupportSample, ArcBody2D)):
        return body_to_dict(obj, grid)
    if isinstance(obj, RigidMotion):
        return {"linear": [[fmt(v) for v in row] for row in obj.linear],
                "translation": [fmt(v) for v in obj.translation]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name), grid) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v, grid) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v, grid) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist(), grid)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    return obj


def report_to_dict(report, kind: str) -> dict:
    """Versioned plain form of any report dataclass; bodies are written inline."""
    return {"schema": SCHEMA, "report": kind, **_plain(report)}


def dump_report(report, kind: str) -> str:
    return json.dumps(report_to_dict(report, kind), indent=1, sort_keys=False)


def save_report(path, report, kind: str) -> None:
    Path(path).write_text(dump_report(report, kind) + "\n", encoding="utf-8")
