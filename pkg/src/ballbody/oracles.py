"""Demo oracles speaking the line protocol: ``python3 -m ballbody.oracles NAME``.

Each input line is a body file, each output line the image body file.

    echo     identity map
    dual     K -> K^c
    shift    K -> K + (1, 0, ..., 0)
    scale    K -> 2K (not an isometry)
    garbage  replies with a line that is not a body file
"""

from __future__ import annotations

import sys

import numpy as np

from .body import GeneratorSet, SupportSample, c_transform
from .errors import BallBodyError
from .fileio import dumps, loads, to_sample
from .geom import RigidMotion


def _shift(dim: int) -> RigidMotion:
    t = np.zeros(dim)
    t[0] = 1.0
    return RigidMotion.translation_by(t)


def respond(name: str, line: str) -> str:
    if name == "garbage":
        return "this is not a body"
    body, grid = loads(line)
    if name == "echo":
        return dumps(body, grid)
    if name == "dual":
        if isinstance(body, GeneratorSet):
            return dumps(body.dual(), grid)
        return dumps(c_transform(to_sample(body, grid)), grid)
    if name == "shift":
        if isinstance(body, GeneratorSet):
            return dumps(body.moved(_shift(body.dim)), grid)
        s = to_sample(body, grid)
        return dumps(SupportSample(grid, s.values + grid.directions[:, 0]), grid)
    if name == "scale":
        s = to_sample(body, grid)
        return dumps(SupportSample(grid, 2.0 * s.values), grid)
    raise ValueError(f"unknown oracle {name!r}")


NAMES = ("echo", "dual", "shift", "scale", "garbage")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1 or argv[0] not in NAMES:
        print(f"usage: python3 -m ballbody.oracles {{{','.join(NAMES)}}}", file=sys.stderr)
        return 2
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            out = respond(argv[0], line)
        except (BallBodyError, ValueError) as exc:
            out = f'{{"error": "{type(exc).__name__}"}}'
        sys.stdout.write(out + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
