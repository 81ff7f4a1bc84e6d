"""Command-line interface: ``ballbody <command> [options]``.

Exit codes: 0 success or pass, 1 failed check or rejected oracle, 2 usage,
format or validation error.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .body import (
    GeneratorSet,
    SupportSample,
    c_transform,
    discretization_bound,
    hausdorff,
    sample_support,
    simplify,
)
from .classifier import (
    ClassifierConfig,
    SubprocessOracle,
    SyntheticOracleSpec,
    make_adversarial_oracle,
    make_synthetic_oracle,
    oracle_from_spec_json,
    recover,
)
from .config import RunConfig, default_resolution
from .corpus import CORPUS_KINDS, make_corpus, random_body
from .errors import BallBodyError
from .fileio import dump_report, dumps, load_body, save_body, to_sample
from .geom import RigidMotion, make_grid
from .lemmas import SUITES, run_suite
from .render import render_svg
from .witnesses import FAR, cuteness_check, default_tol, tangent_lens

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _config(args) -> RunConfig:
    return RunConfig(dim=args.dim, resolution=args.grid, seed=args.seed, tol=args.tol,
                     budget=args.budget, out=args.out)


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _grid_for(body, file_grid, args):
    if file_grid is not None:
        return file_grid
    dim = body.dim
    return make_grid(dim, args.grid or default_resolution(dim))


def _load_samples(paths, args) -> list[SupportSample]:
    loaded = [load_body(p) for p in paths]
    grids = [g for _, g in loaded if g is not None]
    dims = {b.dim for b, _ in loaded}
    if len(dims) != 1:
        raise UsageError(f"bodies have different dimensions {sorted(dims)}")
    grid = grids[0] if grids else _grid_for(loaded[0][0], None, args)
    return [to_sample(b, grid) for b, _ in loaded]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_gen_corpus(args) -> int:
    cfg = _config(args)
    out = Path(args.out or "corpus")
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid
    names = []
    for e in make_corpus(cfg.dim, args.count, cfg.seed):
        sample_support(e.body, grid)  # validates the body on the grid
        path = out / f"{e.name}.json"
        save_body(path, e.body, grid)
        names.append(path.name)
    sys.stdout.write(json.dumps({"schema": 1, "report": "corpus", "dim": cfg.dim, "seed": cfg.seed,
                                 "files": names}, indent=1) + "\n")
    return EXIT_OK


def cmd_verify_lemma(args) -> int:
    if args.name not in SUITES:
        raise UsageError(f"unknown lemma {args.name!r}; choose from {', '.join(SUITES)}")
    cfg = _config(args)
    res = run_suite(args.name, cfg)
    _emit(dump_report(res, "lemma"), args.out)
    return EXIT_OK if res.passed else EXIT_FAIL


def _random_motion(dim: int, seed: int) -> RigidMotion:
    return RigidMotion.random(dim, np.random.default_rng(seed))


def cmd_classify(args) -> int:
    cfg = _config(args)
    grid = cfg.grid
    ccfg = ClassifierConfig(seed=cfg.seed, tol_verify=args.tol_verify)
    sources = [s for s in (args.synthetic, args.adversarial, args.oracle_file, args.subprocess) if s]
    if len(sources) != 1:
        raise UsageError("give exactly one of --synthetic, --adversarial, --oracle-file, --subprocess")
    if args.subprocess:
        with SubprocessOracle(shlex.split(args.subprocess), grid) as sp:
            report = recover(sp.as_oracle(), ccfg)
    else:
        if args.synthetic:
            g = RigidMotion.identity(cfg.dim) if args.identity_motion else _random_motion(cfg.dim, cfg.seed)
            oracle = make_synthetic_oracle(SyntheticOracleSpec(g, args.synthetic, args.noise, cfg.seed), grid)
        elif args.adversarial:
            oracle = make_adversarial_oracle(args.adversarial, grid)
        else:
            try:
                text = Path(args.oracle_file).read_text(encoding="utf-8")
            except OSError as exc:
                raise UsageError(f"cannot read {args.oracle_file}: {exc}") from None
            oracle = oracle_from_spec_json(text, grid)
        report = recover(oracle, ccfg)
    _emit(dump_report(report, "classification"), args.out)
    return EXIT_OK if report.classified else EXIT_FAIL


def cmd_render(args) -> int:
    layers = []
    for p in args.bodies:
        body, _ = load_body(p)
        if body.dim != 2:
            raise UsageError(f"{p}: only planar bodies can be rendered")
        layers.append((Path(p).stem, body))
    svg = render_svg(layers)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_hausdorff(args) -> int:
    s0, s1 = _load_samples([args.a, args.b], args)
    d = hausdorff(s0, s1)
    out = {"schema": 1, "report": "hausdorff", "value": format(d, ".17g"),
           "bound": format(discretization_bound(s0.grid, d), ".17g"),
           "grid": {"dim": s0.dim, "resolution": s0.grid.resolution, "seed": s0.grid.seed}}
    _emit(json.dumps(out, indent=1), None)
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_cdual(args) -> int:
    body, grid = load_body(args.body)
    if isinstance(body, GeneratorSet):
        sample_support(body, _grid_for(body, grid, args))  # validate before writing
        text = dumps(simplify(body.dual()), grid)
    else:
        g = _grid_for(body, grid, args)
        text = dumps(c_transform(to_sample(body, g)))
    _emit(text, args.out)
    return EXIT_OK


def cmd_cuteness(args) -> int:
    s0, s1 = _load_samples([args.a, args.b], args)
    rep = cuteness_check(s0, s1, budget=args.budget, seed=args.seed, tol=args.tol)
    _emit(dump_report(rep, "cuteness"), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Tangent-lens midpoint test across distances, as raw data with no claim attached."""
    cfg = _config(args)
    grid = cfg.grid
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for d_target in np.linspace(args.dmin, args.dmax, args.steps):
        hits, total = 0, 0
        for _ in range(args.pairs):
            k0 = random_body(CORPUS_KINDS[int(rng.integers(len(CORPUS_KINDS)))], cfg.dim, rng, spread=0.5)
            k1 = random_body(CORPUS_KINDS[int(rng.integers(len(CORPUS_KINDS)))], cfg.dim, rng, spread=0.5)
            s0, s1 = sample_support(k0, grid), sample_support(k1, grid)
            # slide k1 along a random direction; the distance is convex in the
            # shift, so bisect on the increasing side of its minimiser
            u = rng.standard_normal(cfg.dim)
            u /= np.linalg.norm(u)
            du = grid.directions @ u

            def dist(t, s0=s0, s1=s1, du=du):
                return hausdorff(s0, SupportSample(grid, s1.values + t * du))

            lo = float(minimize_scalar(dist, bounds=(-20.0, 20.0), method="bounded").x)
            if dist(lo) > d_target:
                continue
            hi = lo + d_target + 10.0
            for _ in range(60):
                mid = (lo + hi) / 2
                if dist(mid) < d_target:
                    lo = mid
                else:
                    hi = mid
            s1t = SupportSample(grid, s1.values + hi * du)
            d = hausdorff(s0, s1t)
            tol = default_tol(grid, d) if cfg.tol is None else cfg.tol
            total += 1
            try:
                w = tangent_lens(s0, s1t)
            except BallBodyError:
                continue
            if w.is_midpoint(d, tol):
                hits += 1
        rows.append({"distance": format(float(d_target), ".6g"), "pairs": total, "tangent_lens_midpoints": hits,
                     "above_threshold": bool(d_target >= FAR)})
    out = {"schema": 1, "report": "sweep", "dim": cfg.dim, "seed": cfg.seed, "rows": rows}
    _emit(json.dumps(out, indent=1), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--dim", type=int, default=2, help="ambient dimension (default 2)")
    p.add_argument("--grid", type=int, default=None,
                   help="grid resolution (default 512 in dim 2, 24 in dim 3, 8 above)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--tol", type=float, default=None, help="witness tolerance (default: from the grid)")
    p.add_argument("--budget", type=int, default=1000, help="random witness candidates (default 1000)")
    p.add_argument("--out", default=None, help="output path")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ballbody", description="Bodies that are intersections of unit balls.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", parents=[common], help="write seeded corpus body files into --out DIR")
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("verify-lemma", parents=[common], help="run a property suite")
    p.add_argument("name", help=", ".join(SUITES))
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("classify", parents=[common], help="classify a transform oracle")
    p.add_argument("--synthetic", choices=("identity", "c"), help="built-in oracle K -> gK or K -> gK^c")
    p.add_argument("--identity-motion", action="store_true", help="use g = identity for --synthetic")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--adversarial", choices=("scale", "mixed"))
    p.add_argument("--oracle-file", help="JSON file with mode, noise, linear, translation")
    p.add_argument("--subprocess", help="command line of a line-protocol oracle")
    p.add_argument("--tol-verify", type=float, default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("render", parents=[common], help="SVG of planar body files")
    p.add_argument("bodies", nargs="+")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("hausdorff", parents=[common], help="grid Hausdorff distance of two body files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_hausdorff)

    p = sub.add_parser("cdual", parents=[common], help="c-dual of a body file")
    p.add_argument("body")
    p.set_defaults(func=cmd_cdual)

    p = sub.add_parser("cuteness", parents=[common], help="search for a second midpoint of two bodies")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_cuteness)

    p = sub.add_parser("sweep", parents=[common], help="tangent-lens midpoint rate across distances")
    p.add_argument("--dmin", type=float, default=1.0)
    p.add_argument("--dmax", type=float, default=6.0)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--pairs", type=int, default=20)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, BallBodyError, ValueError) as exc:
        print(f"ballbody {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

