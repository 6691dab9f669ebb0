"""fekete-dyn: capacities, Green values, Julia rasters, Brolin samples,
sup-norm distances, heights, and configured experiments from the shell.

Polynomials enter as ascending integer coefficients, `c0 c1 ... cd`, inline
via --poly or from a file via --poly-file. Sets and experiments are
described by config files in the flat `key = value` grammar (JSON works
interchangeably); see parse_config.
"""

import argparse
import json
import math
import pathlib
import sys

import numpy as np

from .dynamics import DynGreenEvaluator, brolin_sample, julia_capacity, raster, write_pgm
from .harness import (
    build_set,
    emit,
    parse_config,
    run_bilu_rumely,
    run_dynamical_fs,
    run_runaway,
    spec_from_config,
)
from .heights import AlgebraicNumber, canonical_height, rumely_height, weil_height
from .metric import GreenPair, klimek_report, side_from_map, side_from_set
from .polyarith import IntPolynomial
from .potential import CompactSetModel, DiscreteMeasure, green_eval

RUNNERS = {
    "bilu_rumely": run_bilu_rumely,
    "dynamical_fs": run_dynamical_fs,
    "runaway": run_runaway,
}


def _add_poly_args(sub) -> None:
    sub.add_argument("--poly", help="coefficients 'c0 c1 ... cd', ascending")
    sub.add_argument("--poly-file", help="file holding the coefficients")


def _resolve_poly(args, parser) -> IntPolynomial | None:
    if getattr(args, "poly_file", None):
        text = pathlib.Path(args.poly_file).read_text()
    elif getattr(args, "poly", None):
        raw = args.poly
        # a bare token naming an existing file is read as one
        if " " not in raw and pathlib.Path(raw).is_file():
            text = pathlib.Path(raw).read_text()
        else:
            text = raw
    else:
        return None
    try:
        return IntPolynomial.from_text(text)
    except ValueError as exc:
        parser.error(str(exc))


def _poly_from_text_or_file(raw: str) -> IntPolynomial:
    if " " not in raw and pathlib.Path(raw).is_file():
        raw = pathlib.Path(raw).read_text()
    return IntPolynomial.from_text(raw)


def _set_from_config_path(path) -> CompactSetModel:
    cfg = parse_config(path)
    return build_set(cfg.get("set", cfg))


def _parse_point(s: str) -> complex:
    re, _, im = s.partition(",")
    return complex(float(re), float(im) if im else 0.0)


def _print_value(v: float) -> None:
    print("%.17g" % v)


def _cmd_capacity(args, parser) -> int:
    poly = _resolve_poly(args, parser)
    if poly is not None:
        _print_value(julia_capacity(poly))
    elif args.config:
        _print_value(math.exp(_set_from_config_path(args.config).log_capacity))
    else:
        parser.error("capacity needs --poly, --poly-file, or --config")
    return 0


def _cmd_green(args, parser) -> int:
    z = _parse_point(args.at)
    poly = _resolve_poly(args, parser)
    if poly is not None:
        ev = (DynGreenEvaluator(poly) if args.max_iter is None
              else DynGreenEvaluator(poly, max_iter=args.max_iter))
        _print_value(ev.green(z))
    elif args.config:
        _print_value(green_eval(_set_from_config_path(args.config), z))
    else:
        parser.error("green needs --poly, --poly-file, or --config")
    return 0


def _cmd_julia(args, parser) -> int:
    poly = _resolve_poly(args, parser)
    if poly is None:
        parser.error("julia needs --poly or --poly-file")
    w, _, h = args.resolution.partition(",")
    resolution = (int(w), int(h) if h else int(w))
    if args.bbox:
        parts = [float(p) for p in args.bbox.split(",")]
        if len(parts) != 4:
            parser.error("--bbox wants 're_min,re_max,im_min,im_max'")
        bbox = tuple(parts)
    else:
        atoms = brolin_sample(poly, 512, seed=args.seed).points
        m = 0.5
        bbox = (float(np.min(atoms.real)) - m, float(np.max(atoms.real)) + m,
                float(np.min(atoms.imag)) - m, float(np.max(atoms.imag)) + m)
    ras = (raster(poly, bbox, resolution) if args.max_iter is None
           else raster(poly, bbox, resolution, max_iter=args.max_iter))
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "julia.pgm"
    write_pgm(ras, path)
    print(path)
    print(f"{path}.json")
    return 0


def _cmd_brolin(args, parser) -> int:
    poly = _resolve_poly(args, parser)
    if poly is None:
        parser.error("brolin needs --poly or --poly-file")
    atoms = brolin_sample(poly, args.n, seed=args.seed).points
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "brolin.csv"
    DiscreteMeasure.uniform(atoms).to_csv(path)
    print(path)
    return 0


def _klimek_side(cfg: dict, name: str, parser):
    if name in cfg:
        return side_from_set(build_set(cfg[name]))
    key = f"{name}_poly"
    if key in cfg:
        poly = _poly_from_text_or_file(str(cfg[key]))
        return side_from_map(poly, n_atoms=int(cfg.get("n_atoms", 1024)),
                             seed=int(cfg.get("seed", 0)))
    parser.error(f"klimek config needs '{name} = {{...}}' or '{key} = ...'")


def _cmd_klimek(args, parser) -> int:
    cfg = parse_config(args.config)
    pair = GreenPair(left=_klimek_side(cfg, "left", parser),
                     right=_klimek_side(cfg, "right", parser))
    print(json.dumps(klimek_report(pair), indent=2, sort_keys=True))
    return 0


def _cmd_height(args, parser) -> int:
    poly = _resolve_poly(args, parser)
    if poly is None:
        parser.error("height needs --poly or --poly-file")
    alpha = AlgebraicNumber.from_minpoly(poly)
    if args.kind == "weil":
        rep = weil_height(alpha)
    elif args.kind == "rumely":
        e = (_set_from_config_path(args.set) if args.set
             else CompactSetModel.disk(0, 1))
        rep = rumely_height(alpha, e)
    else:
        if not args.dyn:
            parser.error("height canonical needs --dyn <polynomial>")
        rep = canonical_height(_poly_from_text_or_file(args.dyn), alpha)
    if args.json:
        record = {
            "kind": args.kind,
            "total": rep.total,
            "archimedean": rep.archimedean,
            "nonarchimedean": rep.nonarchimedean,
            "per_place": dict(rep.per_place),
            "method": rep.method,
        }
        print(json.dumps(record, indent=2, sort_keys=True))
    else:
        _print_value(rep.total)
    return 0


def _cmd_experiment(args, parser) -> int:
    spec = spec_from_config(parse_config(args.config), seed_override=args.seed)
    report = RUNNERS[args.name](spec, out_dir=args.out, threads=args.threads)
    for path in emit(report, spec.outputs, args.out):
        print(path)
    if report.violations:
        print(f"violations: {len(report.violations)}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fekete-dyn",
        description="potential theory, polynomial dynamics, and heights")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("capacity", help="logarithmic capacity")
    _add_poly_args(p)
    p.add_argument("--config", help="set description file")
    p.set_defaults(fn=_cmd_capacity)

    p = subs.add_parser("green", help="Green function value at a point")
    _add_poly_args(p)
    p.add_argument("--config", help="set description file")
    p.add_argument("--at", required=True, help="evaluation point 're,im'")
    p.add_argument("--max-iter", type=int, default=None)
    p.set_defaults(fn=_cmd_green)

    p = subs.add_parser("julia", help="filled-set raster as PGM")
    _add_poly_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bbox", help="'re_min,re_max,im_min,im_max'")
    p.add_argument("--resolution", default="256,256", help="'width,height'")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_julia)

    p = subs.add_parser("brolin", help="backward-orbit measure as CSV")
    _add_poly_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=int, default=1024, help="number of atoms")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_brolin)

    p = subs.add_parser("klimek", help="sup-norm Green distance of two sides")
    p.add_argument("--config", required=True,
                   help="file with left/right side blocks")
    p.set_defaults(fn=_cmd_klimek)

    p = subs.add_parser("height", help="Weil, set, or dynamical height")
    p.add_argument("kind", choices=("weil", "rumely", "canonical"))
    _add_poly_args(p)
    p.add_argument("--set", help="target set config (rumely)")
    p.add_argument("--dyn", help="dynamical polynomial (canonical)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_height)

    p = subs.add_parser("experiment", help="run a configured experiment")
    p.add_argument("name", choices=tuple(RUNNERS))
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args, parser)


if __name__ == "__main__":
    raise SystemExit(main())
