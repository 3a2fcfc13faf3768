"""``fixsum`` command line: sample, tile, gof, render.

Exit codes: 0 success, 2 usage error or infeasible input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import constraints as cons
from .drs import BoundsSpec
from .errors import (
    DimensionError,
    FixsumError,
    InfeasibleRegionError,
    NonTerminationError,
    NumericError,
    PreconditionError,
    SamplingFailureError,
)
from .gof import DegenerateGridError, auto_bins, build_grid, chi2_test
from .sampling import ALGORITHMS, Sampler
from .svg import delta_svg, scatter_svg, shapes_svg, tiling_svg
from .tiling import DEFAULT_DEPTH, GOLDEN_UPPER, audit, unique_shapes

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(FixsumError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _provenance(args, command: str) -> dict:
    return {
        "tool": "fixsum",
        "version": __version__,
        "command": command,
        "argv": " ".join(shlex.quote(a) for a in args.argv),
        "seed": getattr(args, "seed", None),
    }


def _region(args):
    """Region for the requested algorithm from ``--constraints`` or ``--upper/--lower``."""
    if args.constraints and (args.upper or args.lower):
        raise UsageError("give either --constraints or --upper/--lower, not both")
    if args.constraints:
        cs = cons.load(args.constraints)
        if args.algo == "drs":
            raise UsageError("drs takes per-coordinate bounds; use --upper/--lower")
        return cs
    if not args.upper and not args.lower:
        raise UsageError("a region is required: --constraints FILE or --upper/--lower")
    n = len(args.upper or args.lower)
    upper = args.upper or tuple(1.0 for _ in range(n))
    lower = args.lower or tuple(0.0 for _ in range(n))
    if len(upper) != len(lower):
        raise UsageError("--upper and --lower must have the same length")
    bounds = BoundsSpec(lower, upper)
    if args.algo == "drs":
        return bounds
    return cons.bounds_constraints(bounds.lower, bounds.upper)


def _region_linear(region):
    if isinstance(region, BoundsSpec):
        region = cons.bounds_constraints(region.lower, region.upper)
    return [(np.asarray(c.a), c.b) for c in region.linear]


def _write_csv(path: Path, X: np.ndarray, prov: dict) -> None:
    header = "\n".join(f"{k}: {v}" for k, v in prov.items())
    header += "\n" + ",".join(f"x{i + 1}" for i in range(X.shape[1]))
    np.savetxt(path, X, delimiter=",", fmt="%.17g", header=header, comments="# ")


def read_csv(path) -> np.ndarray:
    with warnings.catch_warnings():
        # an empty sample is valid input
        warnings.simplefilter("ignore", UserWarning)
        return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)


def cmd_sample(args) -> int:
    region = _region(args)
    order = tuple(int(v) - 1 for v in args.order.split(",")) if args.order else None
    sampler = Sampler(args.algo, region, order=order)
    run = sampler.sample(args.n, args.seed, args.threads)
    out = Path(args.out)
    prov = _provenance(args, "sample")
    prov["algo"] = args.algo
    prov["threads"] = args.threads
    _write_csv(out, run.X, prov)
    side = dict(prov)
    side["n"] = int(len(run.X))
    side["statistics"] = run.stats
    if run.thetas is not None:
        side["thetas"] = list(run.thetas)
    if isinstance(region, cons.ConstraintSet):
        side["constraints"] = cons.to_dict(region)
    else:
        side["bounds"] = {"lower": list(region.lower), "upper": list(region.upper)}
    sidecar = Path(args.sidecar) if args.sidecar else out.with_suffix(out.suffix + ".json")
    sidecar.write_text(json.dumps(side, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(run.X)} vectors to {out} (sidecar {sidecar})")
    return EXIT_OK


def cmd_tile(args) -> int:
    upper = args.upper or GOLDEN_UPPER
    start = time.perf_counter()
    tiles, projected, report = audit(upper, args.depth)
    elapsed = time.perf_counter() - start
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prov = _provenance(args, "tile")
    data = report.as_dict()
    data["provenance"] = prov
    (out / "report.json").write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    (out / "tiling.svg").write_text(tiling_svg(tiles, args.depth, prov), encoding="utf-8")
    (out / "shapes.svg").write_text(
        shapes_svg(tiles[0].polygon, unique_shapes(projected), prov), encoding="utf-8"
    )
    (out / "delta.svg").write_text(delta_svg(report, prov), encoding="utf-8")
    print(f"{'region':>6} {'realised':>9} {'target':>9} {'delta':>7}")
    for r in report.regions:
        print(f"{r.index:>6} {r.realised:>9.2f} {r.target:>9.2f} {r.delta:>7.2f}")
    print(f"{'total':>6} {report.realised_total:>9.2f} {report.target_total:>9.2f}")
    print(f"residual {report.residual:.2f}  sum|delta| {report.sum_abs_delta:.2f}  "
          f"tiles {report.n_tiles}  shapes {report.n_shapes}  ({elapsed:.2f}s)")
    return EXIT_OK


def cmd_gof(args) -> int:
    region = _region(args)
    sampler = Sampler(args.algo, region)
    n_bins = args.bins or auto_bins(region, args.n)
    grid = build_grid(region, n_bins)
    report = chi2_test(grid, sampler.chunks(args.n, args.seed, args.threads))
    data = report.as_dict()
    data["provenance"] = _provenance(args, "gof")
    data["provenance"]["algo"] = args.algo
    text = json.dumps(data, indent=2)
    if args.json:
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_render(args) -> int:
    X = read_csv(args.input)
    if X.size == 0:
        X = np.zeros((0, 3))
    if X.shape[1] != 3:
        raise DimensionError(f"render needs 3-D vectors, got {X.shape[1]} columns")
    linear = []
    if args.constraints:
        linear = _region_linear(cons.load(args.constraints))
    elif args.upper:
        linear = _region_linear(BoundsSpec(tuple(0.0 for _ in args.upper), args.upper))
    prov = _provenance(args, "render")
    Path(args.out).write_text(scatter_svg(X, linear, prov, title=str(args.input)), encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fixsum", description="Random fixed-sum vectors under constraints.")
    p.add_argument("--version", action="version", version=f"fixsum {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def region_flags(sp):
        sp.add_argument("--algo", choices=ALGORITHMS, default="drsc")
        sp.add_argument("--constraints", help="constraint file (JSON)")
        sp.add_argument("--upper", type=_floats, help="upper bounds, e.g. 0.5,0.25,1")
        sp.add_argument("--lower", type=_floats, help="lower bounds")
        sp.add_argument("--n", type=int, default=1000, help="number of vectors")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("sample", help="draw vectors and write CSV + JSON sidecar")
    region_flags(sp)
    sp.add_argument("--order", help="DRSC dimension order, 1-based, e.g. 3,1,2")
    sp.add_argument("--out", default="sample.csv")
    sp.add_argument("--sidecar", help="JSON sidecar path (default: OUT.json)")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("tile", help="exact tiling audit of simplified DRS")
    sp.add_argument("--upper", type=_floats, help="3-D upper bounds (default 0.5,0.25,1)")
    sp.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    sp.add_argument("--out-dir", default="tiling")
    sp.set_defaults(func=cmd_tile)

    sp = sub.add_parser("gof", help="chi-squared uniformity test on fresh samples")
    region_flags(sp)
    sp.add_argument("--bins", type=int, help="bins per axis (default: automatic)")
    sp.add_argument("--json", help="also write the report here")
    sp.set_defaults(func=cmd_gof)

    sp = sub.add_parser("render", help="SVG scatter of a 3-D sample CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--constraints", help="draw the boundary lines of this constraint file")
    sp.add_argument("--upper", type=_floats, help="draw these upper bounds")
    sp.add_argument("--out", default="sample.svg")
    sp.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = ["fixsum", *argv]
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    if getattr(args, "n", 1) < 0:
        parser.error("--n must be nonnegative")
    try:
        return args.func(args)
    except (NumericError, NonTerminationError, SamplingFailureError) as exc:
        print(f"fixsum: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, InfeasibleRegionError, PreconditionError, DegenerateGridError, DimensionError) as exc:
        print(f"fixsum: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError) as exc:
        print(f"fixsum: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
