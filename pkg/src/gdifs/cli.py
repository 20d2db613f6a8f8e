"""Command-line front end: attractor runs, de Rham solves, checks, demos.

Exit codes: 0 success, 1 config error, 2 validation or compatibility
failure, 3 non-convergence or point-cap abort.  Outputs (CSV, JSON, SVG) are
byte-deterministic for identical configs and seeds.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import derham as derham_mod
from . import hausdorff, svgout
from .config import ConfigError, load_config
from .contraction import LinearComparison
from .gdsystem import (MapEvaluationError, NonConvergenceError, PointCapError,
                       iterate_attractor, seed_fixed_point, validate)

DEMOS = ("exa1", "exa2", "exa3", "derham_affine", "derham_minkowski")

EXIT_CONFIG, EXIT_VALIDATION, EXIT_RUNTIME = 1, 2, 3


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def _fmt17(v):
    return f"{float(v):.17g}"


def _json_safe(obj):
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _dump_json(path, payload):
    with open(path, "w", encoding="ascii") as handle:
        json.dump(_json_safe(payload), handle, sort_keys=True, indent=2,
                  allow_nan=False)
        handle.write("\n")


def _point_list(p):
    return [float(c) for c in np.atleast_1d(np.asarray(p, dtype=float))]


def _write_points_csv(path, cloud):
    with open(path, "w", encoding="ascii") as handle:
        handle.write("vertex,x\n" if cloud.dim == 1 else "vertex,x,y\n")
        for k, comp in enumerate(cloud.components, start=1):
            if cloud.dim == 1:
                for v in comp:
                    handle.write(f"{k},{_fmt17(v)}\n")
            else:
                for row in comp:
                    handle.write(f"{k},{_fmt17(row[0])},{_fmt17(row[1])}\n")


def _edge_payload(g, report, auto_edges):
    by_edge = {id(e): cert for e, cert in report.certificates}
    edges = []
    for e in g.edges:
        entry = {
            "edge": e.label(),
            "map": list(e.fmap.sources()),
            "comparison": e.comparison.describe(),
            "auto": e.label() in auto_edges,
        }
        cert = by_edge.get(id(e))
        if cert is not None:
            entry["certificate"] = cert.to_json()
        edges.append(entry)
    return edges


def _out_paths(cfg, args):
    out_dir = Path(args.out) if args.out else Path(cfg.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = cfg.output.formats
    if args.format:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        unknown = set(formats) - {"csv", "json", "svg"}
        if unknown:
            raise ConfigError(f"--format: unknown formats {sorted(unknown)}")
    return out_dir, Path(cfg.path).stem, formats


def cmd_attractor(args):
    try:
        cfg = load_config(args.config, rng_seed=args.seed)
        if cfg.system is None:
            raise ConfigError("attractor needs a [system] section")
        out_dir, stem, formats = _out_paths(cfg, args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))

    it = cfg.iteration
    if args.depth is not None:
        if args.depth < 1:
            return _fail(EXIT_CONFIG, "--depth must be >= 1")
        it.max_depth = args.depth
    if args.tol is not None:
        if args.tol < 0:
            return _fail(EXIT_CONFIG, "--tol must be >= 0")
        it.residual_tol = args.tol
    if args.dedup is not None:
        if args.dedup < 0:
            return _fail(EXIT_CONFIG, "--dedup must be >= 0")
        it.dedup = args.dedup

    g = cfg.system
    report = validate(g, rng_seed=args.seed)
    if not report.ok:
        for issue in report.issues:
            print(f"validation: {issue.message}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        seed = seed_fixed_point(g, tol=it.seed_tol, max_iter=it.seed_max_iter)
        result = iterate_attractor(g, seed.cloud, max_depth=it.max_depth,
                                   residual_tol=it.residual_tol, dedup=it.dedup,
                                   point_cap=it.point_cap)
    except (NonConvergenceError, PointCapError, MapEvaluationError) as exc:
        return _fail(EXIT_RUNTIME, str(exc))

    payload = {
        "command": "attractor",
        "config": Path(cfg.path).name,
        "metric": cfg.spec.describe(),
        "depth": result.depth,
        "max_depth": it.max_depth,
        "residual_tol": it.residual_tol,
        "dedup": it.dedup,
        "residual": result.residual,
        "residual_history": result.history,
        "point_counts": list(result.counts()),
        "seed": {
            "z": [_point_list(p) for p in seed.z],
            "j": {str(i): j for i, j in seed.j.items()},
            "iterations": seed.iterations,
        },
        "edges": _edge_payload(g, report, cfg.auto_edges),
        "rng_seed": args.seed,
    }
    coeffs = [e.comparison.c for e in g.edges if isinstance(e.comparison, LinearComparison)]
    if len(coeffs) == len(g.edges):
        payload["linear_residual_bound"] = result.residual / (1.0 - max(coeffs))

    if "csv" in formats:
        _write_points_csv(out_dir / f"{stem}_points.csv", result.cloud)
    if "json" in formats:
        _dump_json(out_dir / f"{stem}_report.json", payload)
    if "svg" in formats:
        if result.cloud.dim == 1:
            svgout.cloud_1d(result.cloud.components, out_dir / f"{stem}_cloud.svg")
        else:
            svgout.cloud_2d(result.cloud.components, out_dir / f"{stem}_cloud.svg")
    print(f"attractor: depth={result.depth} residual={result.residual:.6g} "
          f"points={list(result.counts())} -> {out_dir}")
    return 0


def cmd_check(args):
    try:
        cfg = load_config(args.config, rng_seed=args.seed)
        out_dir, stem, formats = _out_paths(cfg, args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))

    payload = {"command": "check", "config": Path(cfg.path).name, "rng_seed": args.seed}
    failed = False
    if cfg.system is not None:
        report = validate(cfg.system, rng_seed=args.seed)
        payload["ok"] = report.ok
        payload["issues"] = [i.to_json() for i in report.issues]
        payload["edges"] = _edge_payload(cfg.system, report, cfg.auto_edges)
        for e, cert in report.certificates:
            status = "PASS" if cert.passed else "FAIL"
            print(f"edge {e.label()} {e.fmap.sources()} vs {e.comparison.describe()}: {status} "
                  f"worst_margin={cert.worst_margin:.3e} worst_ratio={cert.worst_ratio:.6g}")
        for issue in report.issues:
            print(f"issue: {issue.message}")
        failed = failed or not report.ok
    if cfg.derham is not None:
        issues, certs = cfg.derham.validate(rng_seed=args.seed)
        payload["derham_ok"] = not issues
        payload["derham_issues"] = issues
        payload["derham_certificates"] = {k: c.to_json() for k, c in certs.items()}
        for key, cert in sorted(certs.items()):
            status = "PASS" if cert.passed else "FAIL"
            print(f"map {key}: {status} worst_margin={cert.worst_margin:.3e}")
        for issue in issues:
            print(f"issue: {issue}")
        failed = failed or bool(issues)

    if "json" in formats:
        _dump_json(out_dir / f"{stem}_check.json", payload)
    return EXIT_VALIDATION if failed else 0


def cmd_derham(args):
    try:
        cfg = load_config(args.config, rng_seed=args.seed)
        if cfg.derham is None:
            raise ConfigError("derham needs a [derham] section")
        out_dir, stem, formats = _out_paths(cfg, args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))

    params = cfg.derham_params
    if args.grid is not None:
        if args.grid < 2:
            return _fail(EXIT_CONFIG, "--grid must be >= 2")
        params.grid = args.grid
    if args.tol is not None:
        if args.tol <= 0:
            return _fail(EXIT_CONFIG, "--tol must be > 0")
        params.tol = args.tol
    if args.depth is not None:
        if args.depth < 1:
            return _fail(EXIT_CONFIG, "--depth must be >= 1")
        params.cross_check_depth = args.depth
    if args.dedup is not None:
        if args.dedup < 0:
            return _fail(EXIT_CONFIG, "--dedup must be >= 0")
        params.cross_check_dedup = args.dedup

    sys_ = cfg.derham
    issues, certs = sys_.validate(rng_seed=args.seed)
    if issues:
        for issue in issues:
            print(f"validation: {issue}", file=sys.stderr)
        return EXIT_VALIDATION

    xs = np.linspace(0.0, 1.0, params.grid)
    values = {i: [derham_mod.eval_phi(sys_, i, float(x), params.tol) for x in xs]
              for i in (1, 2)}
    fe = derham_mod.verify_functional_equation(sys_, grid=params.grid, tol=params.tol)

    payload = {
        "command": "derham",
        "config": Path(cfg.path).name,
        "grid": params.grid,
        "tol": params.tol,
        "compatibility": "ok",
        "certificates": {k: c.to_json() for k, c in certs.items()},
        "functional_equation": {
            "max_residual": fe.max_residual,
            "worst": {"i": fe.worst[0], "j": fe.worst[1], "x": fe.worst[2]},
            "bound": fe.bound,
        },
        "rng_seed": args.seed,
    }

    if args.cross_check:
        product = derham_mod.product_system(sys_)
        cloud = derham_mod.graph_attractor(sys_, params.cross_check_depth,
                                           params.cross_check_dedup)
        hp = []
        for i in (1, 2):
            graph_pts = np.column_stack([xs, [pv.value for pv in values[i]]])
            hp.append(hausdorff.hp_distance(cloud.components[i - 1], graph_pts,
                                            product.spec).value)
        payload["cross_check"] = {
            "depth": params.cross_check_depth,
            "dedup": params.cross_check_dedup,
            "hp": hp,
            "point_counts": list(cloud.counts()),
        }

    if "csv" in formats:
        with open(out_dir / f"{stem}_phi.csv", "w", encoding="ascii") as handle:
            handle.write("i,x,phi,err_bound\n")
            for i in (1, 2):
                for x, pv in zip(xs, values[i]):
                    handle.write(f"{i},{_fmt17(x)},{_fmt17(pv.value)},{_fmt17(pv.err_bound)}\n")
    if "json" in formats:
        _dump_json(out_dir / f"{stem}_report.json", payload)
    if "svg" in formats:
        for i in (1, 2):
            svgout.curve(xs, [pv.value for pv in values[i]],
                         out_dir / f"{stem}_phi{i}.svg", label=f"phi_{i}")
    print(f"derham: max_residual={fe.max_residual:.3e} (bound {fe.bound:.3e}) "
          f"worst=(i={fe.worst[0]}, j={fe.worst[1]}, x={fe.worst[2]:.6g}) -> {out_dir}")
    if args.cross_check:
        print(f"cross-check: hp={payload['cross_check']['hp']}")
    return 0


def cmd_demo(args):
    if not args.name:
        for name in DEMOS:
            print(name)
        return 0
    if args.name not in DEMOS:
        return _fail(EXIT_CONFIG, f"unknown demo {args.name!r}; available: {', '.join(DEMOS)}")
    source = resources.files("gdifs").joinpath(f"demos/{args.name}.toml")
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"{args.name}.toml"
    with resources.as_file(source) as src_path:
        shutil.copyfile(src_path, target)
    print(target)
    return 0


def demo_path(name):
    """Filesystem path of a bundled demo config (for tests and scripts)."""
    if name not in DEMOS:
        raise ValueError(f"unknown demo {name!r}")
    return resources.files("gdifs").joinpath(f"demos/{name}.toml")


def _add_common(p):
    p.add_argument("config", nargs="?", help="path to a TOML config")
    p.add_argument("--config", dest="config_flag", metavar="PATH",
                   help="alternative to the positional config path")
    p.add_argument("--out", help="output directory (default: config [output].dir)")
    p.add_argument("--format", help="comma list of csv,json,svg")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for certificate sampling")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gdifs",
        description="Graph-directed IFS attractors and de Rham-type functional equations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attractor", help="iterate a system to its attractor cloud")
    _add_common(p)
    p.add_argument("--depth", type=int, help="override iteration.max_depth")
    p.add_argument("--tol", type=float, help="override iteration.residual_tol")
    p.add_argument("--dedup", type=float, help="override iteration.dedup")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("derham", help="solve the functional-equation system")
    _add_common(p)
    p.add_argument("--grid", type=int, help="override derham.grid")
    p.add_argument("--tol", type=float, help="override derham.tol")
    p.add_argument("--cross-check", action="store_true",
                   help="also run the product-system attractor comparison")
    p.add_argument("--depth", type=int, help="override derham.cross_check_depth")
    p.add_argument("--dedup", type=float, help="override derham.cross_check_dedup")
    p.set_defaults(func=cmd_derham)

    p = sub.add_parser("check", help="validate a config without iterating")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("demo", help="list bundled demo configs or copy one")
    p.add_argument("name", nargs="?", help="demo name; omit to list")
    p.add_argument("--out", help="directory to copy into (default: .)")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "config_flag"):
        if args.config is None:
            args.config = args.config_flag
        if args.config is None:
            parser.error(f"{args.command}: a config path is required")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
