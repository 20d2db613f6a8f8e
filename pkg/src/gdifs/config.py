"""Declarative TOML configs for systems, de Rham families, and run settings.

A config carries a [metric] table plus either a [system] table (vertices and
an edge list with map expressions and comparison functions) or a [derham]
table (two families of four maps each).  Iteration and output settings have
defaults so demo configs stay short.  'auto' comparisons are resolved at load
time by a sampled linear estimate, inflated 5%.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .contraction import estimate_linear, make_comparison
from .derham import CompatibleFamily, DeRhamSystem
from .exprfn import ParseError, PointMap, parse
from .gdsystem import Edge, GraphIFS
from .semimetric import SemiMetricSpec, make_transformer

__all__ = [
    "ConfigError",
    "DerhamParams",
    "IterationParams",
    "OutputParams",
    "RunConfig",
    "load_config",
]


class ConfigError(ValueError):
    pass


@dataclass
class IterationParams:
    max_depth: int = 8
    residual_tol: float = 0.0
    dedup: float = 0.0
    point_cap: int = 10_000_000
    seed_tol: float = 1e-12
    seed_max_iter: int = 2_000_000


@dataclass
class DerhamParams:
    grid: int = 1001
    tol: float = 1e-10
    cross_check_depth: int = 14
    cross_check_dedup: float = 0.0


@dataclass
class OutputParams:
    dir: str = "."
    formats: tuple = ("csv", "json")


@dataclass
class RunConfig:
    path: str
    spec: SemiMetricSpec
    system: GraphIFS | None = None
    derham: DeRhamSystem | None = None
    iteration: IterationParams = field(default_factory=IterationParams)
    derham_params: DerhamParams = field(default_factory=DerhamParams)
    output: OutputParams = field(default_factory=OutputParams)
    auto_edges: tuple = ()


def _parse_expr(source, where):
    if not isinstance(source, str):
        raise ConfigError(f"{where}: expected an expression string, got {source!r}")
    try:
        return parse(source)
    except ParseError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _positive(value, where, allow_zero=False):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if value < 0 or (value == 0 and not allow_zero):
        raise ConfigError(f"{where}: must be {'>= 0' if allow_zero else '> 0'}, got {value!r}")
    return value


def _metric(data):
    table = data.get("metric", {})
    base = table.get("base", "euclid1d")
    transformer = None
    if "transformer" in table:
        t = table["transformer"]
        if not isinstance(t, dict) or "kind" not in t:
            raise ConfigError(f"metric.transformer: malformed table {t!r}")
        params = {k: v for k, v in t.items() if k != "kind"}
        try:
            transformer = make_transformer(t["kind"], **params)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"metric.transformer: {exc}") from exc
    try:
        return SemiMetricSpec(base, transformer)
    except ValueError as exc:
        raise ConfigError(f"metric.base: {exc}") from exc


def _comparison(raw, where, fmap, spec, rng_seed):
    """Concrete comparison; 'auto' becomes an inflated sampled linear fit."""
    if raw == "auto":
        try:
            return estimate_linear(fmap, spec, rng_seed=rng_seed), True
        except ValueError as exc:
            raise ConfigError(f"{where}: auto comparison failed: {exc}") from exc
    try:
        return make_comparison(raw), False
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _system(table, spec, rng_seed):
    q = table.get("vertices")
    if not isinstance(q, int) or q < 1:
        raise ConfigError(f"system.vertices: need a positive integer, got {q!r}")
    raw_edges = table.get("edge", [])
    if not raw_edges:
        raise ConfigError("system: at least one [[system.edge]] is required")
    edges = []
    auto_labels = []
    for k, item in enumerate(raw_edges):
        where = f"system.edge[{k}]"
        try:
            src, dst = int(item["from"]), int(item["to"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"{where}: needs integer 'from' and 'to'") from None
        raw_map = item.get("map")
        if isinstance(raw_map, list):
            if spec.dim != 2 or len(raw_map) != 2:
                raise ConfigError(f"{where}.map: a two-expression map needs a euclid2d metric")
            fmap = PointMap(*(_parse_expr(s, f"{where}.map[{n}]") for n, s in enumerate(raw_map)))
        else:
            if spec.dim != 1:
                raise ConfigError(f"{where}.map: euclid2d systems need map = [expr_x, expr_y]")
            fmap = PointMap(_parse_expr(raw_map, f"{where}.map"))
        comparison, was_auto = _comparison(item.get("comparison", "auto"),
                                           f"{where}.comparison", fmap, spec, rng_seed)
        edges.append(Edge(src, dst, fmap, comparison))
        if was_auto:
            auto_labels.append(f"{src}->{dst}")
    j_override = None
    seed_table = table.get("seed", {})
    if "j_override" in seed_table:
        try:
            j_override = {int(k): int(v) for k, v in seed_table["j_override"].items()}
        except (TypeError, ValueError, AttributeError):
            raise ConfigError("system.seed.j_override: expected a table of vertex -> vertex") from None
        present = {(e.src, e.dst) for e in edges}
        for i, j in j_override.items():
            if (i, j) not in present:
                raise ConfigError(f"system.seed.j_override: no edge {i} -> {j}")
    try:
        g = GraphIFS(q, edges, spec, j_override)
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from exc
    return g, tuple(auto_labels)


def _family(table, name, rng_seed):
    spec = SemiMetricSpec("euclid1d")
    maps = {}
    for i in (1, 2):
        for j in (1, 2):
            key = f"h{i}{j}"
            if key not in table:
                raise ConfigError(f"derham.{name}: missing map {key!r}")
            maps[(i, j)] = _parse_expr(table[key], f"derham.{name}.{key}")
    raw_cmp = table.get("comparison")
    if raw_cmp is None:
        raise ConfigError(f"derham.{name}: missing 'comparison'")
    comparisons = {}
    for i in (1, 2):
        for j in (1, 2):
            cmp_fn, _ = _comparison(raw_cmp, f"derham.{name}.comparison",
                                    PointMap(maps[(i, j)]), spec, rng_seed)
            comparisons[(i, j)] = cmp_fn
    return CompatibleFamily(maps, comparisons)


def _iteration(table):
    params = IterationParams()
    if "max_depth" in table:
        params.max_depth = int(table["max_depth"])
        if params.max_depth < 1:
            raise ConfigError("iteration.max_depth: must be >= 1")
    if "residual_tol" in table:
        params.residual_tol = _positive(table["residual_tol"], "iteration.residual_tol", allow_zero=True)
    if "dedup" in table:
        params.dedup = _positive(table["dedup"], "iteration.dedup", allow_zero=True)
    if "point_cap" in table:
        params.point_cap = int(_positive(table["point_cap"], "iteration.point_cap"))
    if "seed_tol" in table:
        params.seed_tol = _positive(table["seed_tol"], "iteration.seed_tol")
    if "seed_max_iter" in table:
        params.seed_max_iter = int(_positive(table["seed_max_iter"], "iteration.seed_max_iter"))
    return params


def _derham_params(table):
    params = DerhamParams()
    if "grid" in table:
        params.grid = int(table["grid"])
        if params.grid < 2:
            raise ConfigError("derham.grid: must be >= 2")
    if "tol" in table:
        params.tol = _positive(table["tol"], "derham.tol")
    if "cross_check_depth" in table:
        params.cross_check_depth = int(_positive(table["cross_check_depth"], "derham.cross_check_depth"))
    if "cross_check_dedup" in table:
        params.cross_check_dedup = _positive(table["cross_check_dedup"], "derham.cross_check_dedup",
                                             allow_zero=True)
    return params


def _output(table):
    params = OutputParams()
    if "dir" in table:
        params.dir = str(table["dir"])
    if "formats" in table:
        formats = tuple(str(f) for f in table["formats"])
        unknown = set(formats) - {"csv", "json", "svg"}
        if unknown:
            raise ConfigError(f"output.formats: unknown formats {sorted(unknown)}")
        params.formats = formats
    return params


def load_config(path, rng_seed=0):
    """Load and build a RunConfig; raises ConfigError on any malformation."""
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    spec = _metric(data)
    cfg = RunConfig(path=str(path), spec=spec)
    cfg.iteration = _iteration(data.get("iteration", {}))
    cfg.output = _output(data.get("output", {}))

    if "system" in data:
        cfg.system, cfg.auto_edges = _system(data["system"], spec, rng_seed)
    if "derham" in data:
        table = data["derham"]
        if "f" not in table or "g" not in table:
            raise ConfigError("derham: needs both [derham.f] and [derham.g]")
        if spec.dim != 1:
            raise ConfigError("derham: families live on [0,1]; use a euclid1d metric")
        cfg.derham = DeRhamSystem(_family(table["f"], "f", rng_seed),
                                  _family(table["g"], "g", rng_seed))
        cfg.derham_params = _derham_params(table)
    if cfg.system is None and cfg.derham is None:
        raise ConfigError("config needs a [system] or a [derham] section")
    return cfg
