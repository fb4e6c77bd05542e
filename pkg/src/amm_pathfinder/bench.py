"""Benchmark harness: profitability-ratio CDFs and scaling sweeps.

Two experiment shapes, both driven by a JSON config and emitting CSV
plus a run manifest:

* ``ratio`` — for sampled (source, target) pairs, run two methods on
  identical pristine state, record per-pair outputs and the empirical
  CDF of their ratio.
* ``scaling`` — sweep token-graph sizes, recording iteration rounds,
  line-graph link counts, and wall time per route, with a log-log
  polynomial fit of time versus size.

Reproducibility contract: with a fixed config (seeds included), every
CSV except the ``*_timing.csv`` sidecars is byte-identical across runs.
Wall-clock measurements are physically non-reproducible, so they are
quarantined in the timing sidecars and the manifest.
"""

from __future__ import annotations

import csv
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import ConfigError, NoRouteError
from .linegraph import line_graph_topology
from .marketdata import FilterPolicy, PoolSnapshot, filter_pools, load_prices, load_snapshot
from .router import BfsOrder, ConvergenceConfig, RandomOrder, route
from .router import dfs_route as _dfs_route
from .splitter import split_route
from .synthetic import ReserveSpec, clone_pools_for_dex, gen_synthetic_graph
from .tokengraph import TokenGraph, build_graph, merge_graphs

METHOD_LABELS = {
    "lg_random": "lg",
    "lg_bfs": "lg_BFS",
    "lg_split": "lg_RouteSplit",
    "lg_aggregator": "lg_Aggregator",
    "lg_aggregator_bfs": "lg_AggregatorBFS",
    "dfs": "dfs",
}


@dataclass(frozen=True)
class MethodSpec:
    """One routing method under test, mirroring the study's curve labels."""

    kind: str
    strategy: str | None = None  # None: bfs for *_bfs kinds, else random
    seed: int = 0
    splits: int = 1
    max_hops: int = 3
    dex: str | None = None  # single-DEX methods route on this DEX (default: first)
    scope: str | None = None  # dfs only: "single" (default) or "aggregator"

    def __post_init__(self):
        if self.kind not in METHOD_LABELS:
            raise ConfigError(f"unknown method kind {self.kind!r}; valid: {sorted(METHOD_LABELS)}")

    @property
    def label(self) -> str:
        return METHOD_LABELS[self.kind]

    def resolved_strategy(self) -> str:
        if self.strategy is not None:
            return self.strategy
        return "bfs" if self.kind.endswith("_bfs") else "random"

    @classmethod
    def from_dict(cls, obj: dict) -> "MethodSpec":
        return cls(**obj)


@dataclass(frozen=True)
class PairSampling:
    mode: str = "auto"  # all ordered pairs when <= 40 tokens, else a seeded sample
    sample_size: int = 1500
    seed: int = 99


@dataclass(frozen=True)
class GraphSource:
    type: str  # "synthetic" | "snapshot"
    # synthetic
    n_tokens: int = 100
    n_pools: int = 200
    seed: int = 7
    n_dexes: int = 1
    depth_jitter: float = 0.1
    reserves: ReserveSpec = ReserveSpec()
    # snapshot
    paths: tuple[str, ...] = ()
    dexes: tuple[str, ...] = ()
    prices_path: str | None = None

    @classmethod
    def from_dict(cls, obj: dict) -> "GraphSource":
        obj = dict(obj)
        if "reserves" in obj:
            obj["reserves"] = ReserveSpec.from_dict(obj["reserves"])
        if "paths" in obj:
            obj["paths"] = tuple(obj["paths"])
        if "dexes" in obj:
            obj["dexes"] = tuple(obj["dexes"])
        src = cls(**obj)
        if src.type not in ("synthetic", "snapshot"):
            raise ConfigError(f"graph_source.type must be synthetic or snapshot, got {src.type!r}")
        if src.type == "snapshot" and not src.paths:
            raise ConfigError("snapshot graph_source requires paths")
        return src


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str  # "ratio" | "scaling"
    graph_source: GraphSource
    methods: tuple[MethodSpec, ...]
    capital_usd: float = 1000.0
    trials: int = 1
    fee_bps: int | None = None
    sizes: tuple[int, ...] = (25, 50, 100, 200)
    pools_per_token: float = 2.0
    pairs: PairSampling = PairSampling()
    convergence: ConvergenceConfig = ConvergenceConfig()

    def __post_init__(self):
        if self.experiment not in ("ratio", "scaling"):
            raise ConfigError(f"experiment must be ratio or scaling, got {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.experiment == "ratio" and len(self.methods) != 2:
            raise ConfigError(
                f"ratio experiments compare exactly 2 methods, got {len(self.methods)}"
            )
        if not self.methods:
            raise ConfigError("at least one method is required")
        if self.capital_usd <= 0:
            raise ConfigError(f"capital_usd must be > 0, got {self.capital_usd}")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        try:
            obj["graph_source"] = GraphSource.from_dict(obj["graph_source"])
            obj["methods"] = tuple(MethodSpec.from_dict(m) for m in obj["methods"])
        except KeyError as exc:
            raise ConfigError(f"config missing required key: {exc}") from None
        if "pairs" in obj:
            obj["pairs"] = PairSampling(**obj["pairs"])
        if "convergence" in obj:
            obj["convergence"] = ConvergenceConfig(**obj["convergence"])
        if "sizes" in obj:
            obj["sizes"] = tuple(obj["sizes"])
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(f"bad experiment config: {exc}") from None

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    def to_manifest_dict(self) -> dict:
        def scrub(value):
            if isinstance(value, tuple):
                return [scrub(v) for v in value]
            if hasattr(value, "__dataclass_fields__"):
                return {k: scrub(getattr(value, k)) for k in value.__dataclass_fields__}
            return value

        return scrub(self)


@dataclass(frozen=True)
class RatioRecord:
    source: str
    target: str
    numerator_out: float
    denominator_out: float
    ratio: float
    numerator_rounds: int
    denominator_rounds: int
    numerator_truncated: bool
    denominator_truncated: bool
    numerator_elapsed_s: float
    denominator_elapsed_s: float


@dataclass(frozen=True)
class ScalingRow:
    method: str
    n_tokens: int
    trials: int
    mean_rounds: float
    mean_links: float
    mean_vertices: float
    mean_elapsed_s: float


@dataclass
class RatioExperimentResult:
    records: list[RatioRecord]
    excluded: list[tuple[str, str, str]]  # (source, target, reason)
    cdf: list[tuple[float, float]]  # (quantile, ratio)
    manifest: dict


@dataclass
class ScalingExperimentResult:
    rows: list[ScalingRow]
    fits: dict[str, dict]  # label -> {"slope", "intercept", "r_squared"}
    manifest: dict


# ---------------------------------------------------------------------------
# universe materialization


@dataclass
class _Universe:
    dexes: list[str]
    pool_sets: dict[str, list[PoolSnapshot]]
    prices: dict[str, float]
    _graphs: dict = field(default_factory=dict)
    _merged: TokenGraph | None = None

    def graph(self, dex: str) -> TokenGraph:
        if dex not in self._graphs:
            if dex not in self.pool_sets:
                raise ConfigError(f"method references unknown dex {dex!r}; have {self.dexes}")
            self._graphs[dex] = build_graph(self.pool_sets[dex])
        return self._graphs[dex]

    def merged(self) -> TokenGraph:
        if self._merged is None:
            graphs = [self.graph(d) for d in self.dexes]
            self._merged = graphs[0] if len(graphs) == 1 else merge_graphs(graphs)
        return self._merged


def _materialize(cfg: ExperimentConfig) -> _Universe:
    src = cfg.graph_source
    if src.type == "synthetic":
        base = gen_synthetic_graph(
            src.n_tokens,
            src.n_pools,
            src.seed,
            reserves=src.reserves,
            dex="synth1",
            fee_bps=cfg.fee_bps if cfg.fee_bps is not None else 30,
        )
        pool_sets = {"synth1": base}
        for k in range(2, src.n_dexes + 1):
            dex = f"synth{k}"
            pool_sets[dex] = clone_pools_for_dex(base, dex, src.seed + k, src.depth_jitter)
        dexes = sorted(pool_sets)
        prices = {t: 1.0 for pools in pool_sets.values() for p in pools for t in (p.token0, p.token1)}
        return _Universe(dexes=dexes, pool_sets=pool_sets, prices=prices)

    dexes = list(src.dexes) if src.dexes else [f"dex{i+1}" for i in range(len(src.paths))]
    if len(dexes) != len(src.paths):
        raise ConfigError(f"{len(src.paths)} snapshot paths but {len(dexes)} dex names")
    pool_sets = {}
    for path, dex in zip(src.paths, dexes):
        pools = load_snapshot(path, dex=dex)
        if cfg.fee_bps is not None:
            pools = [replace(p, fee_bps=cfg.fee_bps) for p in pools]
        pool_sets[dex] = filter_pools(pools)
    if src.prices_path is None:
        raise ConfigError("snapshot experiments require a prices file (graph_source.prices_path)")
    prices = load_prices(src.prices_path)
    return _Universe(dexes=dexes, pool_sets=pool_sets, prices=prices)


# ---------------------------------------------------------------------------
# method runners


@dataclass(frozen=True)
class PairOutcome:
    amount_out: float
    rounds: int
    truncated: bool
    elapsed_s: float


class _LineGraphRunner:
    def __init__(self, spec: MethodSpec, graph: TokenGraph, cut: str, conv: ConvergenceConfig):
        self.spec = spec
        self.graph = graph
        self.topo = line_graph_topology(graph, cut)
        self.conv = conv
        self.targets: dict[str, list[int]] = {}
        for idx, edge in enumerate(self.topo.vertices):
            self.targets.setdefault(edge.token_out, []).append(idx)
        self._states: dict[str, object] = {}

    @property
    def tokens(self):
        return self.graph.tokens

    def _order(self):
        if self.spec.resolved_strategy() == "bfs":
            return BfsOrder()
        return RandomOrder(self.spec.seed)

    def _state(self, source: str, eps: float):
        state = self._states.get(source)
        if state is None:
            lg = self.topo.with_source(source)
            state = route(lg, eps, self._order(), self.conv)
            self._states[source] = state
        return state

    def run_pair(self, source, target, eps):
        if self.spec.splits > 1:
            lg = self.topo.with_source(source)
            try:
                result = split_route(
                    lg, eps, self.spec.splits, target, self._order(), self.conv
                )
            except NoRouteError:
                return None
            return PairOutcome(
                amount_out=result.total_out,
                rounds=sum(p.rounds for p in result.parts),
                truncated=any(p.truncated for p in result.parts),
                elapsed_s=sum(p.elapsed_s for p in result.parts),
            )
        state = self._state(source, eps)
        best = 0.0
        for vid in self.targets.get(target, ()):
            if state.best[vid] > best:
                best = state.best[vid]
        if best <= 0.0:
            return None
        return PairOutcome(
            amount_out=best,
            rounds=state.rounds,
            truncated=state.truncated,
            elapsed_s=state.elapsed_s,
        )


class _DfsRunner:
    def __init__(self, spec: MethodSpec, graph: TokenGraph):
        self.spec = spec
        self.graph = graph

    @property
    def tokens(self):
        return self.graph.tokens

    def run_pair(self, source, target, eps):
        try:
            result = _dfs_route(self.graph, source, target, eps, self.spec.max_hops)
        except NoRouteError:
            return None
        return PairOutcome(
            amount_out=result.amount_out,
            rounds=0,
            truncated=False,
            elapsed_s=result.elapsed_s,
        )


def _make_runner(spec: MethodSpec, universe: _Universe, conv: ConvergenceConfig):
    if spec.kind in ("lg_aggregator", "lg_aggregator_bfs"):
        return _LineGraphRunner(spec, universe.merged(), "pair", conv)
    if spec.kind == "dfs":
        graph = universe.merged() if spec.scope == "aggregator" else universe.graph(
            spec.dex or universe.dexes[0]
        )
        return _DfsRunner(spec, graph)
    graph = universe.graph(spec.dex or universe.dexes[0])
    return _LineGraphRunner(spec, graph, "pool", conv)


# ---------------------------------------------------------------------------
# ratio experiment


def _sample_pairs(tokens: list[str], sampling: PairSampling) -> list[tuple[str, str]]:
    all_pairs = [(s, t) for s in tokens for t in tokens if s != t]
    mode = sampling.mode
    if mode == "auto":
        mode = "all" if len(tokens) <= 40 else "sample"
    if mode == "all":
        return all_pairs
    if mode != "sample":
        raise ConfigError(f"pairs.mode must be auto, all, or sample, got {sampling.mode!r}")
    if sampling.sample_size >= len(all_pairs):
        return all_pairs
    rng = random.Random(sampling.seed)
    return sorted(rng.sample(all_pairs, sampling.sample_size))


def run_ratio_experiment(cfg: ExperimentConfig) -> RatioExperimentResult:
    """Evaluate two methods over identical pristine state, pair by pair.

    The first configured method is the numerator.  Pairs where the
    denominator finds no route are excluded from the CDF and counted
    separately; a numerator failure scores 0.
    """
    if cfg.experiment != "ratio":
        raise ConfigError(f"config is for {cfg.experiment!r}, expected ratio")
    universe = _materialize(cfg)
    num_runner = _make_runner(cfg.methods[0], universe, cfg.convergence)
    den_runner = _make_runner(cfg.methods[1], universe, cfg.convergence)

    tokens = sorted(set(num_runner.tokens) & set(den_runner.tokens))
    pairs = _sample_pairs(tokens, cfg.pairs)

    missing_prices = [t for t in {s for s, _ in pairs} if t not in universe.prices]
    if missing_prices:
        raise ConfigError(f"no price for source tokens {missing_prices[:5]}")

    records = []
    excluded = []
    for source, target in pairs:
        eps = cfg.capital_usd / universe.prices[source]
        den = den_runner.run_pair(source, target, eps)
        if den is None or den.amount_out <= 0.0:
            excluded.append((source, target, "denominator_no_route"))
            continue
        num = num_runner.run_pair(source, target, eps)
        if num is None:
            num = PairOutcome(0.0, 0, False, 0.0)
        records.append(
            RatioRecord(
                source=source,
                target=target,
                numerator_out=num.amount_out,
                denominator_out=den.amount_out,
                ratio=num.amount_out / den.amount_out,
                numerator_rounds=num.rounds,
                denominator_rounds=den.rounds,
                numerator_truncated=num.truncated,
                denominator_truncated=den.truncated,
                numerator_elapsed_s=num.elapsed_s,
                denominator_elapsed_s=den.elapsed_s,
            )
        )

    records.sort(key=lambda r: (r.source, r.target))
    excluded.sort()
    ratios = np.array([r.ratio for r in records]) if records else np.array([])
    quantiles = [round(q, 2) for q in np.linspace(0.0, 1.0, 101)]
    cdf = (
        [(q, float(v)) for q, v in zip(quantiles, np.quantile(ratios, quantiles))]
        if len(ratios)
        else []
    )

    manifest = {
        "experiment": "ratio",
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "config": cfg.to_manifest_dict(),
        "methods": [m.label for m in cfg.methods],
        "n_pairs_recorded": len(records),
        "n_pairs_excluded": len(excluded),
        "timing_summary_s": {
            "numerator_mean_elapsed": float(np.mean([r.numerator_elapsed_s for r in records]))
            if records
            else 0.0,
            "denominator_mean_elapsed": float(np.mean([r.denominator_elapsed_s for r in records]))
            if records
            else 0.0,
        },
    }
    return RatioExperimentResult(records=records, excluded=excluded, cdf=cdf, manifest=manifest)


# ---------------------------------------------------------------------------
# scaling experiment


def run_scaling_experiment(cfg: ExperimentConfig) -> ScalingExperimentResult:
    """Sweep graph sizes, averaging rounds, link counts, and route time.

    Routing time is measured around the relaxation only; graph and
    line-graph construction are excluded.  Reported fit: least squares
    of log(mean elapsed) against log(n_tokens).
    """
    if cfg.experiment != "scaling":
        raise ConfigError(f"config is for {cfg.experiment!r}, expected scaling")
    if list(cfg.sizes) != sorted(cfg.sizes):
        raise ConfigError("sizes must be ascending")
    src = cfg.graph_source
    if src.type != "synthetic":
        raise ConfigError("scaling experiments use synthetic graphs")

    rows = []
    for spec in cfg.methods:
        if spec.kind == "dfs":
            raise ConfigError("scaling rows track relaxation rounds; use lg_* methods")
        order = BfsOrder() if spec.resolved_strategy() == "bfs" else None
        for size in cfg.sizes:
            n_pools = max(size - 1, int(round(cfg.pools_per_token * size)))
            rounds_acc, elapsed_acc, links_acc, vertices_acc = [], [], [], []
            for trial in range(cfg.trials):
                seed = src.seed + 1_000_003 * size + trial
                pools = gen_synthetic_graph(
                    size,
                    n_pools,
                    seed,
                    reserves=src.reserves,
                    fee_bps=cfg.fee_bps if cfg.fee_bps is not None else 30,
                )
                graph = build_graph(pools)
                topo = line_graph_topology(graph, "pool")
                source = random.Random(seed + 1).choice(graph.tokens)
                lg = topo.with_source(source)
                eps = cfg.capital_usd  # synthetic prices are 1.0
                this_order = order if order is not None else RandomOrder(spec.seed + trial)
                state = route(lg, eps, this_order, cfg.convergence)
                rounds_acc.append(state.rounds)
                elapsed_acc.append(state.elapsed_s)
                links_acc.append(len(topo.links))
                vertices_acc.append(len(topo.vertices))
            rows.append(
                ScalingRow(
                    method=spec.label,
                    n_tokens=size,
                    trials=cfg.trials,
                    mean_rounds=float(np.mean(rounds_acc)),
                    mean_links=float(np.mean(links_acc)),
                    mean_vertices=float(np.mean(vertices_acc)),
                    mean_elapsed_s=float(np.mean(elapsed_acc)),
                )
            )

    fits = {}
    for spec in cfg.methods:
        label = spec.label
        pts = [(r.n_tokens, r.mean_elapsed_s) for r in rows if r.method == label]
        if len(pts) >= 2:
            fits[label] = fit_power_law([p[0] for p in pts], [p[1] for p in pts])

    manifest = {
        "experiment": "scaling",
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "config": cfg.to_manifest_dict(),
        "fits": fits,
    }
    return ScalingExperimentResult(rows=rows, fits=fits, manifest=manifest)


def fit_power_law(xs, ys) -> dict:
    """Least-squares fit of log(y) on log(x): slope, intercept, R^2."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    predicted = slope * lx + intercept
    ss_res = float(np.sum((ly - predicted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r_squared": r_squared}


# ---------------------------------------------------------------------------
# deterministic output writers


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def write_ratio_outputs(result: RatioExperimentResult, outdir) -> dict:
    """Write ratio CSVs and the manifest; returns written paths.

    ``ratio_records.csv``, ``ratio_cdf.csv`` and ``excluded.csv`` are
    byte-reproducible for a fixed config; ``timings.csv`` holds wall
    clock measurements and is not.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}

    paths["records"] = outdir / "ratio_records.csv"
    _write_csv(
        paths["records"],
        [
            "source",
            "target",
            "numerator_out",
            "denominator_out",
            "ratio",
            "numerator_rounds",
            "denominator_rounds",
            "numerator_truncated",
            "denominator_truncated",
        ],
        [
            (
                r.source,
                r.target,
                r.numerator_out,
                r.denominator_out,
                r.ratio,
                r.numerator_rounds,
                r.denominator_rounds,
                int(r.numerator_truncated),
                int(r.denominator_truncated),
            )
            for r in result.records
        ],
    )

    paths["cdf"] = outdir / "ratio_cdf.csv"
    _write_csv(paths["cdf"], ["quantile", "ratio"], result.cdf)

    paths["excluded"] = outdir / "excluded.csv"
    _write_csv(paths["excluded"], ["source", "target", "reason"], result.excluded)

    paths["timings"] = outdir / "timings.csv"
    _write_csv(
        paths["timings"],
        ["source", "target", "numerator_elapsed_s", "denominator_elapsed_s"],
        [
            (r.source, r.target, r.numerator_elapsed_s, r.denominator_elapsed_s)
            for r in result.records
        ],
    )

    paths["manifest"] = outdir / "manifest.json"
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(result.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def write_scaling_outputs(result: ScalingExperimentResult, outdir) -> dict:
    """Write scaling CSVs and the manifest; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}

    paths["structure"] = outdir / "scaling_structure.csv"
    _write_csv(
        paths["structure"],
        ["method", "n_tokens", "trials", "mean_rounds", "mean_links", "mean_vertices"],
        [
            (r.method, r.n_tokens, r.trials, r.mean_rounds, r.mean_links, r.mean_vertices)
            for r in result.rows
        ],
    )

    paths["timing"] = outdir / "scaling_timing.csv"
    _write_csv(
        paths["timing"],
        ["method", "n_tokens", "mean_elapsed_s"],
        [(r.method, r.n_tokens, r.mean_elapsed_s) for r in result.rows],
    )

    paths["manifest"] = outdir / "manifest.json"
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(result.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
