"""Command-line interface.

Subcommands: ``coarsen`` (multi-ratio coarsening of one graph),
``coarsen-hetero`` (type-isolated coarsening from a JSON manifest),
``metrics`` (spectral fidelity of an emitted coarsening), ``validate-theory``
(Monte-Carlo checks of the analytic guarantees), and ``bench`` (adaptive vs
naive timing on synthetic graphs).

Exit codes: 0 success, 1 failed validation check, 2 malformed input file,
3 configuration violation, 4 graph too large for the dense eigensolver.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .coarsen import build_schedule, coarsen_graph, partition_at_ratio, resolve_alpha
from .exceptions import (
    CoarsekitError,
    ConfigError,
    InvalidParams,
    InvalidRatio,
    MalformedInput,
    TooLarge,
)
from .hetero import coarsen_hetero
from .io import (
    load_coarsened_graph,
    load_graph,
    load_hetero_manifest,
    write_coarsened_graph,
    write_hetero_outputs,
    write_json,
)
from .lsh import build_order, hash_scores, sample_projections, zscore_columns
from .spectral import DEFAULT_DENSE_LIMIT, spectral_report
from .theory import (
    proximity_curve,
    validate_load_balance,
    validate_proximity,
    validate_separation,
)

TABLE_RATIOS = (0.55, 0.50, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10)


@dataclass
class RunConfig:
    """Validated configuration of one ``coarsen`` run."""

    edges: str
    out: str
    features: str | None = None
    labels: str | None = None
    ratios: list[float] = field(default_factory=lambda: [0.5])
    alpha: str | float = "auto"
    projectors: int = 10
    seed: int = 0
    aggregate: str = "mean"
    standardize: bool = False
    emit_metrics: bool = False
    ree_k: int = 10
    ree_end: str = "low"
    dense_eig_limit: int = DEFAULT_DENSE_LIMIT
    iterative: bool = False

    def __post_init__(self):
        if not self.ratios:
            raise ConfigError("at least one ratio is required")
        for r in self.ratios:
            if not 0.0 < r <= 1.0:
                raise ConfigError(f"ratio {r} outside (0, 1]")
        if any(a <= b for a, b in zip(self.ratios, self.ratios[1:])):
            raise ConfigError(f"ratios must be strictly descending: {self.ratios}")
        if self.ree_k < 1:
            raise ConfigError(f"--ree-k must be >= 1, got {self.ree_k}")
        if self.projectors < 1:
            raise ConfigError(f"--projectors must be >= 1, got {self.projectors}")
        if isinstance(self.alpha, float) and not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"--alpha must lie in [0, 1], got {self.alpha}")


def _parse_ratios(text: str) -> list[float]:
    """Comma-separated ratios; values above 1 are read as percentages."""
    ratios = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            value = float(token)
        except ValueError as exc:
            raise ConfigError(f"bad ratio {token!r}") from exc
        if value > 1.0:
            value /= 100.0
        ratios.append(value)
    return ratios


def _parse_alpha(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"--alpha must be 'auto' or a number, got {text!r}") from exc


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _ratio_tag(r: float) -> str:
    return f"r{r:.4f}"


def cmd_coarsen(cfg: RunConfig) -> int:
    records = []
    t0 = time.perf_counter()
    g = load_graph(cfg.edges, cfg.features, cfg.labels)
    records.append(bench_mod.TimingRecord("load", time.perf_counter() - t0))

    if cfg.features is None and cfg.alpha == "auto":
        # No feature columns: only the structure term can contribute.
        alpha = 1.0
    else:
        alpha = resolve_alpha(g, cfg.alpha)
    x = g.features
    if cfg.standardize and x.shape[1]:
        x = zscore_columns(x)

    t0 = time.perf_counter()
    projections = sample_projections(
        x.shape[1] + g.num_nodes, cfg.projectors, cfg.seed
    )
    scores = hash_scores(x, g.adjacency, alpha, projections, cfg.aggregate)
    records.append(bench_mod.TimingRecord("project", time.perf_counter() - t0))

    t0 = time.perf_counter()
    order = build_order(scores)
    records.append(bench_mod.TimingRecord("sort", time.perf_counter() - t0))

    t0 = time.perf_counter()
    schedule = build_schedule(order, min(cfg.ratios), cfg.seed)
    records.append(bench_mod.TimingRecord("schedule", time.perf_counter() - t0))

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_rows = []
    for r in cfg.ratios:
        t0 = time.perf_counter()
        cm = partition_at_ratio(schedule, r)
        records.append(
            bench_mod.TimingRecord("per_ratio_extract", time.perf_counter() - t0, ratio=r)
        )
        t0 = time.perf_counter()
        coarse = coarsen_graph(g, cm)
        records.append(bench_mod.TimingRecord("coarsen", time.perf_counter() - t0, ratio=r))
        tag = _ratio_tag(r)
        meta = {
            "aggregate": cfg.aggregate,
            "alpha": alpha,
            "num_nodes_original": g.num_nodes,
            "projectors": cfg.projectors,
            "ratio": r,
            "seed": cfg.seed,
        }
        sidecar = write_coarsened_graph(out_dir, tag, coarse, meta)
        print(f"wrote {sidecar} ({coarse.num_supernodes} supernodes)")
        if cfg.emit_metrics:
            t0 = time.perf_counter()
            report = spectral_report(
                g,
                coarse,
                cfg.ree_k,
                ree_end=cfg.ree_end,
                dense_limit=cfg.dense_eig_limit,
                iterative=cfg.iterative,
            )
            records.append(
                bench_mod.TimingRecord("metrics", time.perf_counter() - t0, ratio=r)
            )
            payload = {
                "he": report.he,
                "k": report.k_used,
                "ratio": r,
                "rce_log10": _json_safe(report.rce_log10),
                "rce_raw": report.rce_raw,
                "ree": report.ree,
                "skipped": report.skipped_eigenvalues,
            }
            write_json(out_dir / f"{tag}_metrics.json", payload)
            metrics_rows.append(payload)
    if metrics_rows:
        with open(out_dir / "metrics.csv", "w", encoding="utf-8") as fh:
            fh.write("ratio,ree,he,rce_raw,rce_log10,k,skipped\n")
            for row in metrics_rows:
                log10 = "" if row["rce_log10"] is None else f"{row['rce_log10']:.12g}"
                fh.write(
                    f"{row['ratio']:g},{row['ree']:.12g},{row['he']:.12g},"
                    f"{row['rce_raw']:.12g},{log10},{row['k']},{row['skipped']}\n"
                )
    bench_mod.write_timing_csv(out_dir / "timing.csv", records)
    return 0


def cmd_coarsen_hetero(args) -> int:
    h = load_hetero_manifest(args.manifest)
    overrides = {}
    for item in args.eta_type or []:
        if "=" not in item:
            raise ConfigError(f"--eta-type expects name=value, got {item!r}")
        name, _, value = item.partition("=")
        try:
            overrides[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad --eta-type value {value!r}") from exc
    result = coarsen_hetero(
        h,
        eta=args.eta,
        seed=args.seed,
        eta_by_type=overrides or None,
        alpha=None if args.alpha == "auto" else float(args.alpha),
        n_projectors=args.projectors,
        aggregate=args.aggregate,
    )
    meta = {
        "aggregate": args.aggregate,
        "eta": args.eta,
        "eta_by_type": overrides,
        "projectors": args.projectors,
        "seed": args.seed,
    }
    sidecar = write_hetero_outputs(args.out, result, meta)
    purity = result.purity()
    print(f"wrote {sidecar}")
    print(f"purity: {purity:.1f}% single-type supernodes")
    return 0


def cmd_metrics(args) -> int:
    g = load_graph(args.edges, args.features, args.labels)
    rows = []
    for sidecar_path in args.sidecar:
        coarse, meta = load_coarsened_graph(sidecar_path)
        report = spectral_report(
            g,
            coarse,
            args.ree_k,
            ree_end=args.ree_end,
            dense_limit=args.dense_eig_limit,
            iterative=args.iterative,
        )
        payload = {
            "he": report.he,
            "k": report.k_used,
            "ratio": meta.get("ratio"),
            "rce_log10": _json_safe(report.rce_log10),
            "rce_raw": report.rce_raw,
            "ree": report.ree,
            "skipped": report.skipped_eigenvalues,
        }
        rows.append(payload)
        print(json.dumps(payload, sort_keys=True))
    if args.json:
        write_json(args.json, rows[0] if len(rows) == 1 else rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("ratio,ree,he,rce_raw,rce_log10,k,skipped\n")
            for row in rows:
                ratio = "" if row["ratio"] is None else f"{row['ratio']:g}"
                log10 = "" if row["rce_log10"] is None else f"{row['rce_log10']:.12g}"
                fh.write(
                    f"{ratio},{row['ree']:.12g},{row['he']:.12g},"
                    f"{row['rce_raw']:.12g},{log10},{row['k']},{row['skipped']}\n"
                )
    return 0


def _theory_vectors(seed: int):
    """Deterministic vector triples for the default validator runs."""
    rng = np.random.default_rng(seed)
    base = rng.standard_normal(8)
    u = rng.standard_normal(8)
    u /= np.linalg.norm(u)
    v = rng.standard_normal(8)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    return base, u, v


def cmd_validate_theory(args) -> int:
    checks = []
    wanted = set(args.checks.split(",")) if args.checks != "all" else {
        "load-balance",
        "proximity",
        "separation",
    }
    unknown = wanted - {"load-balance", "proximity", "separation"}
    if unknown:
        raise ConfigError(f"unknown checks: {sorted(unknown)}")
    base, u, v = _theory_vectors(args.seed)
    if "load-balance" in wanted:
        checks.append(
            validate_load_balance(
                n=args.lb_n,
                k=args.lb_k,
                c=args.lb_c,
                trials=args.trials_load_balance,
                seed=args.seed,
            )
        )
    if "proximity" in wanted:
        x = base
        y = base + u  # unit separation
        checks.append(
            validate_proximity(
                x,
                y,
                n_projectors=4,
                epsilon=2.0 * math.sqrt(2.0),
                trials=args.trials,
                seed=args.seed,
            )
        )
        if args.curve_csv:
            eps_grid = np.linspace(0.0, 8.0, 33)
            rows = proximity_curve(x, y, 4, eps_grid, trials=args.trials, seed=args.seed)
            with open(args.curve_csv, "w", encoding="utf-8") as fh:
                fh.write("epsilon,empirical,analytic\n")
                for eps, emp, ana in rows:
                    fh.write(f"{eps:.6g},{emp:.6g},{ana:.6g}\n")
    if "separation" in wanted:
        x = base
        y = base + 0.1 * u
        z = base + 1.0 * v  # distance ratio 0.1
        checks.append(
            validate_separation(x, y, z, n_projectors=16, trials=args.trials, seed=args.seed)
        )
    payloads = []
    for check in checks:
        payload = {
            "analytic": check.analytic,
            "empirical": check.empirical,
            "name": check.name,
            "params": check.params,
            "pass": check.passed,
            "tolerance": check.tolerance,
            "trials": check.trials,
        }
        payloads.append(payload)
        status = "PASS" if check.passed else "FAIL"
        print(
            f"[{status}] {check.name}: empirical={check.empirical:.5f} "
            f"analytic={check.analytic:.5f} tolerance={check.tolerance:.5f}"
        )
    if args.json:
        write_json(args.json, payloads)
    else:
        print(json.dumps(payloads, sort_keys=True))
    return 0 if all(c.passed for c in checks) else 1


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    if not sizes:
        raise ConfigError("--sizes must list at least one size")
    ratios = _parse_ratios(args.ratios)
    records, summaries = bench_mod.run_bench(
        sizes,
        ratios,
        seed=args.seed,
        edges_per_node=args.edges_per_node,
        feature_dim=args.feature_dim,
        repeats=args.repeats,
    )
    bench_mod.write_timing_csv(args.out, records)
    for row in summaries:
        print(
            f"n={row['n']}: adaptive={row['adaptive_seconds']:.3f}s "
            f"naive={row['naive_seconds']:.3f}s speedup={row['speedup']:.2f}x"
        )
    if len(summaries) >= 2:
        ns = np.array([row["n"] for row in summaries], dtype=float)
        ts = np.array([row["adaptive_seconds"] for row in summaries])
        slope = float(np.polyfit(np.log(ns), np.log(ts), 1)[0])
        print(f"log-log slope of adaptive time vs n: {slope:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coarsekit",
        description="Adaptive multi-resolution graph coarsening toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coarsen", help="coarsen one graph at several ratios")
    p.add_argument("--edges", required=True, help="edge-list file (src\\tdst[\\tweight])")
    p.add_argument("--features", default=None, help="headerless CSV of node features")
    p.add_argument("--labels", default=None, help="one integer label per line")
    p.add_argument("--ratios", default="0.5", help="descending ratios, e.g. 0.5,0.3")
    p.add_argument("--alpha", default="auto", help="'auto' or a fixed blend in [0,1]")
    p.add_argument("--projectors", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aggregate", choices=["mean", "max", "median"], default="mean")
    p.add_argument("--standardize", action="store_true", help="z-score feature columns")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--emit-metrics", action="store_true", help="also compute spectral metrics")
    p.add_argument("--ree-k", type=int, default=10)
    p.add_argument("--ree-end", choices=["low", "high"], default="low")
    p.add_argument("--dense-eig-limit", type=int, default=DEFAULT_DENSE_LIMIT)
    p.add_argument("--iterative", action="store_true", help="allow iterative eigensolver")

    p = sub.add_parser("coarsen-hetero", help="type-isolated coarsening from a manifest")
    p.add_argument("--manifest", required=True, help="JSON dataset manifest")
    p.add_argument("--eta", type=float, default=0.5, help="per-type coarsening ratio")
    p.add_argument(
        "--eta-type",
        action="append",
        metavar="NAME=VALUE",
        help="per-type ratio override, repeatable",
    )
    p.add_argument("--alpha", default="auto")
    p.add_argument("--projectors", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aggregate", choices=["mean", "max", "median"], default="mean")
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", help="spectral fidelity of an emitted coarsening")
    p.add_argument("--edges", required=True, help="original graph edge list")
    p.add_argument("--features", default=None, help="original node features CSV")
    p.add_argument("--labels", default=None)
    p.add_argument(
        "--sidecar",
        action="append",
        required=True,
        help="sidecar JSON written by 'coarsen'; repeatable",
    )
    p.add_argument("--ree-k", type=int, default=10)
    p.add_argument("--ree-end", choices=["low", "high"], default="low")
    p.add_argument("--dense-eig-limit", type=int, default=DEFAULT_DENSE_LIMIT)
    p.add_argument("--iterative", action="store_true")
    p.add_argument("--json", default=None, help="write the report JSON here")
    p.add_argument("--csv", default=None, help="write a CSV across sidecars")

    p = sub.add_parser("validate-theory", help="Monte-Carlo checks of the guarantees")
    p.add_argument("--checks", default="all", help="all or a comma list of "
                   "load-balance,proximity,separation")
    p.add_argument("--trials", type=int, default=100_000,
                   help="trials for proximity/separation")
    p.add_argument("--trials-load-balance", type=int, default=500)
    p.add_argument("--lb-n", type=int, default=10_000)
    p.add_argument("--lb-k", type=int, default=100)
    p.add_argument("--lb-c", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", default=None)
    p.add_argument("--curve-csv", default=None,
                   help="write an (epsilon, empirical, analytic) sweep")

    p = sub.add_parser("bench", help="adaptive vs naive timing on synthetic graphs")
    p.add_argument("--sizes", default="10000,20000,40000,80000")
    p.add_argument("--ratios", default=",".join(str(r) for r in TABLE_RATIOS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges-per-node", type=int, default=5)
    p.add_argument("--feature-dim", type=int, default=16)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out", required=True, help="timing CSV path")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "coarsen":
            cfg = RunConfig(
                edges=args.edges,
                out=args.out,
                features=args.features,
                labels=args.labels,
                ratios=_parse_ratios(args.ratios),
                alpha=_parse_alpha(args.alpha),
                projectors=args.projectors,
                seed=args.seed,
                aggregate=args.aggregate,
                standardize=args.standardize,
                emit_metrics=args.emit_metrics,
                ree_k=args.ree_k,
                ree_end=args.ree_end,
                dense_eig_limit=args.dense_eig_limit,
                iterative=args.iterative,
            )
            return cmd_coarsen(cfg)
        if args.command == "coarsen-hetero":
            return cmd_coarsen_hetero(args)
        if args.command == "metrics":
            return cmd_metrics(args)
        if args.command == "validate-theory":
            return cmd_validate_theory(args)
        if args.command == "bench":
            return cmd_bench(args)
        parser.error(f"unknown command {args.command!r}")
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ConfigError, InvalidRatio, InvalidParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CoarsekitError as exc:
        # Remaining domain errors are data problems surfaced by the inputs.
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
