"""Benchmark harness: sweep sample sizes, seed k-means with each method,
score metrics, and emit report.json / metrics.csv / SVG charts.

Reports are deterministic given the configuration except for wall-time
fields; the environment stamp carries the package version and a hash of the
canonical (sorted-keys) config JSON so reruns are comparable.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .adaptive import LoopConfig, run_refinement
from .data import Dataset, load_csv, make_blobs, pca_2d, subsample
from .encoding import FixedPointCodec
from .errors import ConfigurationError
from .kmeans import ClusterRun, KMeansConfig, lloyd, random_init, run_to_dict
from .metrics import MetricReport, homogeneity_completeness_v, silhouette
from .samplers import AnnealConfig, RemoteSolverConfig, TabuConfig

METRIC_NAMES = ("inertia", "silhouette", "homogeneity", "completeness", "v_measure", "n_iter")
KNOWN_METHODS = ("random", "sa", "tabu", "remote")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "blobs"  # "blobs" or "csv"
    csv_path: str | None = None
    pca: bool = False
    k: int = 3
    seed: int = 0
    dataset_size: int | None = None  # defaults to max(sample_sizes)
    sample_sizes: tuple[int, ...] = (50, 100, 150, 200, 250)
    methods: tuple[str, ...] = ("random", "sa", "tabu")
    blob_std: float = 1.0
    # codec / value range
    bits: int = 4
    lower: float = -8.0
    upper: float = 7.0
    # refinement loop
    iterations: int = 10
    scale_factor: float = 2.0
    delta1: float | None = None
    delta2: float | None = None
    lam: float = 1.0
    global_offset: float = 0.0
    # desk sampler budgets (module defaults are larger)
    sa_reads: int = 8
    sa_sweeps: int = 500
    tabu_restarts: int = 8
    # remote solver
    remote_endpoint: str | None = None
    remote_token: str | None = None
    remote_timeout: float = 30.0
    remote_fallback: bool = False
    output_dir: str = "bench_out"

    def __post_init__(self):
        if self.dataset not in ("blobs", "csv"):
            raise ConfigurationError(f"unknown dataset kind {self.dataset!r}")
        if self.dataset == "csv" and not self.csv_path:
            raise ConfigurationError("csv dataset needs csv_path")
        sizes = tuple(int(s) for s in self.sample_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ConfigurationError("sample_sizes must be positive")
        if list(sizes) != sorted(sizes):
            raise ConfigurationError("sample_sizes must be ascending")
        object.__setattr__(self, "sample_sizes", sizes)
        methods = tuple(self.methods)
        if not methods:
            raise ConfigurationError("at least one method is required")
        for m in methods:
            if m not in KNOWN_METHODS:
                raise ConfigurationError(f"unknown method {m!r}")
        object.__setattr__(self, "methods", methods)
        if "remote" in methods and not self.remote_endpoint and not self.remote_fallback:
            raise ConfigurationError(
                "method 'remote' needs remote_endpoint or remote_fallback"
            )
        if self.k < 1:
            raise ConfigurationError("k must be >= 1")
        if min(sizes) < self.k:
            raise ConfigurationError("smallest sample size must be >= k")


def config_to_dict(config: ExperimentConfig) -> dict:
    payload = dataclasses.asdict(config)
    payload["sample_sizes"] = list(config.sample_sizes)
    payload["methods"] = list(config.methods)
    return payload


def config_from_dict(payload: dict) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(payload) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    cleaned = dict(payload)
    for key in ("sample_sizes", "methods"):
        if key in cleaned and isinstance(cleaned[key], list):
            cleaned[key] = tuple(cleaned[key])
    return ExperimentConfig(**cleaned)


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class BenchRow:
    method: str
    sample_size: int
    metrics: MetricReport
    wall_time_s: float
    run: ClusterRun | None = None  # persisted separately; absent after reload


@dataclass(frozen=True)
class BenchReport:
    config: ExperimentConfig
    rows: tuple[BenchRow, ...]
    version: str = __version__

    @property
    def hash(self) -> str:
        return config_hash(self.config)


def _base_dataset(config: ExperimentConfig) -> Dataset:
    size = config.dataset_size or max(config.sample_sizes)
    if config.dataset == "blobs":
        dataset = make_blobs(size, config.k, config.seed, config.blob_std)
    else:
        dataset = load_csv(config.csv_path)
        if config.pca:
            dataset = pca_2d(dataset)
        if dataset.n > size:
            dataset = subsample(dataset, size, config.seed)
    if dataset.n < max(config.sample_sizes):
        raise ConfigurationError(
            f"dataset has {dataset.n} samples; largest sweep point is {max(config.sample_sizes)}"
        )
    return dataset


def _loop_config(config: ExperimentConfig, method: str) -> LoopConfig:
    remote = None
    if method == "remote":
        remote = RemoteSolverConfig(
            endpoint=config.remote_endpoint or "http://127.0.0.1:0",
            auth_token=config.remote_token,
            timeout=config.remote_timeout,
            offline_fallback=config.remote_fallback,
        )
    return LoopConfig(
        max_iterations=config.iterations,
        sampler=method,  # "sa" | "tabu" | "remote"
        anneal=AnnealConfig(num_reads=config.sa_reads, sweeps=config.sa_sweeps, seed=config.seed),
        tabu=TabuConfig(restarts=config.tabu_restarts, seed=config.seed),
        remote=remote,
        lower_limit=config.lower,
        upper_limit=config.upper,
        scale_factor=config.scale_factor,
    )


def seed_centroids(config: ExperimentConfig, data: np.ndarray, method: str) -> np.ndarray:
    """Starting centroids for one method on one data slice."""
    if method == "random":
        return random_init(data, config.k, config.seed)
    codec = FixedPointCodec(config.bits)
    result = run_refinement(
        data,
        config.k,
        codec,
        _loop_config(config, method),
        delta1=config.delta1,
        delta2=config.delta2,
        lam=config.lam,
        global_offset=config.global_offset,
    )
    return result.w


def run_experiment(config: ExperimentConfig) -> BenchReport:
    """One row per (method, sample size): seed centroids, run Lloyd, score."""
    dataset = _base_dataset(config)
    rows: list[BenchRow] = []
    for size in config.sample_sizes:
        data = dataset.points[:, :size]
        true_labels = (
            dataset.true_labels[:size] if dataset.true_labels is not None else None
        )
        for method in config.methods:
            start = time.perf_counter()
            centroids = seed_centroids(config, data, method)
            run = lloyd(data, KMeansConfig(k=config.k, init=centroids))
            wall = time.perf_counter() - start
            sil = silhouette(data, run.labels)
            if true_labels is not None:
                hom, comp, v = homogeneity_completeness_v(true_labels, run.labels)
            else:
                hom = comp = v = None
            rows.append(
                BenchRow(
                    method=method,
                    sample_size=size,
                    metrics=MetricReport(
                        inertia=run.inertia,
                        silhouette=sil,
                        homogeneity=hom,
                        completeness=comp,
                        v_measure=v,
                        n_iter=run.n_iter,
                    ),
                    wall_time_s=wall,
                    run=run,
                )
            )
    rows.sort(key=lambda r: (r.method, r.sample_size))
    return BenchReport(config=config, rows=tuple(rows))


def report_to_dict(report: BenchReport) -> dict:
    return {
        "version": report.version,
        "config": config_to_dict(report.config),
        "config_hash": report.hash,
        "rows": [
            {
                "method": row.method,
                "sample_size": row.sample_size,
                "inertia": row.metrics.inertia,
                "silhouette": row.metrics.silhouette,
                "homogeneity": row.metrics.homogeneity,
                "completeness": row.metrics.completeness,
                "v_measure": row.metrics.v_measure,
                "n_iter": row.metrics.n_iter,
                "wall_time_s": row.wall_time_s,
            }
            for row in report.rows
        ],
    }


def report_from_dict(payload: dict) -> BenchReport:
    config = config_from_dict(payload["config"])
    rows = tuple(
        BenchRow(
            method=row["method"],
            sample_size=int(row["sample_size"]),
            metrics=MetricReport(
                inertia=row["inertia"],
                silhouette=row["silhouette"],
                homogeneity=row["homogeneity"],
                completeness=row["completeness"],
                v_measure=row["v_measure"],
                n_iter=int(row["n_iter"]),
            ),
            wall_time_s=float(row["wall_time_s"]),
        )
        for row in payload["rows"]
    )
    return BenchReport(config=config, rows=rows, version=payload.get("version", __version__))


def strip_timing(report_dict: dict) -> dict:
    """Copy of a report dict with wall-time fields removed (determinism checks)."""
    stripped = json.loads(json.dumps(report_dict))
    for row in stripped.get("rows", []):
        row.pop("wall_time_s", None)
    return stripped


# --------------------------------------------------------------------------
# Output files
# --------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _svg_chart(title: str, series: dict[str, list[tuple[float, float]]]) -> str:
    """Self-contained SVG line chart: one polyline per method."""
    width, height = 640, 440
    mleft, mright, mtop, mbottom = 70, 160, 40, 50
    plot_w, plot_h = width - mleft - mright, height - mtop - mbottom
    xs = sorted({x for pts in series.values() for x, _ in pts})
    ys = [y for pts in series.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_pad = abs(y_lo) * 0.1 + 1.0
        y_lo, y_hi = y_lo - y_pad, y_hi + y_pad
    else:
        pad = (y_hi - y_lo) * 0.08
        y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x: float) -> float:
        return mleft + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return mtop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{mleft}" y="24" font-family="sans-serif" font-size="16">{title}</text>',
        f'<line x1="{mleft}" y1="{mtop}" x2="{mleft}" y2="{mtop + plot_h}" stroke="black"/>',
        f'<line x1="{mleft}" y1="{mtop + plot_h}" x2="{mleft + plot_w}" '
        f'y2="{mtop + plot_h}" stroke="black"/>',
        f'<text x="{mleft + plot_w / 2:.1f}" y="{height - 12}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">sample size</text>',
        f'<text x="18" y="{mtop + plot_h / 2:.1f}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 18 {mtop + plot_h / 2:.1f})">{title}</text>',
    ]
    for x in xs:
        parts.append(
            f'<line x1="{sx(x):.2f}" y1="{mtop + plot_h}" x2="{sx(x):.2f}" '
            f'y2="{mtop + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{sx(x):.2f}" y="{mtop + plot_h + 20}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{x:g}</text>'
        )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<line x1="{mleft - 5}" y1="{sy(y):.2f}" x2="{mleft}" y2="{sy(y):.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{mleft - 9}" y="{sy(y) + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{y:.4g}</text>'
        )
    for idx, (name, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>'
        )
        for x, y in pts:
            parts.append(
                f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>'
            )
        ly = mtop + 16 * idx
        parts.append(
            f'<rect x="{mleft + plot_w + 14}" y="{ly}" width="12" height="12" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{mleft + plot_w + 32}" y="{ly + 10}" font-family="sans-serif" '
            f'font-size="12">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def emit_outputs(report: BenchReport, output_dir: str | Path) -> list[Path]:
    """Write report.json, metrics.csv and one SVG chart per metric."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    report_path = out / "report.json"
    report_path.write_text(json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")
    written.append(report_path)

    runs_dir = out / "runs"
    for row in report.rows:
        if row.run is None:
            continue
        runs_dir.mkdir(exist_ok=True)
        run_path = runs_dir / f"{row.method}_{row.sample_size}.json"
        run_path.write_text(
            json.dumps(run_to_dict(row.run), indent=2, sort_keys=True) + "\n"
        )
        written.append(run_path)

    csv_lines = ["method,size,metric,value"]
    for row in report.rows:
        for name in METRIC_NAMES:
            value = getattr(row.metrics, name)
            if value is None:
                continue
            csv_lines.append(f"{row.method},{row.sample_size},{name},{value!r}")
    csv_path = out / "metrics.csv"
    csv_path.write_text("\n".join(csv_lines) + "\n")
    written.append(csv_path)

    for name in METRIC_NAMES:
        series: dict[str, list[tuple[float, float]]] = {}
        for row in report.rows:
            value = getattr(row.metrics, name)
            if value is None:
                continue
            series.setdefault(row.method, []).append((float(row.sample_size), float(value)))
        if not series:
            continue
        svg_path = out / f"metric_{name}.svg"
        svg_path.write_text(_svg_chart(name, series) + "\n")
        written.append(svg_path)
    return written
