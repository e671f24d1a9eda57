"""Command-line interface: generate / solve / bench / report.

Exit codes: 0 success, 2 configuration error, 3 solver or remote failure,
4 I/O error. A JSON config file may supply any bench flag; explicit
command-line flags take precedence. The remote auth token comes from
--remote-token or, failing that, the AQOCI_SOLVER_TOKEN environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .adaptive import LoopConfig, run_refinement, trace_to_dict
from .bench import (
    ExperimentConfig,
    config_from_dict,
    emit_outputs,
    report_from_dict,
    run_experiment,
)
from .data import load_csv, make_blobs, pca_2d
from .encoding import FixedPointCodec
from .errors import AqociError, ConfigurationError, ParseError, SolverError
from .samplers import SOLVER_TOKEN_ENV, AnnealConfig, RemoteSolverConfig, TabuConfig


def _add_dataset_flags(parser: argparse.ArgumentParser, bare: bool = False) -> None:
    # bare=True leaves every default as None so a config file can fill the
    # gaps while any explicitly given flag still wins (bench only)
    d = (lambda v: None) if bare else (lambda v: v)
    parser.add_argument("--blobs", type=int, metavar="N", help="use N seeded Gaussian-blob samples")
    parser.add_argument("--csv", metavar="PATH", help="load samples from a numeric CSV file")
    parser.add_argument(
        "--pca", action="store_const", const=True, default=d(False),
        help="reduce CSV data to 2-D with PCA",
    )
    parser.add_argument("--k", type=int, default=d(3))
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--std", type=float, default=d(1.0), help="blob standard deviation")


def _add_solver_flags(parser: argparse.ArgumentParser, bare: bool = False) -> None:
    d = (lambda v: None) if bare else (lambda v: v)
    parser.add_argument("--bits", type=int, default=d(4))
    parser.add_argument("--lower", type=float, default=d(-8.0))
    parser.add_argument("--upper", type=float, default=d(7.0))
    parser.add_argument("--iterations", type=int, default=d(10))
    parser.add_argument("--scale-factor", type=float, default=d(2.0))
    parser.add_argument("--sa-reads", type=int, default=d(8))
    parser.add_argument("--sa-sweeps", type=int, default=d(500))
    parser.add_argument("--tabu-restarts", type=int, default=d(8))
    parser.add_argument("--remote-endpoint")
    parser.add_argument("--remote-token")
    parser.add_argument("--remote-timeout", type=float, default=d(30.0))
    parser.add_argument(
        "--remote-fallback", action="store_const", const=True, default=d(False),
        help="fall back to local annealing when the remote solver is unreachable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aqoci", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded blob dataset as CSV")
    gen.add_argument("--out", required=True, metavar="PATH")
    gen.add_argument("--n", type=int, default=250)
    gen.add_argument("--k", type=int, default=3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--std", type=float, default=1.0)
    gen.add_argument("--labels-out", metavar="PATH", help="also write true labels, one per line")

    solve = sub.add_parser("solve", help="run one refinement and print the centroids")
    _add_dataset_flags(solve)
    _add_solver_flags(solve)
    solve.add_argument(
        "--sampler", choices=("sa", "tabu", "remote", "oracle"), default="sa"
    )
    solve.add_argument("--trace-out", metavar="PATH", help="write the iteration trace as JSON")

    bench = sub.add_parser("bench", help="run the full benchmark sweep")
    _add_dataset_flags(bench, bare=True)
    _add_solver_flags(bench, bare=True)
    bench.add_argument("--config", metavar="PATH", help="JSON file with ExperimentConfig fields")
    bench.add_argument("--sizes", type=int, nargs="+", metavar="N")
    bench.add_argument("--methods", nargs="+", metavar="NAME")
    bench.add_argument("--dataset-size", type=int)
    bench.add_argument("--out-dir", metavar="DIR")

    report = sub.add_parser("report", help="re-emit outputs from an existing report.json")
    report.add_argument("--report", required=True, metavar="PATH")
    report.add_argument("--out-dir", required=True, metavar="DIR")
    return parser


def _cmd_generate(args) -> int:
    dataset = make_blobs(args.n, args.k, args.seed, args.std)
    lines = [",".join(repr(float(v)) for v in dataset.points[:, i]) for i in range(dataset.n)]
    Path(args.out).write_text("\n".join(lines) + "\n")
    if args.labels_out:
        Path(args.labels_out).write_text(
            "\n".join(str(int(l)) for l in dataset.true_labels) + "\n"
        )
    print(f"wrote {dataset.n} samples to {args.out}")
    return 0


def _dataset_from_args(args):
    if args.csv:
        dataset = load_csv(args.csv)
        if args.pca:
            dataset = pca_2d(dataset)
        return dataset
    n = args.blobs if args.blobs else 250
    return make_blobs(n, args.k, args.seed, args.std)


def _cmd_solve(args) -> int:
    dataset = _dataset_from_args(args)
    remote = None
    if args.sampler == "remote":
        token = args.remote_token or os.environ.get(SOLVER_TOKEN_ENV)
        if not args.remote_endpoint and not args.remote_fallback:
            raise ConfigurationError("remote sampler needs --remote-endpoint or --remote-fallback")
        remote = RemoteSolverConfig(
            endpoint=args.remote_endpoint or "http://127.0.0.1:0",
            auth_token=token,
            timeout=args.remote_timeout,
            offline_fallback=args.remote_fallback,
        )
    config = LoopConfig(
        max_iterations=args.iterations,
        sampler=args.sampler,
        anneal=AnnealConfig(num_reads=args.sa_reads, sweeps=args.sa_sweeps, seed=args.seed),
        tabu=TabuConfig(restarts=args.tabu_restarts, seed=args.seed),
        remote=remote,
        lower_limit=args.lower,
        upper_limit=args.upper,
        scale_factor=args.scale_factor,
    )
    result = run_refinement(dataset.points, args.k, FixedPointCodec(args.bits), config)
    print("centroids (features x clusters):")
    for row in result.w:
        print("  " + "  ".join(f"{v: .6f}" for v in row))
    print(f"one-hot valid: {result.one_hot_valid}")
    if args.trace_out:
        Path(args.trace_out).write_text(
            json.dumps(trace_to_dict(result.state), indent=2, sort_keys=True) + "\n"
        )
        print(f"trace written to {args.trace_out}")
    return 0


def _bench_config(args) -> ExperimentConfig:
    payload: dict = {}
    if args.config:
        try:
            payload = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"bad config file {args.config}: {exc}") from exc
        if not isinstance(payload, dict):
            raise ConfigurationError("config file must hold a JSON object")

    overrides: dict = {}
    if args.csv:
        overrides["dataset"] = "csv"
        overrides["csv_path"] = args.csv
    elif args.blobs:
        overrides["dataset"] = "blobs"
        overrides["dataset_size"] = args.blobs
    if args.sizes:
        overrides["sample_sizes"] = tuple(args.sizes)
    if args.methods:
        overrides["methods"] = tuple(args.methods)
    if args.dataset_size is not None:
        overrides["dataset_size"] = args.dataset_size
    if args.out_dir:
        overrides["output_dir"] = args.out_dir
    if args.remote_token or os.environ.get(SOLVER_TOKEN_ENV):
        overrides["remote_token"] = args.remote_token or os.environ.get(SOLVER_TOKEN_ENV)

    # bench flags default to None, so any explicitly given flag overrides the
    # config file even when it repeats the documented default value
    for flag, key in [
        ("pca", "pca"), ("k", "k"), ("seed", "seed"), ("std", "blob_std"),
        ("bits", "bits"), ("lower", "lower"), ("upper", "upper"),
        ("iterations", "iterations"), ("scale_factor", "scale_factor"),
        ("sa_reads", "sa_reads"), ("sa_sweeps", "sa_sweeps"),
        ("tabu_restarts", "tabu_restarts"), ("remote_endpoint", "remote_endpoint"),
        ("remote_timeout", "remote_timeout"), ("remote_fallback", "remote_fallback"),
    ]:
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value

    payload.update(overrides)
    return config_from_dict(payload)


def _cmd_bench(args) -> int:
    config = _bench_config(args)
    report = run_experiment(config)
    written = emit_outputs(report, config.output_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_report(args) -> int:
    try:
        payload = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.report}: {exc}") from exc
    report = report_from_dict(payload)
    written = emit_outputs(report, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except AqociError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
