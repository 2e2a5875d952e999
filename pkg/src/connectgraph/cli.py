"""Command line interface.

Exit codes: 0 on success, 2 for invalid flags or flag values (the message
names the offending flag), 1 for numerical failures and failed verify runs.
The CONNECTGRAPH_SEED environment variable, when set, overrides --seed and
--base-seed.  All output is deterministic: floats carry 17 significant
digits and repeated invocations (any --threads value) are byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import experiments, verify
from .graph_core import SeparationKernelParams, ToyKernelParams
from .sbm import SbmParams, sample_adjacency
from .serialize import json_dumps

_SEED_ENV = "CONNECTGRAPH_SEED"


class _ValidationError(Exception):
    """Flag-level validation problem; message names the flag."""


def _require(cond: bool, flag: str, msg: str) -> None:
    if not cond:
        raise _ValidationError(f"{flag} {msg}")


def _unit_interval(value: float, flag: str) -> float:
    _require(0.0 <= value <= 1.0, flag, f"must lie in [0, 1], got {value!r}")
    return value


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="write the report here instead of stdout")


def _add_toy_weights(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)


def _add_sbm_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=int, required=True, help="classes")
    p.add_argument("--m", type=int, required=True, help="domains")
    p.add_argument("--n", type=int, required=True, help="nodes per block")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="connectgraph",
        description="Spectral contrastive embeddings on augmentation graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("toy", help="four-node pipeline report")
    _add_toy_weights(p)
    p.add_argument("--eta", type=float, default=0.05)
    _add_output(p)

    p = sub.add_parser("separation", help="eight-node baseline comparison")
    _add_toy_weights(p)
    p.add_argument("--lam", type=float, default=1.0, help="domain-term multiplier")
    p.add_argument("--eta", type=float, default=0.05)
    _add_output(p)

    p = sub.add_parser("sbm-run", help="single block-model trial")
    _add_sbm_params(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expected", action="store_true", help="use the expected adjacency")
    _add_output(p)

    p = sub.add_parser("sbm-sweep", help="vary one parameter over a grid")
    _add_sbm_params(p)
    p.add_argument("--vary", required=True, choices=["rho", "alpha", "beta", "gamma", "n", "eta"])
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--expected", action="store_true")
    _add_output(p)

    p = sub.add_parser("ablate", help="remove cross-domain edges, then probe")
    _add_sbm_params(p)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("fit", help="log-ratio connectivity regression on a CSV")
    p.add_argument("--input", required=True, help="CSV: pair_id,accuracy,alpha,beta,gamma")
    _add_output(p)

    p = sub.add_parser("paper-tables", help="fit the embedded benchmark tables")
    _add_output(p)

    p = sub.add_parser("verify", help="run the built-in invariant checks")
    p.add_argument("--suite", action="append", choices=list(verify.SUITES), default=None)
    p.add_argument("--threads", type=int, default=1)
    _add_output(p)

    return parser


def _toy_params(args) -> ToyKernelParams:
    for flag in ("rho", "alpha", "beta", "gamma"):
        _unit_interval(getattr(args, flag), f"--{flag}")
    total = args.rho + args.alpha + args.beta + args.gamma
    _require(abs(total - 1.0) <= 1e-12, "--rho/--alpha/--beta/--gamma", f"must sum to 1, got {total!r}")
    return ToyKernelParams(args.rho, args.alpha, args.beta, args.gamma)


def _separation_params(args) -> SeparationKernelParams:
    for flag in ("rho", "alpha", "beta", "gamma"):
        _unit_interval(getattr(args, flag), f"--{flag}")
    total = args.rho + 2 * args.alpha + args.beta + 2 * args.gamma
    _require(
        abs(total - 1.0) <= 1e-12,
        "--rho/--alpha/--beta/--gamma",
        f"must satisfy rho + 2*alpha + beta + 2*gamma = 1, got {total!r}",
    )
    return SeparationKernelParams(args.rho, args.alpha, args.beta, args.gamma)


def _sbm_params(args) -> SbmParams:
    _require(args.r >= 2, "--r", "must be >= 2")
    _require(args.m >= 2, "--m", "must be >= 2")
    _require(args.n >= 1, "--n", "must be >= 1")
    for flag in ("rho", "alpha", "beta", "gamma"):
        _unit_interval(getattr(args, flag), f"--{flag}")
    return SbmParams(args.r, args.m, args.n, args.rho, args.alpha, args.beta, args.gamma)


def _check_eta(args) -> None:
    if getattr(args, "eta", None) is not None:
        _require(args.eta >= 0.0, "--eta", "must be nonnegative")


def _check_k(args, n_nodes: int) -> None:
    if getattr(args, "k", None) is not None:
        _require(1 <= args.k <= n_nodes, "--k", f"must lie in [1, {n_nodes}]")


def _apply_seed_env(args) -> None:
    raw = os.environ.get(_SEED_ENV)
    if raw is None:
        return
    try:
        seed = int(raw)
    except ValueError:
        raise _ValidationError(f"{_SEED_ENV} must be an integer, got {raw!r}") from None
    if hasattr(args, "seed"):
        args.seed = seed
    if hasattr(args, "base_seed"):
        args.base_seed = seed


def _cmd_toy(args) -> tuple[str, int]:
    _check_eta(args)
    report = experiments.run_toy(_toy_params(args), eta=args.eta)
    return json_dumps(report) + "\n", 0


def _cmd_separation(args) -> tuple[str, int]:
    _check_eta(args)
    _require(args.lam >= 0.0, "--lam", "must be nonnegative")
    report = experiments.run_separation(_separation_params(args), lam=args.lam, eta=args.eta)
    return json_dumps(report) + "\n", 0


def _cmd_sbm_run(args) -> tuple[str, int]:
    p = _sbm_params(args)
    _check_eta(args)
    _check_k(args, p.n_nodes)
    rec = experiments.run_sbm_trial(p, k=args.k, eta=args.eta, seed=args.seed, expected=args.expected)
    return json_dumps(rec.to_json_dict()) + "\n", 0


def _cmd_sbm_sweep(args) -> tuple[str, int]:
    p = _sbm_params(args)
    _check_eta(args)
    _check_k(args, p.n_nodes)
    _require(args.steps >= 1, "--steps", "must be >= 1")
    _require(args.trials >= 1, "--trials", "must be >= 1")
    _require(args.threads >= 1, "--threads", "must be >= 1")
    grid = np.linspace(args.start, args.stop, args.steps) if args.steps > 1 else np.array([args.start])
    if args.vary == "n":
        for v in grid:
            _require(v >= 1 and float(v) == int(v), "--from/--to/--steps", "must yield integer n values")
    elif args.vary != "eta":
        for v in grid:
            _require(0.0 <= v <= 1.0, "--from/--to", "must keep probabilities in [0, 1]")
    else:
        for v in grid:
            _require(v >= 0.0, "--from/--to", "must keep eta nonnegative")
    rows = experiments.sweep(
        p,
        args.vary,
        list(grid),
        args.trials,
        base_seed=args.base_seed,
        eta=args.eta,
        k=args.k,
        threads=args.threads,
        expected=args.expected,
    )
    return experiments.sweep_csv(rows), 0


def _cmd_ablate(args) -> tuple[str, int]:
    p = _sbm_params(args)
    _check_eta(args)
    _check_k(args, p.n_nodes)
    _require(0.0 <= args.fraction <= 1.0, "--fraction", "must lie in [0, 1]")
    graph = sample_adjacency(p, args.seed)
    ablated = experiments.ablate_cross_edges(graph, args.fraction, args.seed)
    rec = experiments.evaluate_graph(ablated, k=args.k, eta=args.eta, seed=args.seed)
    report = rec.to_json_dict()
    report["fraction"] = args.fraction
    report["edge_count_before"] = graph.edge_count
    report["edge_count_after"] = ablated.edge_count
    return json_dumps(report) + "\n", 0


def _cmd_fit(args) -> tuple[str, int]:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise _ValidationError(f"--input cannot be read: {exc}") from None
    _require(bool(lines), "--input", "file is empty")
    header = lines[0].split(",")
    want = ["pair_id", "accuracy", "alpha", "beta", "gamma"]
    _require(header == want, "--input", f"header must be {','.join(want)}")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        _require(len(parts) == 5, "--input", f"malformed row: {ln!r}")
        try:
            records.append(
                experiments.ConnectivityRecord(
                    parts[0], float(parts[1]), float(parts[2]), float(parts[3]), float(parts[4])
                )
            )
        except ValueError as exc:
            raise _ValidationError(f"--input row {ln!r}: {exc}") from None
    fit = experiments.fit_connectivity(records)
    return json_dumps(fit.to_json_dict()) + "\n", 0


def _cmd_paper_tables(args) -> tuple[str, int]:
    return json_dumps(experiments.paper_table_fit()) + "\n", 0


def _cmd_verify(args) -> tuple[str, int]:
    _require(args.threads >= 1, "--threads", "must be >= 1")
    _, failed, text = verify.run_verify(args.suite, threads=args.threads)
    return text, 0 if failed == 0 else 1


_COMMANDS = {
    "toy": _cmd_toy,
    "separation": _cmd_separation,
    "sbm-run": _cmd_sbm_run,
    "sbm-sweep": _cmd_sbm_sweep,
    "ablate": _cmd_ablate,
    "fit": _cmd_fit,
    "paper-tables": _cmd_paper_tables,
    "verify": _cmd_verify,
}


def parse_and_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed a flag-naming message
        return int(exc.code) if exc.code else 0
    try:
        _apply_seed_env(args)
        text, code = _COMMANDS[args.command](args)
    except _ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
