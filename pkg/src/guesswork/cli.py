"""Command line entry point: ``guesswork solve|oracle|simulate|channels``.

Exit codes: 0 success, 2 invalid input, 3 cost not balanced, 4 time budget
exceeded (the incumbent is still printed, flagged ``"bound_only": true``).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from pathlib import Path


from . import __version__
from .channels import FAMILY_NAMES, channel_to_dict, generate_hsic, load_channel, save_channel
from .model import CostFunction, GuessworkError
from .oracle import DEFAULT_CAP, CapExceeded, brute_force_norm
from .score import NotBalanced, as_cost, build_optimal_measurement
from .sim import simulate_game
from .solver import select_regime, solve
from .symmetry import symmetries_or_trivial

EXIT_OK, EXIT_INVALID, EXIT_NOT_BALANCED, EXIT_BUDGET = 0, 2, 3, 4

SOLVE_CSV_HEADER = ["command", "channel", "size", "regime", "value", "best_norm", "numbering",
                    "leaves_visited", "nodes_expanded", "wall_time", "bound_only", "threads",
                    "input_hash", "version"]


def _load(spec: str):
    if spec in FAMILY_NAMES:
        return generate_hsic(spec), None
    return load_channel(spec, with_prior=True)


def _cost(spec: str, size: int) -> CostFunction:
    if spec == "identity":
        return CostFunction.identity(size)
    if spec.startswith("file:"):
        try:
            values = json.loads(Path(spec[5:]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise GuessworkError(f"cannot read cost file: {exc}") from exc
        return as_cost(values, size)
    raise GuessworkError(f"cost must be 'identity' or 'file:<path>', got {spec!r}")


def _manifest(channel, cost: CostFunction, threads=None, seed=None) -> dict:
    payload = json.dumps({"channel": channel_to_dict(channel), "cost": cost.values.tolist()}, sort_keys=True)
    return {
        "input_hash": hashlib.sha256(payload.encode()).hexdigest(),
        "version": __version__,
        "threads": threads,
        "seed": seed,
    }


def _emit(record: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(record, indent=2))
        return
    row = {k: record.get(k, record["manifest"].get(k)) for k in SOLVE_CSV_HEADER}
    row["numbering"] = " ".join(map(str, row["numbering"] or []))
    for k, v in row.items():
        if isinstance(v, float):
            row[k] = format(v, ".17g")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SOLVE_CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    sys.stdout.write(buf.getvalue())


def cmd_solve(args) -> int:
    channel, _ = _load(args.channel)
    cost = _cost(args.cost, channel.size)
    res = solve(channel, cost, threads=args.threads, regime=args.regime, time_budget=args.time_budget)
    record = {
        "command": "solve",
        "channel": channel.name or args.channel,
        "size": channel.size,
        "value": res.value,
        "best_norm": res.best_norm,
        "numbering": res.labels(channel),
        "regime": res.regime.value,
        "leaves_visited": res.leaves_visited,
        "nodes_expanded": res.nodes_expanded,
        "wall_time": res.wall_time,
        "bound_only": res.bound_only,
        "greedy_value": cost.mean - res.greedy_norm,
        "manifest": _manifest(channel, cost, threads=args.threads),
    }
    _emit(record, args.format)
    return EXIT_BUDGET if res.bound_only else EXIT_OK


def cmd_oracle(args) -> int:
    channel, _ = _load(args.channel)
    cost = _cost(args.cost, channel.size)
    if not cost.is_balanced:
        raise NotBalanced(f"cost {cost.values.tolist()} is not balanced")
    regime = select_regime(symmetries_or_trivial(channel), cost, args.regime)
    norm, numbering = brute_force_norm(channel, cost.centered, regime, cap=args.cap)
    record = {
        "command": "oracle",
        "channel": channel.name or args.channel,
        "size": channel.size,
        "value": cost.mean - norm,
        "best_norm": norm,
        "numbering": [channel.labels[i] for i in numbering],
        "regime": regime.value,
        "manifest": _manifest(channel, cost),
    }
    _emit(record, args.format)
    return EXIT_OK


def cmd_simulate(args) -> int:
    channel, prior = _load(args.channel)
    cost = _cost(args.cost, channel.size)
    res = solve(channel, cost, threads=args.threads, time_budget=args.time_budget)
    measurement = build_optimal_measurement(channel, cost, res.best_numbering)
    report = simulate_game(channel, prior, cost, measurement, args.shots, args.seed)
    record = {
        "command": "simulate",
        "channel": channel.name or args.channel,
        "size": channel.size,
        "closed_form_value": res.value,
        "bound_only": res.bound_only,
        **report.to_dict(),
        "manifest": _manifest(channel, cost, threads=args.threads, seed=args.seed),
    }
    print(json.dumps(record, indent=2))
    return EXIT_BUDGET if res.bound_only else EXIT_OK


def cmd_channels(args) -> int:
    if args.action == "list":
        for name in FAMILY_NAMES:
            print(f"{name}\t{generate_hsic(name).size}")
        return EXIT_OK
    channel = generate_hsic(args.family)
    if args.out:
        save_channel(channel, args.out)
    else:
        print(json.dumps(channel_to_dict(channel), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guesswork", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def channel_args(p):
        p.add_argument("--channel", required=True, help="HSIC family name or channel JSON path")
        p.add_argument("--cost", default="identity", help="'identity' or 'file:<path>' (JSON list)")

    p = sub.add_parser("solve", help="exact maximin guesswork by branch and bound")
    channel_args(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--regime", default="auto", choices=["auto", "general", "transitive", "cs", "transitive-cs"])
    p.add_argument("--time-budget", type=float, default=None, metavar="SECONDS")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force enumeration of the regime's numberings")
    channel_args(p)
    p.add_argument("--regime", default="auto", choices=["auto", "general", "transitive", "cs", "transitive-cs"])
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo guessing game with the optimal measurement")
    channel_args(p)
    p.add_argument("--shots", type=int, default=4000, help="shots per state")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--time-budget", type=float, default=None, metavar="SECONDS")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("channels", help="list or export the HSIC channels")
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("--family", choices=FAMILY_NAMES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_channels)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    if args.command == "channels" and args.action == "export" and not args.family:
        parser.error("channels export needs --family")
    try:
        return args.func(args)
    except NotBalanced as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_BALANCED
    except (GuessworkError, CapExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
