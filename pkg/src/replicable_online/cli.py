"""Command-line entry point: ``replicable-online <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .adversaries import load_adversary, sample_trajectory
from .harness import (ALGORITHMS, CSV_COLUMNS, TRADEOFF_COLUMNS, ConfigError, LearnerSpec,
                      estimate_replicability, evaluate_regret, paired_run, play, rows_to_csv,
                      sweep, tradeoff_experiment)
from .core import regret
from .randomness import RandomnessBundle


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    p.add_argument("--alg", default="fllb", choices=ALGORITHMS + ("flbb",))
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--rho", type=float, default=0.2)
    p.add_argument("--B", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--internal", choices=("ftpl", "ftplbs"))
    p.add_argument("--K", type=float, help="iid-experts fallback budget override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--adversary", default="bernoulli", help="builtin name or JSON file")
    p.add_argument("--out", help="write here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="replicable-online",
                                     description="Replicable online learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("run", "play one trajectory and print the transcript"),
                        ("paired", "one paired run with shared learner randomness"),
                        ("replicability", "estimate the full-sequence match rate"),
                        ("regret", "estimate expected regret"),
                        ("sweep", "grid of replicability and regret estimates"),
                        ("tradeoff", "coin-problem trade-off experiment")]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "tradeoff":
            p.add_argument("--taus", type=float, nargs="+", default=[0.05])
            p.add_argument("--rhos", type=float, nargs="+", default=[0.05, 0.4])
    return parser


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Fill flags from ``--config``; flags given explicitly on the command line win."""
    if not args.config:
        return {}
    with open(args.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ConfigError("config: expected a JSON object")
    defaults = vars(parser.parse_args([args.command]))
    for key, value in config.items():
        if key == "axes" or key in ("master_seed", "regret_trials", "confidence"):
            continue
        if key not in defaults:
            raise ConfigError(f"{key}: unknown configuration key")
        if getattr(args, key) == defaults[key]:
            setattr(args, key, value)
    return config


def _spec(args) -> LearnerSpec:
    return LearnerSpec(args.alg, args.T, args.n, args.rho, args.B, args.eps, args.internal, args.K)


def _emit(args, payload, csv_text: Optional[str] = None) -> None:
    text = csv_text if args.format == "csv" and csv_text is not None else \
        json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if hasattr(x, "__dict__"):
        return vars(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _transcript_rows(tr) -> str:
    lines = ["t,action,cost"]
    lines += [f"{t},{a},{c!r}" for t, (a, c) in
              enumerate(zip(tr.actions.tolist(), tr.costs_incurred.tolist()), 1)]
    return "\n".join(lines) + "\n"


def cmd_run(args, config) -> None:
    spec = _spec(args)
    seq = load_adversary(args.adversary, args.T, args.n, spec.norm)
    root = RandomnessBundle(args.seed)
    costs = sample_trajectory(seq, root.fork("traj1", 0))
    learner = spec(root.fork("alg", 0))
    tr = play(learner, costs)
    rep = regret(tr, costs, learner.action_set)
    B, eps = spec.resolved()
    payload = {"alg": spec.alg, "T": seq.T, "n": seq.n, "B": B, "eps": eps,
               "actions": tr.actions, "costs": tr.costs_incurred,
               "total_cost": rep.total_cost, "regret": rep.regret}
    if hasattr(learner, "blocks"):
        payload["blocks"] = [vars(b) for b in learner.blocks]
        payload["fallback_start"] = learner.fallback_start
    _emit(args, payload, _transcript_rows(tr))


def cmd_paired(args, config) -> None:
    spec = _spec(args)
    seq = load_adversary(args.adversary, args.T, args.n, spec.norm)
    r = paired_run(spec, seq, RandomnessBundle(args.seed))
    payload = {"alg": spec.alg, "identical": r.identical, "first_divergence": r.first_divergence,
               "step_match_rate": r.step_match_rate,
               "actions_1": r.transcript_1.actions, "actions_2": r.transcript_2.actions}
    lines = ["t,action_1,action_2"] + [
        f"{t},{a},{b}" for t, (a, b) in
        enumerate(zip(r.transcript_1.actions.tolist(), r.transcript_2.actions.tolist()), 1)]
    _emit(args, payload, "\n".join(lines) + "\n")


def cmd_replicability(args, config) -> None:
    spec = _spec(args)
    seq = load_adversary(args.adversary, args.T, args.n, spec.norm)
    est = estimate_replicability(spec, seq, args.trials, args.seed,
                                 config.get("confidence", 0.95), args.workers)
    payload = {"alg": spec.alg, "adversary": args.adversary, **vars(est)}
    header = ",".join(payload)
    _emit(args, payload, header + "\n" + ",".join(str(v) for v in payload.values()) + "\n")


def cmd_regret(args, config) -> None:
    spec = _spec(args)
    seq = load_adversary(args.adversary, args.T, args.n, spec.norm)
    summary = evaluate_regret(spec, seq, args.trials, args.seed)
    payload = {"alg": spec.alg, "adversary": args.adversary, "mean": summary.mean,
               "se": summary.se, "regrets": summary.regrets}
    lines = ["trial,regret"] + [f"{i},{r!r}" for i, r in enumerate(summary.regrets.tolist())]
    _emit(args, payload, "\n".join(lines) + "\n")


def cmd_sweep(args, config) -> None:
    if not config:
        config = {"axes": {"alg": [args.alg], "T": [args.T], "n": [args.n], "rho": [args.rho],
                           "adversary": [args.adversary]}}
    config = {"trials": args.trials, "master_seed": args.seed, **config}
    if args.format == "csv" and args.out:
        sweep(config, args.out, args.workers)  # resumable; writes the file itself
        return
    rows = sweep(config, None, args.workers)
    _emit(args, [{c: r[c] for c in CSV_COLUMNS} for r in rows], rows_to_csv(rows))


def cmd_tradeoff(args, config) -> None:
    rows = tradeoff_experiment(args.T, args.taus, args.rhos, trials=args.trials,
                               master_seed=args.seed, algorithms=(args.alg,))
    lines = [",".join(TRADEOFF_COLUMNS)] + [
        ",".join(str(r[c]) for c in TRADEOFF_COLUMNS) for r in rows]
    _emit(args, rows, "\n".join(lines) + "\n")


COMMANDS = {"run": cmd_run, "paired": cmd_paired, "replicability": cmd_replicability,
            "regret": cmd_regret, "sweep": cmd_sweep, "tradeoff": cmd_tradeoff}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _apply_config(args, parser)
        COMMANDS[args.command](args, config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
