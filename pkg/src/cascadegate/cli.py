"""Command-line entry point: replay, sweep, synth and serve.

Exit codes: 0 success, 1 usage, 2 data/schema, 3 runtime.
"""

from __future__ import annotations

import argparse
import sys

from cascadegate import evaluate, replay, synth
from cascadegate.errors import (
    BudgetRangeError,
    CascadeGateError,
    ConfigError,
    CurveError,
    GridError,
    ParameterError,
    RangeError,
)
from cascadegate.policy import (
    COMMITTEE_CASCADE,
    FRUGAL_CASCADE,
    HYBRID_ROUTING,
    MARGIN_CASCADE,
    RANDOM_ROUTING,
    SCORE_ROUTING,
    STRATEGIES,
    PolicyConfig,
)
from cascadegate.records import CostScheme

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

_USAGE_ERRORS = (BudgetRangeError, GridError, ParameterError, RangeError, ConfigError, CurveError)

STRATEGY_ALIASES = {
    "random": RANDOM_ROUTING,
    "routing": SCORE_ROUTING,
    "router": SCORE_ROUTING,
    "hybrid": HYBRID_ROUTING,
    "frugal": FRUGAL_CASCADE,
    "margin": MARGIN_CASCADE,
    "committee": COMMITTEE_CASCADE,
}


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for data."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def resolve_strategy(name: str) -> str:
    canonical = STRATEGY_ALIASES.get(name, name)
    if canonical not in STRATEGIES:
        raise ConfigError(
            f"unknown strategy {name!r}; choose from "
            f"{sorted(STRATEGIES) + sorted(STRATEGY_ALIASES)}"
        )
    return canonical


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cascadegate", description="Cost-aware model-cascade engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_replay = sub.add_parser("replay", help="replay a dataset through one strategy")
    p_replay.add_argument("--data", required=True, help="NDJSON dataset path")
    p_replay.add_argument("--strategy", required=True, help="strategy name or alias")
    group = p_replay.add_mutually_exclusive_group(required=True)
    group.add_argument("--budget", type=float, help="target average cost per query")
    group.add_argument("--p", type=float, help="large-call probability, bypassing conversion")
    p_replay.add_argument("--cs", type=float, help="fixed average small cost")
    p_replay.add_argument("--cl", type=float, help="fixed average large cost")
    p_replay.add_argument("--seed", type=int, default=0)
    p_replay.add_argument("--warmup", type=int, default=10)
    p_replay.add_argument("--shuffle", action="store_true", help="seeded shuffle of arrival order")
    p_replay.add_argument("--include-warmup-cost", action="store_true")
    p_replay.add_argument("--trace-out", help="write the decision trace as NDJSON")

    p_sweep = sub.add_parser("sweep", help="budget sweep producing curve and AUC tables")
    p_sweep.add_argument("--data", required=True)
    p_sweep.add_argument(
        "--strategy",
        action="append",
        default=None,
        help="repeatable; defaults to every strategy the dataset supports",
    )
    p_sweep.add_argument("--grid", type=int, default=evaluate.DEFAULT_GRID_POINTS)
    p_sweep.add_argument("--seeds", type=int, default=3, help="number of seeds (0..n-1)")
    p_sweep.add_argument("--cs", type=float, default=None)
    p_sweep.add_argument("--cl", type=float, action="append", default=None,
                         help="repeatable for multiple cost schemes")
    p_sweep.add_argument("--warmup", type=int, default=10)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--extended", action="store_true",
                         help="also evaluate cascades past avg_large (excluded from AUC)")
    p_sweep.add_argument("--curves-out", help="curve table path (default: stdout)")
    p_sweep.add_argument("--auc-out", help="AUC table path (default: stdout)")
    p_sweep.add_argument("--realized-out", help="realized-budget audit table path")

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--n", type=int, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--beta-a", type=float, default=2.0)
    p_synth.add_argument("--beta-b", type=float, default=2.0)
    p_synth.add_argument("--link-slope", type=float, default=4.0)
    p_synth.add_argument("--link-intercept", type=float, default=-1.0)
    p_synth.add_argument("--large-accuracy", type=float, default=0.9)
    p_synth.add_argument("--vocab-size", type=int, default=5)
    p_synth.add_argument("--score-noise", type=float, default=0.75)
    p_synth.add_argument("--cost-small", type=float, default=1.0)
    p_synth.add_argument("--cost-large", type=float, default=10.0)

    p_serve = sub.add_parser("serve", help="run the live gateway")
    p_serve.add_argument("--config", required=True, help="gateway JSON config path")
    p_serve.add_argument("--listen", default="127.0.0.1:8800", help="host:port to bind")

    return parser


def _scheme_for(records, cs: float | None, cl: float | None) -> CostScheme:
    from cascadegate.costs import measure_averages

    if (cs is None) != (cl is None):
        raise ConfigError("--cs and --cl must be given together (or neither, to measure)")
    if cs is not None:
        return CostScheme.fixed(cs, cl)
    return measure_averages(records)


def _cmd_replay(args) -> int:
    strategy = resolve_strategy(args.strategy)
    records = replay.load_dataset(args.data)
    if args.p is not None:
        probability = args.p
    else:
        scheme = _scheme_for(records, args.cs, args.cl)
        probability = evaluate.target_probability(strategy, args.budget, scheme)
    if args.shuffle:
        records = replay.shuffle_records(records, args.seed)
    config = PolicyConfig(
        strategy=strategy,
        probability=probability,
        seed=args.seed,
        warmup_target=args.warmup,
    )
    trace = replay.run_replay(records, config, include_warmup_cost=args.include_warmup_cost)
    if args.trace_out:
        replay.write_trace(trace, args.trace_out)
    print(f"strategy={strategy} probability={probability:.6f}")
    print(
        f"evaluated={trace.evaluated_queries} warmup={trace.warmup_count} "
        f"accuracy={trace.accuracy:.6f} avg_cost={trace.avg_cost:.6f} "
        f"escalation_rate={trace.escalation_rate:.6f}"
    )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    records = replay.load_dataset(args.data)
    if args.strategy is not None and len(args.strategy) == 0:
        raise ConfigError("empty strategy list")
    if args.strategy is None:
        strategies = evaluate.available_strategies(records)
    else:
        strategies = [resolve_strategy(name) for name in args.strategy]
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    seeds = list(range(args.seeds))

    large_costs = args.cl if args.cl is not None else [None]
    schemes = [_scheme_for(records, args.cs, cl) for cl in large_costs]

    all_results: list[evaluate.SweepResult] = []
    curve_blocks: list[str] = []
    realized_blocks: list[str] = []
    for scheme in schemes:
        results = [
            evaluate.sweep(
                records,
                strategy,
                scheme,
                seeds=seeds,
                warmup_target=args.warmup,
                n_points=args.grid,
                jobs=args.jobs,
                extended=args.extended,
            )
            for strategy in strategies
        ]
        all_results.extend(results)
        curve_blocks.append(evaluate.format_curve_table(results))
        realized_blocks.append(evaluate.format_realized_table(results))

    curves_text = "\n".join(curve_blocks)
    auc_text = evaluate.format_auc_table(all_results)
    if args.curves_out:
        evaluate.write_text(curves_text, args.curves_out)
    else:
        print(curves_text, end="")
    if args.auc_out:
        evaluate.write_text(auc_text, args.auc_out)
    else:
        print(auc_text, end="")
    if args.realized_out:
        evaluate.write_text("\n".join(realized_blocks), args.realized_out)
    return EXIT_OK


def _cmd_synth(args) -> int:
    params = synth.SynthParams(
        margin_beta_a=args.beta_a,
        margin_beta_b=args.beta_b,
        link_slope=args.link_slope,
        link_intercept=args.link_intercept,
        large_accuracy=args.large_accuracy,
        vocab_size=args.vocab_size,
        score_noise=args.score_noise,
        cost_small=args.cost_small,
        cost_large=args.cost_large,
    )
    records = synth.generate(args.n, args.seed, params)
    replay.dump_dataset(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from cascadegate.gateway import create_app, load_config

    config = load_config(args.config)
    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise ConfigError(f"--listen must be host:port, got {args.listen!r}")
    app = create_app(config)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "replay": _cmd_replay,
        "sweep": _cmd_sweep,
        "synth": _cmd_synth,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except _USAGE_ERRORS as exc:
        print(f"cascadegate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"cascadegate: file error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CascadeGateError as exc:
        print(f"cascadegate: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"cascadegate: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
