"""Command-line interface.

Verbs:

* ``analyze``  -- analytic models over a parameter grid, CSV + report out;
* ``simulate`` -- Monte Carlo estimation only;
* ``compare``  -- analytic models against Monte Carlo with relative errors;
* ``optimize`` -- rank interleaving depths under a fixed packet bit budget;
* ``oracle``   -- exhaustive reference values for one small instance.

Grid parameters come from an optional JSON config file; every command
line flag overrides the matching config entry.  The defaults reproduce a
standard evaluation grid of three shortened BCH-style codes under a
1008-bit packet budget.
"""

from __future__ import annotations

import argparse
import json
import sys

from .channel import ChannelSpec, CodeSpec, SchemeSpec, ibp_from_stats
from .models import ANALYTIC_MODELS, evaluate_models
from .oracle import (
    exact_block_error,
    exact_joint_law,
    exact_marginal_law,
    exact_packet_error,
)
from .sweep import (
    DECORRELATION_THRESHOLD,
    MODEL_NAMES,
    SweepSpec,
    emit_results,
    optimize_depth,
    run_sweep,
)

DEFAULT_CONFIG = {
    "channel": {
        "ber": [0.0001, 0.001, 0.005, 0.01, 0.02],
        "nacf": [0.3, 0.6, 0.9],
        "slot": 1.0,
    },
    "codes": [[63, 57, 1], [63, 45, 3], [63, 36, 5]],
    "pairs": [[1, 16], [2, 8], [4, 4], [8, 2], [16, 1]],
    "budget": 1008,
    "models": list(ANALYTIC_MODELS),
    "packets": 100_000,
    "seed": 1,
    "gamma": 0.95,
    "workers": 1,
    "output": {"csv": "results.csv", "report": "report.json"},
}


def _parse_floats(text):
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_ints(text, expect, what):
    parts = [int(part) for part in text.split(",") if part.strip()]
    if len(parts) != expect:
        raise argparse.ArgumentTypeError(f"{what} needs {expect} comma-separated integers")
    return parts


def _code_arg(text):
    return _parse_ints(text, 3, "a code (n,k,l)")


def _pair_arg(text):
    return _parse_ints(text, 2, "a pair (depth,blocks)")


def _add_grid_arguments(parser):
    parser.add_argument("--config", metavar="FILE", help="JSON config; flags override it")
    parser.add_argument("--ber", type=_parse_floats, metavar="P[,P...]",
                        help="bit error rates")
    parser.add_argument("--nacf", type=_parse_floats, metavar="C[,C...]",
                        help="lag-1 bit error correlations")
    parser.add_argument("--code", type=_code_arg, action="append", metavar="N,K,L",
                        help="code parameters; repeatable")
    parser.add_argument("--pair", type=_pair_arg, action="append", metavar="I,M",
                        help="(depth, blocks) pair; repeatable")
    parser.add_argument("--budget", type=int,
                        help="packet bit budget each pair must fill (0 disables the check)")
    parser.add_argument("--packets", type=int, help="Monte Carlo packets per grid point")
    parser.add_argument("--seed", type=int, help="root seed for Monte Carlo rows")
    parser.add_argument("--gamma", type=float, help="confidence level for intervals")
    parser.add_argument("--workers", type=int, help="worker threads for simulation")
    parser.add_argument("--slot", type=float, help="bit slot duration in seconds (metadata)")
    parser.add_argument("--csv", metavar="FILE", help="CSV output path")
    parser.add_argument("--report", metavar="FILE", help="JSON report output path")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="burstfec",
        description="Packet error models for interleaved FEC over correlated channels",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    analyze = verbs.add_parser("analyze", help="run the analytic models over a grid")
    _add_grid_arguments(analyze)
    analyze.add_argument("--models", help="comma list from: " + ",".join(ANALYTIC_MODELS))

    simulate = verbs.add_parser("simulate", help="Monte Carlo estimation over a grid")
    _add_grid_arguments(simulate)

    compare = verbs.add_parser("compare", help="analytic models against Monte Carlo")
    _add_grid_arguments(compare)
    compare.add_argument("--models", help="analytic models to compare against mc")

    optimize = verbs.add_parser("optimize", help="rank depths under a fixed bit budget")
    optimize.add_argument("--budget", type=int, default=1008)
    optimize.add_argument("--code", type=_code_arg, default=[63, 45, 3], metavar="N,K,L")
    optimize.add_argument("--ber", type=float, required=True)
    optimize.add_argument("--nacf", type=float, required=True)
    optimize.add_argument("--model", default="model3", choices=ANALYTIC_MODELS)
    optimize.add_argument("--threshold", type=float, default=DECORRELATION_THRESHOLD,
                          help="residual correlation considered decorrelated")

    oracle = verbs.add_parser("oracle", help="exhaustive reference for one small instance")
    oracle.add_argument("--n", type=int, required=True, help="codeword length")
    oracle.add_argument("--l", type=int, required=True, help="correctable errors")
    oracle.add_argument("--depth", type=int, required=True, help="interleaving depth")
    oracle.add_argument("--blocks", type=int, default=1)
    oracle.add_argument("--ber", type=float, required=True)
    oracle.add_argument("--nacf", type=float, required=True)

    return parser


def _load_config(path):
    with open(path) as handle:
        loaded = json.load(handle)
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    for key, value in loaded.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key].update(value)
        else:
            config[key] = value
    return config


def _merge_flags(config, args, models_default):
    if args.ber is not None:
        config["channel"]["ber"] = args.ber
    if args.nacf is not None:
        config["channel"]["nacf"] = args.nacf
    if args.code:
        config["codes"] = args.code
    if args.pair:
        config["pairs"] = args.pair
    for key in ("budget", "packets", "seed", "gamma", "workers"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    if args.slot is not None:
        config["channel"]["slot"] = args.slot
    if args.csv is not None:
        config["output"]["csv"] = args.csv
    if args.report is not None:
        config["output"]["report"] = args.report
    requested = getattr(args, "models", None)
    if requested:
        config["models"] = [part for part in requested.split(",") if part]
    elif "models" not in config or config["models"] is None:
        config["models"] = models_default
    return config


def _sweep_spec(config, models):
    channel = config["channel"]
    bers = channel["ber"] if isinstance(channel["ber"], list) else [channel["ber"]]
    nacfs = channel["nacf"] if isinstance(channel["nacf"], list) else [channel["nacf"]]
    budget = config.get("budget")
    return SweepSpec(
        bers=tuple(float(b) for b in bers),
        nacfs=tuple(float(c) for c in nacfs),
        codes=tuple(CodeSpec(*map(int, code)) for code in config["codes"]),
        pairs=tuple(SchemeSpec(*map(int, pair)) for pair in config["pairs"]),
        models=tuple(models),
        budget=None if not budget else int(budget),
        packets=int(config["packets"]),
        seed=int(config["seed"]),
        gamma=float(config["gamma"]),
        slot=float(channel.get("slot", 1.0)),
    )


def _run_grid_verb(args, models_default):
    config = _load_config(args.config) if args.config else json.loads(json.dumps(DEFAULT_CONFIG))
    config = _merge_flags(config, args, models_default)
    requested = config["models"]
    if args.verb == "simulate":
        models = ["mc"]
    elif args.verb == "compare":
        models = [m for m in requested if m != "mc"] + ["mc"]
    else:
        models = [m for m in requested if m != "mc"]
    bad = set(models) - set(MODEL_NAMES)
    if bad:
        print(f"error: unknown models {sorted(bad)}", file=sys.stderr)
        return 2
    config["models"] = models

    spec = _sweep_spec(config, models)
    on_row = None
    if not args.quiet:
        def on_row(row):
            value = row.p if row.p is not None else row.p_hat
            shown = "" if value is None else f" p={value:.6g}"
            tail = f" [{row.note}]" if row.note else ""
            print(
                f"{row.model} ber={row.ber:g} nacf={row.nacf:g}"
                f" ({row.code.n},{row.code.k},{row.code.l})"
                f" I={row.scheme.depth} M={row.scheme.blocks}{shown}{tail}",
                file=sys.stderr,
            )

    rows = run_sweep(spec, workers=int(config["workers"]), on_row=on_row)
    written = emit_results(
        rows, config["output"]["csv"], config["output"].get("report"), config=config
    )
    for path in written:
        print(f"wrote {path}", file=sys.stderr)

    failures = [row for row in rows if row.note and row.note.startswith("error")]
    for row in failures:
        print(f"error row: {row.model} ber={row.ber} nacf={row.nacf}: {row.note}",
              file=sys.stderr)
    return 1 if failures else 0


def _run_optimize(args):
    code = CodeSpec(*args.code)
    channel = ChannelSpec(ber=args.ber, nacf=args.nacf)
    candidates = optimize_depth(
        args.budget, code, channel, model=args.model, threshold=args.threshold
    )
    print("rank  I     M     p             residual_corr  decorrelated")
    for rank, cand in enumerate(candidates, start=1):
        print(
            f"{rank:<5d} {cand.scheme.depth:<5d} {cand.scheme.blocks:<5d} "
            f"{cand.packet_error:<13.6g} {cand.residual_corr:<14.6g} "
            f"{'yes' if cand.decorrelated else 'no'}"
        )
    best = candidates[0]
    print(
        f"best: I={best.scheme.depth} M={best.scheme.blocks} "
        f"p={best.packet_error:.6g}"
    )
    return 0


def _run_oracle(args):
    channel = ChannelSpec(ber=args.ber, nacf=args.nacf)
    model = ibp_from_stats(channel)
    slots = args.n * args.depth
    cap = args.l + 1
    p_block = exact_block_error(model, args.n, args.depth, args.l)
    p_packet = exact_packet_error(model, args.n, args.depth, args.l, args.blocks)
    print(f"exhaustive reference over {slots} slots per block")
    print(f"block error  : {p_block:.12g}")
    print(f"packet error : {p_packet:.12g}  (blocks={args.blocks})")
    marginal = exact_marginal_law(model, args.n, args.depth, cap)
    print("codeword error-count law (top bucket saturated at cap):")
    for count, prob in enumerate(marginal):
        label = f">={count}" if count == cap else f" ={count}"
        print(f"  {label}: {prob:.12g}")
    q = exact_joint_law(model, args.n, args.depth, cap)
    print("joint law of two adjacent codewords:")
    for i in range(cap + 1):
        print("  " + "  ".join(f"{q[i, j]:.6e}" for j in range(cap + 1)))
    code = CodeSpec(n=args.n, k=max(args.n - 1, 1), l=args.l) if args.n > 1 else None
    if code is not None:
        scheme = SchemeSpec(depth=args.depth, blocks=args.blocks)
        results = evaluate_models(model, code, scheme)
        print("model predictions for the same instance:")
        for name in ANALYTIC_MODELS:
            print(f"  {name:<9s}: {results[name].packet_error:.12g}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verb in ("analyze", "simulate", "compare"):
        return _run_grid_verb(args, models_default=list(ANALYTIC_MODELS))
    if args.verb == "optimize":
        return _run_optimize(args)
    if args.verb == "oracle":
        return _run_oracle(args)
    raise AssertionError(f"unhandled verb {args.verb!r}")


if __name__ == "__main__":
    sys.exit(main())
