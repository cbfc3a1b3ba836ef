"""Command-line front end.

Subcommands:
    subset-gen   materialize a pad subset and print its pads
    predict      recovery success rate for a block length, or invert a target
    mask-level   exact leakage table for a subset and sender population
    simulate     run one scenario from a JSON config file
    experiment   sweep one or two scenario parameters from a JSON config

All table-producing commands accept --out FILE and --format {csv,json-lines}
and exit 0 on success, nonzero with a message on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, bits, leakage, output, protocol, simulate, spectrum


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the table to this file instead of stdout")
    p.add_argument("--format", choices=output.FORMATS, default="csv")


def _add_subset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--channels", type=int, required=True, help="report length M")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--phi", type=int, help="vote block length")
    group.add_argument("--pairs", type=int, help="number of independent complement pairs")
    group.add_argument("--p-target", type=float, help="per-block recovery rate to size phi for")
    p.add_argument("--eta", type=float, help="agreement probability (required with --p-target)")
    p.add_argument("--omega", type=float, default=1.0, help="block length multiplier >= 1")
    p.add_argument("--seed", type=int, default=0)


def _build_subset(args) -> protocol.PadSubset:
    rng = np.random.default_rng(args.seed)
    if args.pairs is not None:
        return protocol.generate_pairs(args.channels, args.pairs, rng)
    if args.p_target is not None:
        if args.eta is None:
            raise ValueError("--p-target needs --eta")
        width = protocol.invert_success_rate(args.p_target, args.eta)
    else:
        width = args.phi
    width = min(args.channels, int(np.ceil(args.omega * width)))
    return protocol.generate_subset(args.channels, width, rng)


def _metadata(args, extra: dict | None = None) -> dict:
    md = {"tool": f"otpsense {__version__}", "command": args.command}
    if hasattr(args, "seed") and args.seed is not None:
        md["seed"] = args.seed
    if extra:
        md.update(extra)
    return md


def _cmd_subset_gen(args) -> int:
    subset = _build_subset(args)
    rows = [{"index": i, "pad": bits.to_string(pad)} for i, pad in enumerate(subset.pads)]
    md = _metadata(args, {
        "block_length": subset.block_length,
        "num_blocks": subset.num_blocks,
        "size": subset.size,
    })
    text = output.write(rows, md, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_predict(args) -> int:
    if args.phi is not None:
        rows = [{
            "block_length": args.phi,
            "eta": args.eta,
            "success_rate": protocol.predict_success_rate(args.phi, args.eta),
        }]
    else:
        rows = [{
            "p_target": args.p_target,
            "eta": args.eta,
            "block_length": protocol.invert_success_rate(args.p_target, args.eta),
        }]
    text = output.write(rows, _metadata(args), args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_mask_level(args) -> int:
    subset = _build_subset(args)
    profiles = [
        spectrum.DetectorProfile.homogeneous(args.channels, args.pf, args.pm)
        for _ in range(args.senders)
    ]
    report = leakage.leakage_report(subset, args.p1, profiles)
    text = output.write(report.rows(), _metadata(args, {"p1": args.p1}), args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path} is not valid JSON: {e}") from e


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    sc = simulate.scenario_from_dict(cfg)
    if args.seed is not None:
        sc = simulate.scenario_from_dict({**cfg, "seed": args.seed})
    summary = simulate.run_simulation(sc)
    md = _metadata(args, {"config_hash": simulate.config_hash(simulate.scenario_to_dict(sc))})
    md["seed"] = sc.seed
    text = output.write([summary.row()], md, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args) -> int:
    cfg = _load_config(args.config)
    sc = simulate.scenario_from_dict(cfg)
    if args.seed is not None:
        sc = simulate.scenario_from_dict({**cfg, "seed": args.seed})
    sweep = simulate.sweep_from_dict(cfg)
    workers = args.workers if args.workers is not None else int(cfg.get("workers", 1))
    rows = simulate.run_experiment(sc, sweep, workers=workers)
    md = _metadata(args, {"config_hash": simulate.config_hash(simulate.scenario_to_dict(sc))})
    md["seed"] = sc.seed
    text = output.write(rows, md, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otpsense",
        description="pad-protected collaborative spectrum sensing toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subset-gen", help="materialize a pad subset")
    _add_subset_args(p)
    _add_output_args(p)
    p.set_defaults(fn=_cmd_subset_gen)

    p = sub.add_parser("predict", help="block recovery rate or required block length")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--phi", type=int, help="block length to evaluate")
    group.add_argument("--p-target", type=float, help="target rate to invert")
    p.add_argument("--eta", type=float, required=True, help="agreement probability")
    _add_output_args(p)
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("mask-level", help="exact leakage table")
    _add_subset_args(p)
    p.add_argument("--p1", type=float, default=0.5, help="stationary busy probability")
    p.add_argument("--pf", type=float, default=0.1, help="sender false-alarm probability")
    p.add_argument("--pm", type=float, default=0.1, help="sender miss probability")
    p.add_argument("--senders", type=int, default=1)
    _add_output_args(p)
    p.set_defaults(fn=_cmd_mask_level)

    for name, fn in (("simulate", _cmd_simulate), ("experiment", _cmd_experiment)):
        p = sub.add_parser(name, help=f"{name} from a JSON config")
        p.add_argument("--config", required=True, help="JSON scenario file")
        p.add_argument("--seed", type=int, help="override the config seed")
        if name == "experiment":
            p.add_argument("--workers", type=int, help="sweep worker processes")
        _add_output_args(p)
        p.set_defaults(fn=fn)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
