"""Command line front end: `relaysim simulate` and `relaysim calibrate`."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .codec import ConvCode, make_interleaver
from .harness import SimConfig, _parse_generators, run_sweep
from .modem import make_constellation
from .relay import calibrate_residual_ber


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relaysim",
                                 description="BER simulator for the DF relay channel")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a BER sweep from a JSON config")
    sim.add_argument("--config", required=True, help="JSON file mirroring SimConfig fields")
    sim.add_argument("--combiner", help="override: ml, mrc, mmse, cmrc or none")
    sim.add_argument("--mode", help="override: relay, no-relay or mimo-1x2")
    sim.add_argument("--gamma0", type=_float_list, help="override sweep, e.g. 4,6,8")
    sim.add_argument("--trials", type=int, help="override the block cap per point")
    sim.add_argument("--seed", type=int, help="override the master seed")
    sim.add_argument("--workers", type=int, help="override the worker count")
    sim.add_argument("--out", help="results CSV path (default sweep.csv)")

    cal = sub.add_parser("calibrate", help="measure the relay residual-BER table")
    cal.add_argument("--code", default="5,7", help="octal generators, e.g. 5,7")
    cal.add_argument("--memory", type=int, default=2, help="code memory (default 2)")
    cal.add_argument("--mod", required=True, help="source constellation: bpsk, qpsk, qam16")
    cal.add_argument("--grid", required=True, type=_float_list,
                     help="source-relay SNR grid in dB, e.g. -4,-2,0,2,4")
    cal.add_argument("--info-bits", type=int, default=200_000,
                     help="min info bits per grid point (default 200000)")
    cal.add_argument("--block-length", type=int, default=1024,
                     help="info bits per simulated block (default 1024)")
    cal.add_argument("--seed", type=int, default=1)
    cal.add_argument("--interleaver-seed", type=int, default=1,
                     help="must match the simulation's interleaver seed")
    cal.add_argument("--out", required=True, help="output CSV path")
    return ap


def _simulate(args) -> int:
    cfg = SimConfig.from_json(args.config)
    overrides = {}
    if args.combiner is not None:
        overrides["combiner"] = args.combiner
        overrides["curves"] = None
    if args.mode is not None:
        overrides["mode"] = args.mode
        overrides["curves"] = None
    if args.gamma0 is not None:
        overrides["gamma0_db"] = args.gamma0
    if args.trials is not None:
        overrides["max_blocks"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        cfg = replace(cfg, **overrides)
    out = args.out or "sweep.csv"

    def progress(r):
        print(f"gamma0={r.gamma0_db:g} dB  {r.combiner}/{r.mode}  "
              f"ber={r.ber:.3e} ci95={r.ci95:.1e}  ({r.errors} errors / {r.blocks} blocks, "
              f"{r.wall_time_s:.1f}s)", file=sys.stderr)

    run_sweep(cfg, out_path=out, progress=progress)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def _calibrate(args) -> int:
    code = ConvCode(generators=_parse_generators(args.code), memory=args.memory)
    const = make_constellation(args.mod)
    n_coded = code.coded_length(args.block_length)
    if n_coded % const.bits_per_symbol:
        raise ValueError("coded length not divisible by bits per symbol; "
                         "adjust --block-length")
    il = make_interleaver(n_coded, args.interleaver_seed)
    table = calibrate_residual_ber(args.grid, args.info_bits, args.seed, code, il, const)
    table.save_csv(args.out)
    print(f"wrote {args.out} ({len(table.gamma_sr_db)} grid points)", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _simulate(args)
        return _calibrate(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
