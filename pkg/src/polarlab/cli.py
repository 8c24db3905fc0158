"""Command line front end: ``python -m polarlab <command>``."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .crc import crc_append, get_crc
from .decoder import LVector, rscl_decode, sc_decode, scl_decode
from .polar import METHODS, ConstructionSpec, PolarCode, format_frozen_set, read_frozen_set
from .sim import ConfigError, complexity_report, load_config, run_bler_sweep


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_bits(text: str) -> np.ndarray:
    chars = [c for c in text if not c.isspace() and c != ","]
    if any(c not in "01" for c in chars):
        raise ConfigError("input must contain only 0/1 characters")
    return np.array([int(c) for c in chars], dtype=np.uint8)


def _bits_line(bits) -> str:
    return "".join(str(int(b)) for b in bits) + "\n"


def _spec(args) -> ConstructionSpec:
    kw = {"method": args.method}
    if args.param is not None:
        kw["design_parameter"] = args.param
    elif args.method == "bhattacharyya_bec":
        kw["design_parameter"] = 0.5
    if args.seed is not None:
        kw["seed"] = args.seed
    return ConstructionSpec(**kw)


def _code(args, crc_bits: int = 0) -> PolarCode:
    if args.frozen:
        return read_frozen_set(args.frozen)
    if args.n is None or args.k is None:
        raise ConfigError("give --frozen FILE or both --n and --k")
    return PolarCode.construct(args.n, args.k + crc_bits, _spec(args))


def cmd_construct(args):
    code = PolarCode.construct(args.n, args.k, _spec(args))
    _write(format_frozen_set(code, _spec(args)), args.out)


def cmd_encode(args):
    crc = get_crc(args.crc) if args.crc else None
    code = _code(args, crc.degree if crc and not args.frozen else 0)
    bits = _read_bits(sys.stdin.read())
    if crc is not None:
        bits = crc_append(bits, crc)
    if bits.size != code.k:
        raise ConfigError(f"expected {code.k - (crc.degree if crc else 0)} message bits, got "
                          f"{bits.size - (crc.degree if crc else 0)}")
    _write(_bits_line(code.encode(bits)), args.out)


def cmd_decode(args):
    crc = get_crc(args.crc) if args.crc else None
    r = crc.degree if crc else 0
    code = _code(args, 0 if args.frozen else r)
    try:
        llrs = np.loadtxt(args.llr, dtype=np.float64, ndmin=1).reshape(-1)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read LLR file: {exc}") from None
    if llrs.size != code.N:
        raise ConfigError(f"LLR file holds {llrs.size} values, code length is {code.N}")
    report = None
    if args.decoder == "sc":
        u, _, updates = sc_decode(llrs, code, with_stats=True)
        payload = code.extract(u)
        report = {"llr_updates": updates, "peak_banks": [1] * code.n}
    else:
        if args.decoder == "scl":
            res = scl_decode(llrs, code, args.L, final_crc=crc)
        else:
            if not args.lvec:
                raise ConfigError("rscl needs --lvec")
            res = rscl_decode(llrs, code, LVector.parse(args.lvec), final_crc=crc)
        payload = res.payload
        report = res.stats.to_dict(survivors=args.survivors)
        report["detected_error"] = res.detected_error
    _write(_bits_line(payload[: code.k - r]), args.out)
    if args.stats:
        sys.stderr.write(json.dumps(report) + "\n")


def cmd_simulate(args):
    if not args.config:
        raise ConfigError("simulate needs --config")
    cfg = load_config(args.config)
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    result = run_bler_sweep(cfg, workers=args.workers)
    _write(result.to_csv(), args.out)


def cmd_complexity(args):
    lvec = LVector.parse(args.lvec)
    space, time = complexity_report(args.n, lvec)
    _write(f"{space},{time}\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    common.add_argument("--config", default=None, help="JSON simulation config")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    code = argparse.ArgumentParser(add_help=False)
    code.add_argument("--n", type=int, help="log2 of the code length")
    code.add_argument("--k", type=int, help="message bits (construct: unfrozen channels)")
    code.add_argument("--method", default="gaussian_approx_awgn", choices=METHODS)
    code.add_argument("--param", type=float, default=None, help="design Eb/N0 in dB, or erasure probability")
    code.add_argument("--frozen", default=None, help="frozen-set file instead of --n/--k")

    p = argparse.ArgumentParser(prog="polarlab", description="Polar code construction, decoding and BLER sweeps.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common, code], help="write a frozen-set file")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("encode", parents=[common, code], help="message bits on stdin to codeword bits")
    e.add_argument("--crc", default=None, help="append this CRC (name or polynomial) before encoding")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", parents=[common, code], help="channel LLR file to message bits")
    d.add_argument("--llr", required=True, help="whitespace-separated channel LLRs")
    d.add_argument("--decoder", choices=("sc", "scl", "rscl"), default="scl")
    d.add_argument("--L", type=int, default=8)
    d.add_argument("--lvec", default=None, help='e.g. "L3", "8x10" or "2,4,8x8"')
    d.add_argument("--crc", default=None)
    d.add_argument("--stats", action="store_true", help="print the instrumentation report to stderr")
    d.add_argument("--survivors", action="store_true", help="include per-level survivor counts in --stats")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", parents=[common], help="BLER sweep from a JSON config to CSV")
    s.add_argument("--workers", type=int, default=None, help="worker processes (capped by POLARLAB_THREADS)")
    s.set_defaults(func=cmd_simulate)

    x = sub.add_parser("complexity", parents=[common], help="space and time units for an L-vector")
    x.add_argument("--n", type=int, required=True)
    x.add_argument("--lvec", required=True)
    x.set_defaults(func=cmd_complexity)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("construct",) and (args.n is None or args.k is None):
        parser.error("construct needs --n and --k")
    try:
        args.func(args)
    except (ConfigError, ValueError, LookupError) as exc:
        sys.stderr.write(f"polarlab {args.command}: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
