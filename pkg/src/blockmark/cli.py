"""Command-line entry points: run, bench, chunk-opt, matrix.

Exit codes report tool failures only (2 for bad configuration); a trade
ending in a verdict against either party is a normal result.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace
from fractions import Fraction
from pathlib import Path

from .chunks import Variant, byte_aligned_chunk_bits, chunk_cost_bits, optimal_chunk_bits
from .crypto import Scheme
from .sim import Scenario, ScenarioError, run, strategy_matrix, sweep, write_csv

DEFAULT_SIZES = [2**k for k in range(10, 25)]


def parse_sizes(text: str) -> list[int]:
    """Parse ``"1024,4096"`` or ``"2^10..2^24"`` (doubling) into bit sizes."""

    def num(tok: str) -> int:
        tok = tok.strip()
        if "^" in tok:
            base, exp = tok.split("^")
            return int(base) ** int(exp)
        return int(tok)

    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = (num(x) for x in part.split(".."))
            n = lo
            while n <= hi:
                out.append(n)
                n *= 2
        elif part.strip():
            out.append(num(part))
    return sorted(set(out))


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    return int(os.environ.get("BLOCKMARK_SEED", "0"))


def scheme_from_args(args) -> Scheme:
    kind = "toy" if args.sig_bytes < 65 else "standard"
    name = Scheme.name if kind == "standard" else "toy/blake2b/keyed-hash"
    return Scheme(name=name, kind=kind, hash_bits=args.hash_bits, alpha=Fraction(args.alpha), sig_bytes=args.sig_bytes)


def chunk_opt_report(hash_bits: int, alpha: Fraction, n_bits: int = 2**20, scan_max: int = 4096) -> dict:
    best = optimal_chunk_bits(hash_bits, alpha)
    costs = {L: chunk_cost_bits(n_bits, L, hash_bits, alpha) for L in range(1, scan_max + 1)}
    scan_min = min(costs, key=costs.get)
    samples = sorted({max(8, int(best * f)) for f in (0.25, 0.5, 0.75, 1, 1.25, 1.5, 2, 4)})
    return {
        "hash_bits": hash_bits,
        "alpha": str(alpha),
        "n_bits": n_bits,
        "optimal_chunk_bits": best,
        "optimal_chunk_bits_rounded": round(best),
        "byte_aligned_chunk_bits": byte_aligned_chunk_bits(hash_bits, alpha),
        "scan_argmin_bits": scan_min,
        "scan_min_cost_bits": costs[scan_min],
        "curve": [{"chunk_bits": L, "cost_bits": chunk_cost_bits(n_bits, L, hash_bits, alpha)} for L in samples],
    }


def cmd_run(args) -> int:
    scenario = Scenario.load(args.scenario)
    if args.seed is not None or "BLOCKMARK_SEED" in os.environ:
        scenario = replace(scenario, seed=resolve_seed(args.seed)).validate()
    outcome = run(scenario, out_dir=args.out)
    print(json.dumps({"scheme": scenario.scheme.descriptor(), **outcome.summary()}, indent=2, sort_keys=True))
    return 0


def cmd_bench(args) -> int:
    scheme = scheme_from_args(args)
    variant = Variant(args.variant)
    chunk_bits = args.chunk_bits or (256 if variant is Variant.O1 else byte_aligned_chunk_bits(scheme.hash_bits, scheme.alpha))
    base = Scenario(variant, chunk_bits=chunk_bits, seed=resolve_seed(args.seed), scheme=scheme).validate()
    rows = sweep(base, args.size, simulate=args.simulate)
    header = {"scheme": scheme.descriptor(), "variant": variant.value, "chunk_bits": chunk_bits}
    if args.out:
        write_csv(rows, args.out, header=header)
    else:
        print("# " + json.dumps(header, sort_keys=True))
        for r in rows:
            print(json.dumps(asdict(r), sort_keys=True))
    return 0


def cmd_chunk_opt(args) -> int:
    report = chunk_opt_report(args.hash_bits, Fraction(args.alpha), args.size or 2**20)
    print(json.dumps(report, indent=2))
    return 0


def cmd_matrix(args) -> int:
    scheme = scheme_from_args(args)
    rows = strategy_matrix(Variant(args.variant), args.chunks, args.chunk_bits or 64, resolve_seed(args.seed), scheme)
    if args.out:
        write_csv(rows, args.out, header={"scheme": scheme.descriptor(), "variant": args.variant})
    else:
        for r in rows:
            print(f"{r.seller:32} {r.buyer:42} {r.phase:16} verdict={r.verdict!s:7} oracle={r.oracle!s:7} {'ok' if r.agrees else 'DISAGREE'}")
    agree = sum(r.agrees for r in rows)
    print(f"# {agree}/{len(rows)} verdicts agree with the oracle", file=sys.stderr)
    return 0 if agree == len(rows) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blockmark", description="Fair-exchange data market simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def scheme_flags(sp):
        sp.add_argument("--hash-bits", type=int, default=256)
        sp.add_argument("--alpha", default="1", help="ciphertext expansion, e.g. 1 or 3/2")
        sp.add_argument("--sig-bytes", type=int, default=65, help="below 65 selects the toy scheme")
        sp.add_argument("--seed", type=int, default=None, help="falls back to $BLOCKMARK_SEED")

    sp = sub.add_parser("run", help="run one scenario file")
    sp.add_argument("scenario", type=Path)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", type=Path, default=None, help="directory for transcript.jsonl and outcome.json")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("bench", help="cost table over data sizes")
    sp.add_argument("--variant", choices=[v.value for v in Variant], required=True)
    sp.add_argument("--size", type=parse_sizes, default=DEFAULT_SIZES, help="bits, e.g. 2^10..2^24 or 1024,2048")
    sp.add_argument("--chunk-bits", type=int, default=None)
    sp.add_argument("--simulate", action="store_true", help="run complete trades instead of driving contracts directly")
    sp.add_argument("--out", type=Path, default=None, help="CSV path")
    scheme_flags(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("chunk-opt", help="optimal chunk size for the O(log N) dispute")
    sp.add_argument("--hash-bits", type=int, default=256)
    sp.add_argument("--alpha", default="1")
    sp.add_argument("--size", type=int, default=None, help="N in bits for the brute-force scan")
    sp.set_defaults(func=cmd_chunk_opt)

    sp = sub.add_parser("matrix", help="strategy-product verdicts against the oracle")
    sp.add_argument("--variant", choices=[v.value for v in Variant], required=True)
    sp.add_argument("--chunks", type=int, default=4)
    sp.add_argument("--chunk-bits", type=int, default=None)
    sp.add_argument("--out", type=Path, default=None)
    scheme_flags(sp)
    sp.set_defaults(func=cmd_matrix)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"blockmark: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
