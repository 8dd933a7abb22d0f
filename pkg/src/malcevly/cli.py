"""Command line front end.

    malcevly build-sc [--scale S] [--out FILE]
    malcevly count [--degree N] [--ops binary|ternary|mixed|mixed-only|all]
    malcevly search --ops OPS --degree N [--prime P] [--seed S] [--stall K]
                    [--scale S] [--assert-reference] [--out DIR] [--plot]
    malcevly verify FILE [--trials T] [--arith integer|modular] [--scale S]
    malcevly corpus [--out DIR]
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import engine, exactla, freealg, sl2rep


@dataclass
class RunConfig:
    command: str
    degree: int | None = None
    opset: str | None = None
    prime: int = exactla.DEFAULT_PRIME
    seed: int = 0
    stall_threshold: int = 100
    scale: int | None = None
    out: str | None = None

    def validate(self) -> None:
        if self.degree is not None and not 1 <= self.degree <= freealg.MAX_DEGREE:
            raise ValueError(f"degree must lie in 1..{freealg.MAX_DEGREE}")
        if self.opset == "ternary" and self.degree is not None and self.degree % 2 == 0:
            raise ValueError("ternary searches need an odd degree")
        if self.opset == "mixed" and self.degree == 7:
            raise ValueError("degree 7 with both operations is not supported")
        if self.prime <= (self.degree or 0) or not exactla._is_prime(self.prime):
            raise ValueError("the modulus must be a prime larger than the degree")
        if self.stall_threshold < 1:
            raise ValueError("the stall threshold must be positive")
        if self.scale == 0:
            raise ValueError("the ternary scale must be nonzero")


def _section(title: str) -> None:
    print(f"=== {title} ===")


def cmd_build_sc(args) -> int:
    cfg = RunConfig("build-sc", scale=args.scale, out=args.out)
    cfg.validate()
    text = sl2rep.structure_constants_json(args.scale)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    report = sl2rep.gl5_crosscheck()
    print(f"lambda_alpha = {report.lambda_alpha}", file=sys.stderr)
    print(f"lambda_beta = {report.lambda_beta}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_count(args) -> int:
    rows = freealg.count_types(args.degree or freealg.MAX_DEGREE)
    if args.degree:
        rows = [rows[-1]]
    print("degree\tops\ttypes\tmonomials")
    for r in rows:
        n = r["degree"]
        for ops in ([args.ops] if args.ops else ["binary", "ternary", "mixed-only", "all"]):
            if ops == "all" or ops == "mixed":
                types, monos = r["total"], r["monomials"]
            elif ops == "mixed-only":
                types = r["mixed"]
                monos = r["monomials"] - _pure(n, "binary") - _pure(n, "ternary") if n > 1 else 0
            else:
                types, monos = r[ops], _pure(n, ops)
            print(f"{n}\t{ops}\t{types}\t{monos}")
    return 0


def _pure(n: int, opset: str) -> int:
    if n == 1:
        return 1
    if opset == "ternary" and n % 2 == 0:
        return 0
    return len(freealg.space(n, opset))


def cmd_search(args) -> int:
    cfg = RunConfig("search", args.degree, args.ops, args.prime, args.seed, args.stall,
                    args.scale, args.out)
    cfg.validate()
    log = (lambda msg: print(f"# {msg}", file=sys.stderr)) if args.verbose else None
    report, _, _ = engine.run_search(cfg.degree, cfg.opset, cfg.prime, cfg.seed,
                                     cfg.stall_threshold, cfg.scale, log=log)
    _section("report")
    for key in ("opset", "degree", "prime", "seed", "scale", "stall", "monomial_count",
                "stable_rank", "nullspace_dim", "liftings", "consequence_rank", "known_rank",
                "new_dim", "iterations", "scan"):
        print(f"{key}\t{getattr(report, key)}")
    print(f"generators\t{len(report.generators)}")
    for k, g in enumerate(report.generators, 1):
        _section(f"generator {k}: vector {g['index']}, +{g['rank_increase']} "
                 f"to rank {g['rank_after']}, {g['terms']} terms")
        print("\n".join(g["identity"]))
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{cfg.opset}{cfg.degree}"
        (out / f"{stem}_report.json").write_text(report.to_json(timing=False) + "\n",
                                                 encoding="utf-8")
        (out / f"{stem}_timing.json").write_text(
            json.dumps({"wall_time": report.wall_time}) + "\n", encoding="utf-8")
        for k, g in enumerate(report.generators, 1):
            (out / f"{stem}_generator{k}.txt").write_text("\n".join(g["identity"]) + "\n",
                                                         encoding="utf-8")
        if args.plot:
            from .plotting import rank_history_figure
            rank_history_figure(report, out / f"{stem}_rank.png")
    print(f"wall_time\t{report.wall_time}", file=sys.stderr)
    if args.assert_reference:
        bad = engine.reference_mismatches(report)
        _section("reference values")
        print("match" if not bad else "\n".join(bad))
        return 1 if bad else 0
    return 0


def cmd_verify(args) -> int:
    try:
        poly = freealg.parse_identity(Path(args.path).read_text(encoding="utf-8"))
    except freealg.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    scale = engine.default_scale(poly.opset) if args.scale is None else args.scale
    if scale == 0:
        print("the ternary scale must be nonzero", file=sys.stderr)
        return 2
    alg = engine.algebra(scale)
    if args.arith == "integer":
        res = engine.verify_identity_integer(poly, alg, args.trials, args.bound, args.seed)
    else:
        res = engine.verify_identity_modular(poly, alg, args.trials, args.prime, args.seed)
    if res.ok:
        print(f"pass\t{res.trials} trials\t{len(poly)} terms\tdegree {poly.degree}\t{poly.opset}")
        return 0
    print(f"fail\ttrial {res.trials}")
    names = freealg.VARIABLES
    for v, vec in enumerate(res.witness):
        print(f"{names[v]} = {vec}")
    print(f"value = {res.value}")
    return 1


def cmd_corpus(args) -> int:
    for rec in engine.corpus():
        print(f"{rec.name}\tdegree {rec.degree}\t{rec.opset}\t{len(rec.polynomial)} terms")
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{rec.name}.txt").write_text(rec.text(), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="malcevly", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-sc", help="write the structure constants as JSON")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_sc)

    p = sub.add_parser("count", help="association types and monomials per degree")
    p.add_argument("--degree", type=int)
    p.add_argument("--ops", choices=["binary", "ternary", "mixed", "mixed-only", "all"])
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("search", help="find the identities of one degree")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--ops", choices=list(freealg.OPSETS), required=True)
    p.add_argument("--prime", type=int, default=exactla.DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stall", type=int, default=100)
    p.add_argument("--scale", type=int, help="ternary scale (default 1, or -30 for mixed)")
    p.add_argument("--assert-reference", "--assert-paper", action="store_true",
                   help="exit nonzero unless the reported values are reproduced")
    p.add_argument("--out", help="directory for the JSON report, generators and figure")
    p.add_argument("--plot", action="store_true", help="also draw the rank history")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="check an identity file by random evaluation")
    p.add_argument("path")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--arith", choices=["integer", "modular"], default="integer")
    p.add_argument("--scale", type=int)
    p.add_argument("--bound", type=int, default=9)
    p.add_argument("--prime", type=int, default=exactla.DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("corpus", help="list or export the named identities")
    p.add_argument("--out")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
