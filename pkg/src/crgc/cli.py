"""Command line front end.

Exit codes are a stable contract: 0 success, 2 usage error, 3 data
integrity error (bad CRC, malformed or inconsistent shares), 4
infeasible parameters (k > n - r, field too small for the payload,
alpha below B/k).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from .cluster_sim import ScenarioError, load_scenario, result_csv, result_json, run_scenario
from .coop_repair import cooperative_repair
from .cutbound import (
    BoundParams,
    InfeasibleAlphaError,
    cut_value,
    enumerate_cut_types,
    gamma_star,
    msr_closed_form,
    non_coop_msr,
)
from .galois import SymbolRangeError
from .mscr import (
    ChecksumError,
    ParameterError,
    ShareFormatError,
    decode_payload,
    encode_payload,
    make_params,
    read_share,
    share_to_bytes,
    write_share,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_INFEASIBLE = 4


class UsageError(Exception):
    pass


def share_name(node_index: int) -> str:
    return f"share-{node_index:03d}.crgc"


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _parse_index_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_encode(args) -> int:
    params = make_params(args.n, args.k, args.r, field=args.field)
    payload = Path(args.input).read_bytes()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    shares = encode_payload(payload, params)
    manifest = []
    for share in shares:
        blob = share_to_bytes(share, params)
        name = share_name(share.node_index)
        (out_dir / name).write_bytes(blob)
        manifest.append(f"{hashlib.sha256(blob).hexdigest()}  {name}")
    (out_dir / "manifest.txt").write_text("\n".join(manifest) + "\n")
    print(f"wrote {len(shares)} shares to {out_dir}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    loaded = [read_share(p) for p in args.shares]
    params = loaded[0][1]
    for _, other in loaded[1:]:
        if other != params:
            raise ShareFormatError("shares carry inconsistent headers")
    if len(loaded) != params.k:
        raise UsageError(f"need exactly k={params.k} shares, got {len(loaded)}")
    payload = decode_payload([share for share, _ in loaded], params)
    Path(args.out).write_bytes(payload)
    print(f"reconstructed {len(payload)} bytes to {args.out}")
    return EXIT_OK


def cmd_repair(args) -> int:
    share_dir = Path(args.share_dir)
    paths = sorted(share_dir.glob("*.crgc"))
    if not paths:
        raise UsageError(f"no .crgc shares under {share_dir}")
    loaded = [read_share(p) for p in paths]
    params = loaded[0][1]
    for _, other in loaded[1:]:
        if other != params:
            raise ShareFormatError("shares carry inconsistent headers")
    failed = _parse_index_list(args.failed)
    if not failed:
        raise UsageError("no failed node indices given")
    shares = {share.node_index: share for share, _ in loaded if share.node_index not in failed}
    regenerated, ledger = cooperative_repair(
        shares, failed, params, policy=args.policy, seed=args.seed
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for idx in sorted(regenerated):
        write_share(out_dir / share_name(idx), regenerated[idx], params)
    transcript = Path(args.transcript) if args.transcript else out_dir / "transcript.txt"
    transcript.write_text("\n".join(ledger.transcript_lines()) + "\n")
    per = ledger.per_newcomer()
    summary = ", ".join(f"node {i}: {per[i]} symbols" for i in sorted(per))
    print(f"regenerated {len(regenerated)} shares ({summary}); transcript: {transcript}")
    return EXIT_OK


def cmd_bound(args) -> int:
    d = args.d if args.d is not None else args.k
    B = _parse_fraction(args.B)
    base = BoundParams(k=args.k, d=d, r=args.r, B=B, alpha=B / args.k, n=args.n)
    if args.alpha:
        alphas = [_parse_fraction(tok) for tok in args.alpha.split(",")]
    else:
        alphas = [B / Fraction(args.k)]
    points = []
    for alpha in alphas:
        points.append(gamma_star(BoundParams(k=args.k, d=d, r=args.r, B=B, alpha=alpha, n=args.n)))
    coop = msr_closed_form(base)
    individual = non_coop_msr(base)

    def tight_tuples(tp):
        out = []
        p = BoundParams(k=args.k, d=d, r=args.r, B=B, alpha=tp.alpha,
                        beta1=tp.beta1, beta2=tp.beta2, n=args.n)
        for t in enumerate_cut_types(args.k, args.r, canonical=True):
            if cut_value(t, p) == B:
                out.append("+".join(str(x) for x in t))
        return ";".join(out)

    if args.format == "json":
        doc = {
            "k": args.k, "d": d, "r": args.r, "B": str(B),
            "coop_msr_closed_form": str(coop),
            "non_coop_msr": str(individual),
            "points": [
                {
                    "alpha": str(tp.alpha),
                    "gamma_star": str(tp.gamma_star),
                    "gamma_star_float": float(tp.gamma_star),
                    "beta1": str(tp.beta1),
                    "beta2": str(tp.beta2),
                    "tight_cut_types": tight_tuples(tp),
                }
                for tp in points
            ],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [
            "alpha,gamma_star,beta1,beta2,gamma_star_float,"
            "coop_msr_closed_form,non_coop_msr,tight_cut_types"
        ]
        for tp in points:
            lines.append(
                f"{tp.alpha},{tp.gamma_star},{tp.beta1},{tp.beta2},"
                f"{float(tp.gamma_star):.6f},{coop},{individual},{tight_tuples(tp)}"
            )
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    result = run_scenario(scenario)
    text = result_json(result) if args.format == "json" else result_csv(result)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if result.ok else EXIT_INTEGRITY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crgc",
        description="Cooperative regenerating codes: encode, reconstruct, repair, "
        "bandwidth bounds, and cluster simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a file into n share files")
    enc.add_argument("--n", type=int, required=True)
    enc.add_argument("--k", type=int, required=True)
    enc.add_argument("--r", type=int, required=True)
    enc.add_argument("--field", choices=("auto", "gf256", "gf65536"), default="auto")
    enc.add_argument("--out", required=True, help="output directory")
    enc.add_argument("input")
    enc.set_defaults(handler=cmd_encode)

    rec = sub.add_parser("reconstruct", help="rebuild the file from any k shares")
    rec.add_argument("--out", required=True, help="output file")
    rec.add_argument("shares", nargs="+")
    rec.set_defaults(handler=cmd_reconstruct)

    rep = sub.add_parser("repair", help="regenerate failed nodes from surviving shares")
    rep.add_argument("--failed", required=True, help="comma-separated node indices")
    rep.add_argument("--policy", choices=("lowest_index", "round_robin", "random"),
                     default="lowest_index")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--transcript", help="transcript path (default: <out>/transcript.txt)")
    rep.add_argument("--out", required=True, help="output directory")
    rep.add_argument("share_dir")
    rep.set_defaults(handler=cmd_repair)

    bnd = sub.add_parser("bound", help="repair-bandwidth lower bound gamma*(alpha)")
    bnd.add_argument("--k", type=int, required=True)
    bnd.add_argument("--d", type=int, default=None, help="helpers per newcomer (default k)")
    bnd.add_argument("--r", type=int, required=True)
    bnd.add_argument("--B", required=True, help="file size in symbols (rational ok)")
    bnd.add_argument("--alpha", help="comma-separated alpha values (default B/k)")
    bnd.add_argument("--n", type=int, default=None)
    bnd.add_argument("--format", choices=("csv", "json"), default="csv")
    bnd.add_argument("--out", help="write report here instead of stdout")
    bnd.set_defaults(handler=cmd_bound)

    sim = sub.add_parser("simulate", help="run a fail/repair scenario file")
    sim.add_argument("--format", choices=("csv", "json"), default="json")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sim.add_argument("--out", help="write report here instead of stdout")
    sim.add_argument("scenario")
    sim.set_defaults(handler=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ChecksumError, ShareFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (InfeasibleAlphaError, SymbolRangeError, ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
