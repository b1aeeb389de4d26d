"""Command-line driver.

Three subcommands:

* search        run the filtering pipeline on one binade and stream HR-cases
* oracle-check  run pipeline and exhaustive oracle, diff the record sets
* divergence    simulate warp execution of the lower-bound searches

Records go to stdout (or --out) and are byte-stable across identical
invocations; statistics and summaries carry wall-clock times and go to
stderr.  Exit codes: 0 ok, 1 runtime error, 2 configuration error, 3 oracle
mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from .divergence import linear_problem_batch, report_rows, simulate_warps
from .fixedpoint import DivisionMode
from .fpmodel import FpFormat, HrCaseRecord
from .lowerbound import Algorithm
from .oracle import exhaustive_hr_search
from .pipeline import PhaseConfig, PhaseStats, PipelineConfig, run_pipeline
from .polygen import PolyGenConfig

NAMED_FUNCTIONS = ("exp", "log", "exp2", "identity")

DIV_MODES = {
    "sub": DivisionMode.SUBTRACTIVE,
    "hw": DivisionMode.HARDWARE,
    "hybrid": DivisionMode.HYBRID,
}


class ConfigError(ValueError):
    pass


def _resolve_fn(spec: str) -> str:
    """exp/log/exp2 pass through; anything else is a polynomial: either a
    literal "poly:c0,c1,..." or a file of rational coefficients (one list,
    comma or whitespace separated; JSON arrays work too)."""
    if spec in NAMED_FUNCTIONS or spec.startswith("poly:"):
        return spec
    if not os.path.exists(spec):
        raise ConfigError(
            f"--fn {spec!r} is neither a named function nor a readable file")
    with open(spec, "r", encoding="utf-8") as fh:
        text = fh.read().strip()
    if text.startswith("poly:"):
        return text
    if text.startswith("["):
        parts = [str(Fraction(str(v))) for v in json.loads(text)]
    else:
        parts = [p for chunk in text.split() for p in chunk.split(",") if p]
    if not parts:
        raise ConfigError(f"no coefficients found in {spec!r}")
    return "poly:" + ",".join(parts)


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--fn", default="exp",
                    help="exp | log | exp2 | polynomial coefficient file")
    sp.add_argument("--p", type=int, default=13, help="target precision in bits")
    sp.add_argument("--eps-bits", type=int, default=8,
                    help="HR threshold exponent: eps = 2^-eps_bits")
    sp.add_argument("--binade", type=int, default=0,
                    help="input binade exponent: arguments in [2^b, 2^(b+1))")
    sp.add_argument("--domain-bits", type=int, default=4,
                    help="log2 of the phase-1 domain size N")
    sp.add_argument("--div-mode", choices=sorted(DIV_MODES), default="hybrid")
    sp.add_argument("--word-bits", type=int, choices=(32, 64), default=64)
    sp.add_argument("--out", default=None, help="write records here instead of stdout")
    sp.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sp.add_argument("--seed", type=int, default=0,
                    help="accepted for reproducibility plumbing; the search "
                         "itself is deterministic")


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    fn = _resolve_fn(args.fn)
    fmt = FpFormat(precision=args.p, eps_bits=args.eps_bits)
    n1 = 1 << args.domain_bits
    half = 1 << (args.p - 1)
    # default block shape: tau domains per super-domain, square packet grid
    tau = max(1, min(16, half // n1))
    mu = 1
    nu = tau
    for cand in (4, 2):
        if tau % cand == 0:
            mu, nu = cand, tau // cand
            break
    pg = PolyGenConfig(tau=tau, N=n1, mu=mu, nu=nu, delta=2,
                       limbs=8, frac_bits=96, guard=32)
    split = args.phase2_split
    if n1 % split != 0:
        raise ConfigError(
            f"--phase2-split {split} must divide the domain size N = {n1}")
    phase = PhaseConfig(
        algorithm=args.algo,
        div_mode=DIV_MODES[args.div_mode],
        phase2_split=split,
        N1=n1,
        parallel_width=args.workers,
    )
    return PipelineConfig(fn=fn, fmt=fmt, polygen=pg, phase=phase,
                          word_bits=args.word_bits)


def _record_dict(rec: HrCaseRecord) -> dict:
    out = {
        "arg_bits": hex(rec.argument),
        "distance_num": rec.distance.raw,
        "distance_den_log2": rec.distance.width,
        "domain": rec.domain_id,
    }
    if rec.undecided:
        out["undecided"] = True
    return out


def _emit_records(records, fmt_kind, sink) -> None:
    if fmt_kind == "jsonl":
        for rec in records:
            sink.write(json.dumps(_record_dict(rec), sort_keys=False) + "\n")
    else:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["arg_bits", "distance_num", "distance_den_log2", "domain"])
        for rec in records:
            d = _record_dict(rec)
            writer.writerow([d["arg_bits"], d["distance_num"],
                             d["distance_den_log2"], d["domain"]])


def _emit_stats(stats: PhaseStats, sink) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["phase", "domains_in", "domains_out",
                     "arguments_covered", "wall_ms"])
    for row in stats.rows:
        writer.writerow([row.phase, row.domains_in, row.domains_out,
                         row.arguments_covered, f"{row.wall_ms:.3f}"])
    for piece, choice in stats.algorithm_choices:
        writer.writerow(["choice", piece, choice, "", ""])


def cmd_search(args: argparse.Namespace) -> int:
    cfg = _pipeline_config(args)
    records, stats = run_pipeline(args.binade, cfg)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _emit_records(records, args.format, fh)
    else:
        _emit_records(records, args.format, sys.stdout)
    _emit_stats(stats, sys.stderr)
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    from .fpmodel import Domain

    cfg = _pipeline_config(args)
    records, stats = run_pipeline(args.binade, cfg)
    if args.inject_fault and records:
        records = records[1:]  # test hook: drop one record to force a diff
    dom = Domain(1 << (cfg.fmt.precision - 1), args.binade + 1,
                 1 << (cfg.fmt.precision - 1), 0)
    oracle = exhaustive_hr_search(cfg.fn, dom, cfg.fmt)
    got = {(r.argument, r.distance, r.undecided) for r in records}
    want = {(r.argument, r.distance, r.undecided) for r in oracle}
    _emit_stats(stats, sys.stderr)
    if got == want:
        print("0 differences")
        return 0
    for key in sorted(want - got):
        print(f"missing arg_bits {key[0]:#x} distance {key[1].raw}/2^{key[1].width}")
    for key in sorted(got - want):
        print(f"spurious arg_bits {key[0]:#x} distance {key[1].raw}/2^{key[1].width}")
    print(f"{len(want ^ got)} differences")
    return 3


def cmd_divergence(args: argparse.Namespace) -> int:
    fn = _resolve_fn(args.fn)
    fmt = FpFormat(precision=args.p, eps_bits=args.eps_bits)
    try:
        algo = Algorithm(args.algo)
    except ValueError:
        raise ConfigError(f"--algo {args.algo!r}: divergence needs one "
                          f"concrete algorithm, not auto") from None
    problems = linear_problem_batch(
        fn, fmt, args.binade, 1 << args.domain_bits,
        domain_count=args.count, word_bits=args.word_bits)
    report = simulate_warps(problems, algo, DIV_MODES[args.div_mode],
                            warp_width=args.warp_width)
    sink = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["warp_id", "max_iter", "mean_iter", "mdm", "nmdm"])
        for row in report_rows(report):
            writer.writerow([row[0], row[1], f"{row[2]:.6f}",
                             f"{row[3]:.6f}", f"{row[4]:.6f}"])
    finally:
        if args.out:
            sink.close()
    summary = csv.writer(sys.stderr, lineterminator="\n")
    summary.writerow(["algorithm", "min_iterations", "max_iterations",
                      "mean_iterations", "mean_nmdm"])
    summary.writerow([report.algorithm.value, report.min_iterations,
                      report.max_iterations,
                      f"{float(report.mean_iterations):.6f}",
                      f"{float(report.mean_nmdm):.6f}"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardround",
        description="hard-to-round case search for elementary functions")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search", help="run the filtering pipeline on one binade")
    _add_common_flags(sp)
    sp.add_argument("--phase2-split", type=int, default=8,
                    help="subdomains per domain in phase 2")
    sp.add_argument("--algo", choices=("lefevre", "regular", "auto"),
                    default="regular")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("oracle-check",
                        help="diff pipeline output against the exhaustive oracle")
    _add_common_flags(sp)
    sp.add_argument("--phase2-split", type=int, default=8)
    sp.add_argument("--algo", choices=("lefevre", "regular", "auto"),
                    default="regular")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--inject-fault", action="store_true",
                    help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_oracle_check)

    sp = sub.add_parser("divergence",
                        help="lockstep warp simulation of the searches")
    _add_common_flags(sp)
    sp.add_argument("--algo",
                    choices=("lefevre", "lefevre_swap", "regular",
                             "regular_unrolled"),
                    default="regular")
    sp.add_argument("--count", type=int, default=None,
                    help="number of consecutive subdomains (default: fill the binade)")
    sp.add_argument("--warp-width", type=int, default=32)
    sp.set_defaults(func=cmd_divergence)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
