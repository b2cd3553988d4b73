"""Command line entry point: ``cosmin {min,search,tables,verify}``.

Exit codes: 0 success, 2 usage, 3 tolerance not reached, 4 corrupt
checkpoint, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from typing import List, Optional, Sequence

from . import claims
from .minimizer import DEFAULT_TOL, SEARCH_TOL, ToleranceUnreachable, global_min, min_modulus
from .searcher import (
    CorruptCheckpoint,
    EmptySpace,
    Problem,
    SearchSpec,
    run_search,
)
from .trigpoly import ExponentSet, from_exponents

log = logging.getLogger("cosmin")

EXIT_OK, EXIT_USAGE, EXIT_TOL, EXIT_CHECKPOINT, EXIT_VERIFY = 0, 2, 3, 4, 5

# best known value and attaining set at the bounds a_n <= 20 (lambda), 30 (mu)
KNOWN_LAMBDA = {
    2: (1.125000, (1, 2)),
    3: (1.315565, (1, 2, 3)),
    4: (1.519558, (1, 2, 3, 4)),
    5: (1.627461, (1, 2, 4, 5, 6)),
    6: (1.591832, (1, 2, 4, 6, 7, 8)),
}
KNOWN_MU = {
    3: (0.607346, (0, 1, 3)),
    4: (0.752394, (0, 1, 2, 4)),
    5: (1.000000, (0, 1, 2, 6, 9)),
    6: (1.065286, (0, 6, 9, 10, 17, 24)),
}
TABLE_BOUND = {Problem.LAMBDA: 20, Problem.MU: 30}
MATCH_TOL = 5e-7


def exponent_list(text: str) -> List[int]:
    parts = [p.strip() for p in text.split(",")]
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    seen = set()
    for v in values:
        if v in seen:
            raise argparse.ArgumentTypeError(f"duplicate exponent {v}")
        seen.add(v)
    return sorted(values)


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def default_jobs() -> int:
    env = os.environ.get("COSMIN_JOBS")
    if env:
        try:
            return positive_int(env)
        except argparse.ArgumentTypeError:
            log.warning("ignoring invalid COSMIN_JOBS=%r", env)
    return os.cpu_count() or 1


def _fmt_set(s: Sequence[int]) -> str:
    return ",".join(map(str, s))


def _emit(text: str, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(text if text.endswith("\n") else text + "\n")


# -- min -------------------------------------------------------------------

def cmd_min(args) -> int:
    tol = args.tol or DEFAULT_TOL
    kind = "cosine" if args.cosine is not None else "newman"
    exps = args.cosine if args.cosine is not None else args.newman
    try:
        if kind == "cosine":
            res = global_min(from_exponents(ExponentSet.cosine(exps)), tol)
        else:
            res = min_modulus(ExponentSet.newman(exps), tol)
    except ValueError as exc:
        print(f"cosmin min: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToleranceUnreachable as exc:
        print(f"cosmin min: tolerance not reached: {exc}", file=sys.stderr)
        return EXIT_TOL

    if args.output == "json":
        _emit(json.dumps({"kind": kind, "set": exps, **res.to_dict()}, indent=2))
    elif args.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "kind", "value", "theta", "error_radius"])
        w.writerow([_fmt_set(exps), kind, repr(res.value), repr(res.theta_star),
                    repr(res.error_radius)])
        _emit(buf.getvalue())
    else:
        name = "L" if kind == "cosine" else "M"
        _emit(f"{name}({', '.join(map(str, exps))}) = {res.value:.6f}\n"
              f"theta*       = {res.theta_star:.6f}\n"
              f"error radius = {res.error_radius:.2e}  (grid {res.grid_size}, "
              f"{'refined' if res.refined else 'unrefined'})")
    return EXIT_OK


# -- search ----------------------------------------------------------------

def _search_table(report) -> str:
    label = "lambda" if report.spec.problem is Problem.LAMBDA else "mu"
    lines = [f"{label}  n={report.spec.n}  a_n <= {report.spec.max_exponent}  "
             f"({report.sets_evaluated} canonical sets)",
             f"{'rank':>4}  {'objective':>10}  {'theta':>9}  set"]
    for i, r in enumerate(report.best, 1):
        lines.append(f"{i:>4}  {r.objective:>10.6f}  {r.theta_star:>9.6f}  {_fmt_set(r.set)}")
    for s, err in report.failures:
        lines.append(f"FAILED {_fmt_set(s)}: {err}")
    return "\n".join(lines)


def cmd_search(args) -> int:
    if args.resume and not args.checkpoint:
        print("cosmin search: error: --resume needs --checkpoint", file=sys.stderr)
        return EXIT_USAGE
    if (args.checkpoint and not args.resume and os.path.exists(args.checkpoint)
            and os.path.getsize(args.checkpoint) > 0):
        print(f"cosmin search: error: {args.checkpoint} exists; pass --resume to "
              "continue it or remove it", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = SearchSpec(Problem(args.problem), args.n, args.max,
                          args.tol or SEARCH_TOL, args.top_k)
        report = run_search(spec, workers=args.jobs, checkpoint=args.checkpoint,
                            resume=args.resume)
    except (EmptySpace, ValueError) as exc:
        if isinstance(exc, CorruptCheckpoint):
            print(f"cosmin search: corrupt checkpoint: {exc}", file=sys.stderr)
            return EXIT_CHECKPOINT
        print(f"cosmin search: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    if args.output == "json":
        _emit(report.to_json())
    elif args.output == "csv":
        _emit(report.to_csv())
    else:
        _emit(_search_table(report))
        log.info("wall time %.1fs", report.wall_time)
    return EXIT_TOL if report.failures else EXIT_OK


# -- tables ----------------------------------------------------------------

def cmd_tables(args) -> int:
    rows = []
    failures = []
    for problem, known in ((Problem.LAMBDA, KNOWN_LAMBDA), (Problem.MU, KNOWN_MU)):
        for n, (value, best_set) in sorted(known.items()):
            if args.quick and n > 4:
                continue
            spec = SearchSpec(problem, n, TABLE_BOUND[problem],
                              args.tol or SEARCH_TOL, top_k=1)
            t0 = time.perf_counter()
            report = run_search(spec, workers=args.jobs)
            log.info("%s n=%d done in %.1fs", problem.value, n, time.perf_counter() - t0)
            failures.extend(report.failures)
            top = report.best[0]
            match = abs(top.objective - value) <= MATCH_TOL and top.set == best_set
            rows.append({"problem": problem.value, "n": n,
                         "max_exponent": TABLE_BOUND[problem],
                         "computed": top.objective, "computed_set": list(top.set),
                         "known": value, "known_set": list(best_set), "match": match})

    if args.output == "json":
        _emit(json.dumps({"rows": rows, "failures": [
            {"set": list(s), "error": e} for s, e in failures]}, indent=2))
    elif args.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["problem", "n", "computed", "computed_set", "known", "known_set", "match"])
        for r in rows:
            w.writerow([r["problem"], r["n"], repr(r["computed"]), _fmt_set(r["computed_set"]),
                        f"{r['known']:.6f}", _fmt_set(r["known_set"]), r["match"]])
        _emit(buf.getvalue())
    else:
        out = []
        for label in ("lambda", "mu"):
            sub = [r for r in rows if r["problem"] == label]
            if not sub:
                continue
            out.append(f"{label}(n), a_n <= {sub[0]['max_exponent']}")
            out.append(f"{'n':>2}  {'computed':>9}  {'known':>9}  {'set':<20}  match")
            for r in sub:
                out.append(f"{r['n']:>2}  {r['computed']:>9.6f}  {r['known']:>9.6f}  "
                           f"{_fmt_set(r['computed_set']):<20}  "
                           f"{'yes' if r['match'] else 'NO (' + _fmt_set(r['known_set']) + ')'}")
            out.append("")
        _emit("\n".join(out))
    if failures:
        return EXIT_TOL
    return EXIT_OK if all(r["match"] for r in rows) else EXIT_VERIFY


# -- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    names = list(claims.CLAIMS) if args.claim == "all" else [args.claim]
    options = {"seed": args.seed, "max_a2": args.max_a2, "max_a3": args.max_a3}
    if args.tol:
        options["tol"] = args.tol
    summary = []
    records = []
    for name in names:
        try:
            recs = claims.run_claim(name, **options)
        except ToleranceUnreachable as exc:
            print(f"cosmin verify: {name}: tolerance not reached: {exc}", file=sys.stderr)
            return EXIT_TOL
        records.extend(recs)
        failed = [r for r in recs if not r.passed]
        summary.append({"claim": name, "checked": len(recs),
                        "passed": len(recs) - len(failed)})
        log.info("%s: %d/%d passed", name, len(recs) - len(failed), len(recs))
    bad = [r for r in records if not r.passed]

    if args.output == "json":
        _emit(json.dumps({"summary": summary,
                          "records": [r.to_dict() for r in records]}))
    elif args.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["claim", "inputs", "pass"])
        for r in records:
            w.writerow([r.claim, json.dumps(r.inputs), r.passed])
        _emit(buf.getvalue())
    else:
        lines = [f"{s['claim']:<14} {s['passed']:>6}/{s['checked']:<6} "
                 f"{'ok' if s['passed'] == s['checked'] else 'FAIL'}" for s in summary]
        lines += [f"FAILED {r.claim} {json.dumps(r.inputs)}: {json.dumps(r.witness)}"
                  for r in bad]
        _emit("\n".join(lines))
    return EXIT_VERIFY if bad else EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json", "csv"), default="text")
    common.add_argument("--tol", type=positive_float, default=None,
                        help=f"tolerance (default {DEFAULT_TOL:g} for min, "
                             f"{SEARCH_TOL:g} for search/tables)")
    common.add_argument("-v", "--verbose", action="store_true")
    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=positive_int, default=None,
                      help="worker processes (default: $COSMIN_JOBS or CPU count)")

    parser = argparse.ArgumentParser(
        prog="cosmin",
        description="Minima of cosine sums and Newman polynomials on the unit circle.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("min", parents=[common], help="certified minimum of one set")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cosine", type=exponent_list, metavar="A1,A2,...")
    g.add_argument("--newman", type=exponent_list, metavar="A1,A2,...")
    p.set_defaults(func=cmd_min)

    p = sub.add_parser("search", parents=[common, jobs],
                       help="exhaustive search for the best set")
    p.add_argument("problem", choices=[q.value for q in Problem])
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--max", type=positive_int, required=True, help="bound on a_n")
    p.add_argument("--top-k", type=positive_int, default=10)
    p.add_argument("--checkpoint", metavar="PATH")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--report", metavar="PATH", help="write the JSON report here")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("tables", parents=[common, jobs],
                       help="recompute the lambda and mu tables")
    p.add_argument("--quick", action="store_true", help="only n <= 4")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("claim", choices=[*claims.CLAIMS, "all"])
    p.add_argument("--max-a2", type=positive_int, default=100)
    p.add_argument("--max-a3", type=positive_int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if hasattr(args, "jobs") and args.jobs is None:
        args.jobs = default_jobs()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
