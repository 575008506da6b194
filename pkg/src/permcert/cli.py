"""Command line entry point.

Exit codes: 0 consistent / certificate produced, 1 condition or hypothesis
fails (an expected negative result), 2 usage or I/O error, 3 a proven
theorem or the covering lemma failed, or a conjecture candidate surfaced.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .condition import GroupInstance, check_condition, lift_integers
from .covering import (
    CoveringSystem,
    covers_all_integers,
    distinct_fractional_sums,
    verify_lemma31,
)
from .errors import (
    HypothesisViolatedError,
    MalformedLogError,
    PermcertError,
    TheoremContradiction,
)
from .explorer import ExperimentConfig, emit_report, log_has_alarms, run_experiment
from .group_core import validate_spec
from .subset_sums import residue_coverage
from .theorem_solvers import PermutationCertificate, Thm13Input, solve_thm11, solve_thm13

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_ALARM = 0, 1, 2, 3

log = logging.getLogger("permcert")


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}")


def _emit(obj) -> None:
    print(json.dumps(obj))


def cmd_check(args) -> int:
    report = check_condition(lift_integers(args.n, args.m))
    _emit(report.to_json())
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_solve(args) -> int:
    spec = validate_spec(args.group)
    inst = GroupInstance.from_coords(spec, args.elements)
    res = solve_thm11(inst)
    _emit(res.to_json())
    return EXIT_OK if isinstance(res, PermutationCertificate) else EXIT_NEGATIVE


def cmd_coverage(args) -> int:
    cov = residue_coverage(args.n, args.m)
    passed = check_condition(lift_integers(args.n, args.m)).passed
    _emit({**cov.to_json(), "condition_passed": passed})
    if cov.complete:
        return EXIT_OK
    if passed:
        log.error("condition holds but coverage is incomplete")
        return EXIT_ALARM
    return EXIT_NEGATIVE


def cmd_thm13(args) -> int:
    try:
        inp = Thm13Input(args.n, args.m, args.a)
    except HypothesisViolatedError as exc:
        _emit({"hypothesis": False, "reason": str(exc)})
        return EXIT_NEGATIVE
    _emit({**solve_thm13(inp).to_json(), "verified": True})
    return EXIT_OK


def cmd_cover(args) -> int:
    system = CoveringSystem.from_json(args.system)
    traces = []
    for t in system.traces():
        traces.append(None if t.empty else {"residue": t.residue, "modulus": t.modulus})
    out = {
        "system": system.to_json(),
        "traces": traces,
        "period": system.period,
        "covers_all": covers_all_integers(system),
        "N": distinct_fractional_sums(system),
    }
    code = EXIT_OK
    if args.verify_lemma:
        verdict = verify_lemma31(system)
        out["lemma"] = verdict.to_json()
        if not verdict.consistent:
            code = EXIT_ALARM
    _emit(out)
    return code


def cmd_explore(args) -> int:
    config = ExperimentConfig(
        mode=args.mode,
        group=tuple(validate_spec(args.group).moduli) if args.group is not None else None,
        strategy=args.strategy,
        count=args.count,
        seed=args.seed,
        jobs=args.jobs,
        out=args.out,
        filter=args.filter,
        dedup=args.dedup,
        max_k=args.max_k,
        bound=args.bound,
    )
    summary = run_experiment(config)
    _emit(summary.to_json())
    for rec in summary.alarms:
        log.error("alarm: %s", json.dumps(rec))
    return summary.exit_code


def cmd_report(args) -> int:
    print(emit_report(args.infile))
    return EXIT_ALARM if log_has_alarms(args.infile) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="permcert",
        description="Zero-avoiding permutations, subset sums and covering systems.",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="divisor condition for integers m_1..m_{n-1}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=_csv_ints, required=True, help="e.g. --m=1,2,3")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="zero-avoiding permutation in a finite abelian group")
    s.add_argument("--group", type=_json_arg, required=True, help="moduli, e.g. '[4,2]'")
    s.add_argument("--elements", type=_json_arg, required=True, help="e.g. '[[1,0],[2,1],[3,1]]'")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("coverage", help="subset-sum residues modulo n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=_csv_ints, required=True)
    s.set_defaults(func=cmd_coverage)

    s = sub.add_parser("thm13", help="shifted sums distinct, products nonzero")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=_csv_ints, required=True)
    s.add_argument("--a", type=_csv_ints, required=True)
    s.set_defaults(func=cmd_thm13)

    s = sub.add_parser("cover", help="coverage of a rational covering system")
    s.add_argument("--system", type=_json_arg, required=True, help='e.g. \'[["1","2"],["2","4"]]\'')
    s.add_argument("--verify-lemma", action="store_true")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("explore", help="batch verification with a JSONL log")
    s.add_argument("--mode", choices=["thm11", "thm12", "thm13", "conj12", "lemma31"], required=True)
    s.add_argument("--group", type=_json_arg, default=None)
    s.add_argument("--strategy", choices=["exhaustive", "random"], default="random")
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=int(os.environ.get("PERMCERT_JOBS", "1")))
    s.add_argument("--out", default=None)
    s.add_argument("--filter", choices=["condition", "hypothesis"], default=None)
    s.add_argument("--dedup", action="store_true", help="exhaustive: one instance per multiset")
    s.add_argument("--max-k", type=int, default=8, help="lemma31: max progressions per system")
    s.add_argument("--bound", type=int, default=12, help="lemma31: numerator/denominator bound")
    s.set_defaults(func=cmd_explore)

    s = sub.add_parser("report", help="summarize a JSONL log")
    s.add_argument("--in", dest="infile", required=True)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except TheoremContradiction as exc:
        log.error("%s", exc)
        print(json.dumps({"theorem_contradiction": str(exc), "dump": exc.dump}))
        return EXIT_ALARM
    except MalformedLogError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (PermcertError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
