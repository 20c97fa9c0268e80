"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 verification mismatch,
3 enumeration budget exceeded.  Machine-readable output goes to stdout (or
--out); progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .characters import Character, act, break_sequence, indicator, indicator_1m, type_violation
from .enumeration import BudgetExceeded, CharacterSpace
from .equivalence import (
    CRITERIA,
    DEFAULT_BUDGET,
    ClassReport,
    strict_classes_1m,
    strict_classes_bruteforce,
    weak_orbits_bruteforce,
)
from .fpseries import FpSeries
from .nottingham import NottinghamElement, depth, order_in_quotient
from .verification import DEFAULT_SEED, LARGE_TYPE, SUITES, SuiteOptions

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("nottingham_torsion")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nottingham-torsion", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--out", type=Path, help="write the report here instead of stdout")

    en = sub.add_parser("enumerate", help="count weak or strict classes of a type by brute force")
    en.add_argument("--p", type=int, required=True)
    en.add_argument("--m", type=int, required=True, help="second break b1")
    en.add_argument("--type", dest="b0", type=int, default=2, choices=(1, 2), help="first break b0")
    en.add_argument("--relation", choices=("weak", "strict"), default="weak")
    en.add_argument("--criterion", choices=CRITERIA, default="mod_p", help="strict kernel test")
    en.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    en.add_argument("--threads", type=int, default=1)
    en.add_argument("--allow-large", action="store_true", help=f"permit types with more than {LARGE_TYPE} characters")
    common(en)

    ve = sub.add_parser("verify", help="run a named verification suite")
    ve.add_argument("--suite", required=True, help=", ".join(SUITES))
    ve.add_argument("--p", type=int)
    ve.add_argument("--m", type=int, action="append", help="restrict to this m (repeatable)")
    ve.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ve.add_argument("--samples", type=int, default=1000)
    ve.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ve.add_argument("--threads", type=int, default=1)
    ve.add_argument("--allow-large", action="store_true")
    common(ve)

    ac = sub.add_parser("act", help="apply a Nottingham element to a character")
    ac.add_argument("--character", type=Path, required=True, help="character JSON file")
    ac.add_argument("--element", type=Path, required=True, help="Nottingham element JSON file")
    common(ac)

    od = sub.add_parser("order", help="order of an element in the quotient modulo t^N")
    src = od.add_mutually_exclusive_group(required=True)
    src.add_argument("--element", type=Path, help="Nottingham element JSON file")
    src.add_argument("--series", help="comma-separated coefficients of u(t), starting at t^0")
    od.add_argument("--p", type=int, help="modulus for --series")
    od.add_argument("--N", type=int, help="quotient precision (default: the element's)")
    common(od)
    return parser


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def _report_text(r: ClassReport) -> str:
    lines = [f"type <{r.b0},{r.m}> over F_{r.p}: {r.total} characters"]
    if r.weak_count is not None:
        lines.append(f"weak classes: {r.weak_count}")
    if r.strict_count is not None:
        lines.append(f"strict classes: {r.strict_count} ({r.criterion})")
    if r.bounds():
        lo, hi = r.bounds()
        lines.append(f"closed-form bracket: [{lo}, {hi}]")
    for i, w in enumerate(r.weak_classes):
        ind = "" if w.indicator is None else f" ind={list(w.indicator.values)}"
        lines.append(f"  weak[{i}] size={w.size}{ind} rep={w.representative.coeffs}")
    for s in r.strict_classes:
        lines.append(f"  strict size={s.size} parent={s.parent} rep={s.representative.coeffs}")
    for issue in r.issues:
        lines.append(f"MISMATCH {issue.check}: {issue.message}")
    return "\n".join(lines)


def cmd_enumerate(args) -> int:
    why = type_violation(args.p, args.b0, args.m)
    if why is not None:
        raise UsageError(f"<{args.b0},{args.m}> is not a break sequence for p={args.p}: {why}")
    if args.b0 == 2 and args.p == 2:
        raise UsageError("type <2,m> needs an odd prime")
    size = CharacterSpace(args.p, args.m, args.b0).size
    if size > LARGE_TYPE and not args.allow_large:
        raise UsageError(f"type has {size} characters; pass --allow-large to enumerate it")
    try:
        if args.b0 == 1:
            report = strict_classes_1m(args.p, args.m, args.budget, args.threads)
        elif args.relation == "weak":
            report = weak_orbits_bruteforce(args.p, args.m, args.budget, threads=args.threads)
        else:
            report = strict_classes_bruteforce(args.p, args.m, args.criterion, args.budget, args.threads)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}; nothing enumerated, raise --budget to proceed", file=sys.stderr)
        return EXIT_BUDGET
    if args.format == "json":
        text = json.dumps(report.to_dict(), indent=2)
    elif args.format == "csv":
        text = ClassReport.CSV_HEADER + "\n" + report.csv_row()
    else:
        text = _report_text(report)
    _emit(text, args.out)
    for issue in report.issues:
        print(f"verification failure ({issue.check}): {issue.message}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    opts = SuiteOptions(
        p=args.p,
        seed=args.seed,
        budget=args.budget,
        threads=args.threads,
        samples=args.samples,
        allow_large=args.allow_large,
        ms=args.m,
    )
    checks = []
    for check in SUITES[args.suite](opts):
        checks.append(check)
        log.info(check.line())
    if args.format == "json":
        text = json.dumps({"suite": args.suite, "seed": args.seed, "checks": [c.to_dict() for c in checks]}, indent=2)
    elif args.format == "csv":
        text = "name,status,detail\n" + "\n".join(
            f'{c.name},{c.to_dict()["status"]},"{c.detail}"' for c in checks
        )
    else:
        text = "\n".join(c.line() for c in checks)
    _emit(text, args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_MISMATCH


def _describe_character(chi: Character) -> dict:
    out = {"character": chi.to_dict()}
    try:
        bs = break_sequence(chi)
    except ValueError as e:
        out["break_sequence"] = None
        out["note"] = str(e)
        return out
    out["break_sequence"] = [bs.b0, bs.b1]
    if bs.b1 <= chi.bound and bs.b0 in (1, 2):
        ind = indicator(chi) if bs.b0 == 2 else indicator_1m(chi)
        out["indicator"] = ind.to_dict()
    return out


def cmd_act(args) -> int:
    try:
        chi = Character.from_dict(_load_json(args.character))
        u = NottinghamElement.from_dict(_load_json(args.element))
        psi = act(u, chi)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(str(e)) from e
    result = {"input": _describe_character(chi), "result": _describe_character(psi), "element": u.to_dict()}
    if args.format == "json":
        text = json.dumps(result, indent=2)
    elif args.format == "csv":
        text = "j,before,after\n" + "\n".join(f"{j},{chi[j]},{psi[j]}" for j in sorted(set(chi.coeffs) | set(psi.coeffs)))
    else:
        res = result["result"]
        text = f"act(u, chi) = {psi.coeffs}\nbreak sequence: {res.get('break_sequence')}\nindicator: {res.get('indicator')}"
    _emit(text, args.out)
    return EXIT_OK


def cmd_order(args) -> int:
    try:
        if args.element is not None:
            u = NottinghamElement.from_dict(_load_json(args.element))
        else:
            if args.p is None:
                raise UsageError("--series needs --p")
            coeffs = [int(c) for c in args.series.split(",")]
            u = NottinghamElement(FpSeries(args.p, coeffs, len(coeffs)))
        n = args.N or u.precision
        k = order_in_quotient(u, n)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(str(e)) from e
    d = depth(u.truncate(n))
    divergent = None if d == float("inf") else d + 1
    result = {"p": u.p, "N": n, "order": k, "first_divergent_degree": divergent}
    if args.format == "json":
        text = json.dumps(result)
    elif args.format == "csv":
        text = "p,N,order,first_divergent_degree\n" + ",".join("" if v is None else str(v) for v in result.values())
    else:
        text = f"order {k} modulo t^{n}; first divergent degree {divergent}"
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {"enumerate": cmd_enumerate, "verify": cmd_verify, "act": cmd_act, "order": cmd_order}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
