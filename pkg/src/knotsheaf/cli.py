"""Command-line interface: ``knotsheaf <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 a requested check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Sequence

from . import augment, reps, sheaf, variety
from .diagram import knot, parse_pd, presentation_to_json, wirtinger
from .errors import BudgetExceeded, KnotSheafError, VerificationError

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load(value: str):
    if value == "-":
        text = sys.stdin.read()
    elif os.path.exists(value):
        with open(value) as fh:
            text = fh.read()
    else:
        text = value
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"input is neither a readable file nor JSON: {exc}") from exc


def _presentation(args):
    if getattr(args, "pd", None):
        text = args.pd
        if os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        return wirtinger(parse_pd(text))
    return knot(args.knot)


def _emit(doc, out=None):
    out = out or sys.stdout
    json.dump(doc, out, indent=2, sort_keys=False)
    out.write("\n")


def cmd_wirtinger(args) -> int:
    _emit(presentation_to_json(_presentation(args)))
    return EXIT_OK


def cmd_check_rep(args) -> int:
    rep = reps.rep_from_json(_load(args.rep))
    ok = reps.check_relations(rep)
    _emit({"relations_hold": ok, "dim": rep.dim})
    return EXIT_OK if ok else EXIT_CHECK


def cmd_classify_rep(args) -> int:
    rep = reps.rep_from_json(_load(args.rep))
    if not reps.check_relations(rep):
        _emit({"error": "representation violates a Wirtinger relation"})
        return EXIT_CHECK
    _emit(reps.classify_rep(rep).to_json())
    return EXIT_OK


def cmd_classify_sheaf(args) -> int:
    s = sheaf.sheaf_from_json(_load(args.sheaf))
    if not sheaf.is_simple(s):
        _emit({"simple": False, "cone_rank": sheaf.cone_rank(s)})
        return EXIT_CHECK
    cls = sheaf.classify(s)
    doc = cls.to_json()
    doc["simple"] = True
    doc["certificate_valid"] = cls.certifies(s)
    _emit(doc)
    return EXIT_OK if doc["certificate_valid"] else EXIT_CHECK


def cmd_sheaf_to_aug(args) -> int:
    s = sheaf.sheaf_from_json(_load(args.sheaf))
    if not sheaf.is_simple(s):
        _emit({"simple": False, "cone_rank": sheaf.cone_rank(s)})
        return EXIT_CHECK
    _emit(augment.aug_to_json(augment.from_sheaf(s)))
    return EXIT_OK


def cmd_lift_aug(args) -> int:
    aug = augment.aug_from_json(_load(args.aug))
    try:
        rep = augment.lift(aug)
    except VerificationError as exc:
        _emit({"ok": False, "error": str(exc)})
        return EXIT_CHECK
    _emit(reps.rep_to_json(rep))
    return EXIT_OK


def cmd_verify_aug(args) -> int:
    aug = augment.aug_from_json(_load(args.aug))
    verdict = augment.verify(aug)
    doc = verdict.to_json()
    ok = verdict.ok
    if ok:
        doc["profile"] = augment.degenerate_profile(aug).value
    if ok and args.suite:
        suite = augment.relation_suite(aug, random.Random(args.seed), samples=args.suite)
        doc["suite"] = {"samples": suite.samples, "seed": args.seed, "failures": suite.failures}
        ok = suite.ok
    _emit(doc)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_ext1(args) -> int:
    rep = reps.rep_from_json(_load(args.rep))
    alpha = rep.field.parse(args.alpha)
    _emit({"alpha": rep.field.format(alpha), "ext1_dim": sheaf.ext1_dim(rep, alpha)})
    return EXIT_OK


def _enumerate(args) -> variety.EnumerationReport:
    budget = int(float(args.budget)) if args.budget is not None else None
    return variety.enumerate_augmentations(_presentation(args), args.prime, threads=args.threads, budget=budget)


def cmd_enumerate(args) -> int:
    report = _enumerate(args)
    if args.output == "csv":
        sys.stdout.write(report.to_csv())
    else:
        doc = report.to_json(include_augmentations=args.include_augmentations, include_timing=args.timing)
        if args.check_universal:
            doc["universal_locus"] = variety.universal_locus_check(report)
        _emit(doc)
    if args.check_universal and not variety.universal_locus_check(report):
        return EXIT_CHECK
    return EXIT_OK


def cmd_census(args) -> int:
    table = variety.census(_enumerate(args))
    _emit(table.to_json())
    return EXIT_OK if table.ok else EXIT_CHECK


def _knot_args(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--knot", help="built-in knot: unknot, trefoil, figure-eight")
    g.add_argument("--pd", help="PD code text or a file containing it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="knotsheaf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("wirtinger", help="Wirtinger presentation of a knot")
    _knot_args(p)
    p.set_defaults(func=cmd_wirtinger)

    for name, func, help_ in [
        ("check-rep", cmd_check_rep, "check the Wirtinger relations"),
        ("classify-rep", cmd_classify_rep, "KCH / unipotent classification"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--rep", required=True, help="representation JSON: path, '-' or inline")
        p.set_defaults(func=func)

    for name, func, help_ in [
        ("classify-sheaf", cmd_classify_sheaf, "isomorphism type of a simple sheaf"),
        ("sheaf-to-aug", cmd_sheaf_to_aug, "augmentation of a simple sheaf"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--sheaf", required=True, help="sheaf JSON: path, '-' or inline")
        p.set_defaults(func=func)

    p = sub.add_parser("lift-aug", help="representation on the span of R")
    p.add_argument("--aug", required=True)
    p.set_defaults(func=cmd_lift_aug)

    p = sub.add_parser("verify-aug", help="verify an augmentation")
    p.add_argument("--aug", required=True)
    p.add_argument("--suite", type=int, default=0, metavar="N", help="also run N random relation-suite samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_aug)

    p = sub.add_parser("ext1", help="dimension of the gluing space for a knot monodromy alpha")
    p.add_argument("--rep", required=True)
    p.add_argument("--alpha", required=True)
    p.set_defaults(func=cmd_ext1)

    for name, func, help_ in [
        ("enumerate", cmd_enumerate, "all augmentations over GF(p)"),
        ("census", cmd_census, "profile / lift census of all augmentations over GF(p)"),
    ]:
        p = sub.add_parser(name, help=help_)
        _knot_args(p)
        p.add_argument("--prime", type=int, required=True)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--budget", default=None, help="candidate budget (default $KNOTSHEAF_BUDGET or 1e8)")
        if name == "enumerate":
            p.add_argument("--output", choices=("json", "csv"), default="json")
            p.add_argument("--check-universal", action="store_true")
            p.add_argument("--include-augmentations", action="store_true")
            p.add_argument("--timing", action="store_true", help="add wall-clock time to the JSON report")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"knotsheaf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"knotsheaf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"knotsheaf: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KnotSheafError, ValueError, KeyError, TypeError) as exc:
        print(f"knotsheaf: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
