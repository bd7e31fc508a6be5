"""Command-line interface.

Exit status: 0 on success or an affirmative verdict, 1 on a negative verdict,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Dict, List, Optional, Sequence

from . import analysis
from .patterns import (
    PatternSystem,
    encode_context_sensitive,
    encode_innermost,
    encode_outermost,
    forbidden_redexes,
    is_canonical,
    is_simple,
    mu_replacing,
    pi_redexes,
)
from .rewriting import innermost_redexes, outermost_redexes, redexes, step
from .syntax import SystemSyntaxError, export_tpdb, parse_system, parse_term, print_system
from .terms import TermError, format_pos
from .transform import UnsupportedPattern, transform


class UsageError(Exception):
    pass


def _load(path: str) -> PatternSystem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return parse_system(text)


def _term(sys: PatternSystem, text: str):
    return parse_term(text, sys)


def cmd_validate(args, out) -> int:
    sys_ = _load(args.file)
    print(
        f"ok: {len(sys_.signature.sorts)} sorts, {len(sys_.signature)} symbols, "
        f"{len(sys_.rules)} rules, {len(sys_.patterns)} patterns",
        file=out,
    )
    return 0


def cmd_step(args, out) -> int:
    sys_ = _load(args.file)
    t = _term(sys_, args.term)
    print(f"term: {t}", file=out)
    for r in pi_redexes(sys_, t):
        print(
            f"allowed   {format_pos(r.position)}  rule {r.rule_index}  -> {step(sys_.trs, t, r)}",
            file=out,
        )
    for r, w in forbidden_redexes(sys_, t):
        pat = sys_.patterns[w.pattern_index]
        print(
            f"forbidden {format_pos(r.position)}  rule {r.rule_index}  by pattern "
            f"{w.pattern_index} {pat} at {format_pos(w.match_position)}",
            file=out,
        )
    return 0


def cmd_reduce(args, out) -> int:
    sys_ = _load(args.file)
    t = _term(sys_, args.term)
    u, steps, done = analysis.pi_normalize(sys_, t, args.max_steps)
    for s, p, i in steps:
        print(f"{s}  --[{format_pos(p)}, rule {i}]-->", file=out)
    print(u, file=out)
    if not done:
        print(f"stopped after {args.max_steps} steps", file=sys.stderr)
        return 1
    return 0


def cmd_normalize(args, out) -> int:
    sys_ = _load(args.file)
    t = _term(sys_, args.term)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            res = analysis.normalize(sys_, t, step_budget=args.max_steps, depth_budget=args.max_depth)
        except analysis.BudgetExhausted as e:
            print(e.partial, file=out)
            print(f"budget exhausted: {e}", file=sys.stderr)
            return 1
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.trace:
        print(res.trace, file=out)
    else:
        print(res.term, file=out)
    return 0


def cmd_check(args, out) -> int:
    sys_ = _load(args.file)
    want_simple = args.simple or not (args.simple or args.canonical)
    want_canon = args.canonical or not (args.simple or args.canonical)
    reports = {}
    if want_simple:
        reports["simple"] = is_simple(sys_.patterns)
    if want_canon:
        reports["canonical"] = is_canonical(sys_)
    verdict = all(r.verdict for r in reports.values())
    if args.json:
        payload = {
            "verdict": verdict,
            "checks": {k: r.to_dict() for k, r in reports.items()},
            "violations": [
                {"check": k, "pattern": i, "message": m}
                for k, r in reports.items()
                for i, m in r.violations
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
    else:
        for k, r in reports.items():
            print(f"{k}: {'yes' if r.verdict else 'no'}", file=out)
            for i, m in r.violations:
                print(f"  pattern {i}: {m}", file=out)
            for i, m in r.notes:
                print(f"  note, pattern {i}: {m}", file=out)
    return 0 if verdict else 1


def cmd_transform(args, out) -> int:
    sys_ = _load(args.file)
    res = transform(sys_)
    trs = res.minimized() if args.minimize else res.trs
    text = export_tpdb(trs) if args.tpdb else print_system(trs)
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(
            f"{len(trs.rules)} rules after {res.iterations} iterations written to {args.output}",
            file=sys.stderr,
        )
    else:
        out.write(text)
    return 0


def _parse_mu(items: Optional[List[str]]) -> Dict[str, List[int]]:
    mu: Dict[str, List[int]] = {}
    for item in items or []:
        name, _, rest = item.partition("=")
        if not name:
            raise UsageError(f"bad --mu entry {item!r}; expected NAME=1,2")
        try:
            mu[name] = [int(x) for x in rest.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --mu entry {item!r}; expected NAME=1,2") from None
    return mu


def cmd_oracle(args, out) -> int:
    sys_ = _load(args.file)
    trs = sys_.trs
    if args.encoding == "innermost":
        enc = PatternSystem(trs, encode_innermost(trs))
        oracle = lambda t: innermost_redexes(trs, t)
    elif args.encoding == "outermost":
        enc = PatternSystem(trs, encode_outermost(trs))
        oracle = lambda t: outermost_redexes(trs, t)
    else:
        mu = _parse_mu(args.mu)
        enc = PatternSystem(trs, encode_context_sensitive(mu, trs.signature))
        oracle = lambda t: [r for r in redexes(trs, t) if mu_replacing(mu, t, r.position)]
    terms = analysis.ground_terms(trs.signature, args.depth)
    rep = analysis.compare_relations(lambda t: pi_redexes(enc, t), oracle, terms)
    print(
        f"{args.encoding}: {rep.terms_checked} terms, {len(rep.discrepancies)} discrepancies",
        file=out,
    )
    for d in rep.discrepancies[:20]:
        print(f"  {d.term}: encoded-only {d.only_first}, oracle-only {d.only_second}", file=out)
    return 0 if rep.equal else 1


def cmd_ground_check(args, out) -> int:
    sys_ = _load(args.file)
    res = transform(sys_)
    rep = analysis.check_ground_correspondence(sys_, res, depth=args.depth, k=args.steps)
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True), file=out)
    else:
        print(
            f"ground correspondence: {'yes' if rep.verdict else 'no'} "
            f"({rep.terms_checked} terms, {rep.pairs_checked} pairs)",
            file=out,
        )
        for c in rep.counterexamples[:20]:
            print(f"  {c['direction']}: {c['source']} => {c['target']}", file=out)
    return 0 if rep.verdict else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="forbidpat", description="Rewriting with forbidden patterns."
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="parse and sort-check a system file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("step", help="list allowed and forbidden redexes of a term")
    s.add_argument("file")
    s.add_argument("-t", "--term", required=True)
    s.set_defaults(func=cmd_step)

    s = sub.add_parser("reduce", help="reduce a term with allowed steps, printing the trace")
    s.add_argument("file")
    s.add_argument("-t", "--term", required=True)
    s.add_argument("--max-steps", type=int, default=100)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("normalize", help="normalize via restricted normal forms of subterms")
    s.add_argument("file")
    s.add_argument("-t", "--term", required=True)
    s.add_argument("--max-steps", type=int, default=1000)
    s.add_argument("--max-depth", type=int, default=200)
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("check", help="check simplicity and canonicity of the patterns")
    s.add_argument("file")
    s.add_argument("--simple", action="store_true")
    s.add_argument("--canonical", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("transform", help="transform into a plain TRS")
    s.add_argument("file")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--tpdb", action="store_true")
    fmt.add_argument("--native", action="store_true")
    s.add_argument("--minimize", action="store_true", help="drop rules subsumed by other rules")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("oracle", help="compare a strategy encoding with its direct definition")
    s.add_argument("file")
    s.add_argument("--encoding", choices=["innermost", "outermost", "csr"], required=True)
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--mu", action="append", metavar="NAME=I,J", help="replacement map entry (csr)")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("ground-check", help="check ground correspondence with the transformed TRS")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--steps", type=int, default=4)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_ground_check)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args, out)
    except (UsageError, SystemSyntaxError, UnsupportedPattern, TermError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
