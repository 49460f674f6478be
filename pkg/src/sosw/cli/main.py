# src/sosw/cli/main.py

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from colorama import init as colorama_init

from ..decomposition import MUTATIONS, decompose, decompose_dr, verify_decomposition_theorem
from ..dsl import parse_spec, parse_term, print_spec
from ..equivalence import bisimilarity, rooted_related
from ..errors import SoswCLIError, SoswError, format_error_for_help, get_error_info, list_error_codes_ordered
from ..formats import FAIL, FORMATS, INCONCLUSIVE, PASS, check_format
from ..harness import bundled_spec_names, class_for, congruence_check, load_bundled_spec, run_bundled_suite
from ..modal import distinguishing_formula, in_class, parse_class, parse_formula, satisfies
from ..ruloids import ruloids_for
from ..semantics import LTS, generate_lts, read_aut, render_state, write_aut
from ..settings import DEFAULT_BOUNDS, Bounds
from ..terms import EMPTY_MARKING, ArgumentMarking, universal_marking
from ..tss import TSS, MarkingSet
from ..validators import (
    parse_format_name,
    parse_kind,
    parse_non_negative_int,
    parse_pair,
    parse_state,
    read_text_file,
    require_text,
)
from .colors import c, reset, set_enabled

log = logging.getLogger("sosw")

# Width of the result banners
RESULT_WIDTH = 62

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3


# ============================================================
# INPUT LOADING
# ============================================================

def load_spec(arg: str) -> TSS:
    """A .tss path, or the name of a bundled spec."""
    require_text(arg, "Spec")
    if Path(arg).is_file():
        return parse_spec(read_text_file(arg))
    if arg in bundled_spec_names():
        return load_bundled_spec(arg)
    raise SoswCLIError("E017", f"No spec file or bundled spec named '{arg}'")


def load_lts(arg: str, tau_label: Optional[str], terms: List[str], bounds: Bounds) -> LTS:
    """An .aut file, or the LTS of a spec generated from --term roots."""
    if arg.endswith(".aut"):
        return read_aut(read_text_file(arg), tau_label)
    P = load_spec(arg)
    roots = [parse_term(t, P.signature) for t in terms] or list(P.base)
    if not roots:
        raise SoswCLIError("E001", f"{P.name} has no base processes; give --term")
    return generate_lts(P, roots, bounds=bounds)


def bounds_from(args) -> Bounds:
    overrides: Dict[str, int] = {}
    if args.depth is not None:
        overrides["universe_depth"] = parse_non_negative_int(args.depth, "depth")
        overrides["context_depth"] = overrides["universe_depth"]
        overrides["proof_depth"] = overrides["universe_depth"]
    if args.seed is not None:
        overrides["seed"] = parse_non_negative_int(args.seed, "seed")
    return DEFAULT_BOUNDS.with_overrides(**overrides)


# ============================================================
# OUTPUT
# ============================================================

def banner(title: str, color: str = "header") -> None:
    border = "=" * RESULT_WIDTH
    print(f"\n {border}")
    print(f" {c(color)}{title.center(RESULT_WIDTH)}{reset()}")
    print(f" {border}")


def verdict_text(result: str) -> str:
    return f"{c(result)}{result.upper()}{reset()}"


def emit_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def exit_for(results: List[str]) -> int:
    if FAIL in results:
        return EXIT_VIOLATION
    if INCONCLUSIVE in results:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# ============================================================
# SUBCOMMANDS
# ============================================================

def cmd_parse(args, bounds: Bounds) -> int:
    P = load_spec(args.spec)
    if args.report == "json":
        emit_json({
            "name": P.name,
            "actions": list(P.actions),
            "symbols": [f"{n}/{ar}" for n, ar in P.signature.symbols],
            "candidates": {name: ms.describe() for name, ms in P.markings},
            "rules": [str(r) for r in P.rules],
            "base": [str(t) for t in P.base],
        })
        return EXIT_OK
    if args.print:
        sys.stdout.write(print_spec(P))
        return EXIT_OK
    banner(f"SPEC {P.name}")
    print(f"   {c('label')}Actions{reset()}     :  {' '.join(P.actions)} (+ tau)")
    print(f"   {c('label')}Rules{reset()}       :  {len(P.rules)}")
    print(f"   {c('label')}Candidates{reset()}  :  {', '.join(P.candidates()) or '-'}")
    print(f"   {c('label')}Base{reset()}        :  {', '.join(str(t) for t in P.base) or '-'}")
    for r in P.rules:
        print(f"     {c('rule')}{r.name or '-'}{reset()}: {r}")
    print()
    return EXIT_OK


def cmd_check(args, bounds: Bounds) -> int:
    P = load_spec(args.spec)
    markings = None if args.infer else P.marking_set(args.candidate)
    names = [parse_format_name(f) for f in args.format] if args.format else list(FORMATS)
    verdicts = [check_format(P, f, markings, bounds, infer=args.infer) for f in names]
    if args.report == "json":
        emit_json([v.to_dict() for v in verdicts])
    else:
        banner(f"FORMAT CHECK {P.name}")
        for v in verdicts:
            print(f"   {v.format:<26}:  {verdict_text(v.result)}")
            for w in v.witnesses:
                print(f"       {c('rule')}{w.rule}{reset()} [{w.condition}] {w.detail}")
            for note in v.notes:
                print(f"       {c('path')}{note}{reset()}")
        print()
    return exit_for([v.result for v in verdicts])


def cmd_ruloids(args, bounds: Bounds) -> int:
    P = load_spec(args.spec)
    t = parse_term(require_text(args.term, "Term"), P.signature)
    labels = [args.label] if args.label else list(P.labels)
    sets = [ruloids_for(P, t, a, bounds=bounds, linear_only=args.linear_only) for a in labels]
    if args.report == "json":
        emit_json([
            {"label": rs.label, "partial": rs.partial,
             "ruloids": [ruloid_payload(r, args.proofs) for r in rs]}
            for rs in sets
        ])
    else:
        banner(f"RULOIDS FOR {t}")
        for rs in sets:
            flag = f" {c('warning')}(partial){reset()}" if rs.partial else ""
            print(f"   {c('label')}-{rs.label}->{reset()}  {len(rs)} ruloid(s){flag}")
            for r in rs:
                print(f"       {r}")
                if args.proofs:
                    for line in r.proof.render():
                        print(f"         {c('path')}{line}{reset()}")
        print()
    return EXIT_INCONCLUSIVE if any(rs.partial for rs in sets) else EXIT_OK


def ruloid_payload(r, proofs: bool) -> dict:
    payload = {"rule": str(r.rule), "linear": r.linear}
    if proofs:
        payload["proof"] = r.proof.render()
    return payload


def cmd_lts(args, bounds: Bounds) -> int:
    L = load_lts(args.spec, args.tau_label, args.term, bounds)
    text = write_aut(L)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    elif args.report == "json":
        emit_json(L.to_dict())
    else:
        sys.stdout.write(text)
    if L.partial:
        log.warning("LTS is partial: depth bound reached with new states still appearing")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_equiv(args, bounds: Bounds) -> int:
    L = load_lts(args.lts, args.tau_label, args.term, bounds)
    kind = parse_kind(args.kind)
    if not args.pairs:
        partition = bisimilarity(L, kind, method=args.method)
        if args.report == "json":
            emit_json({"kind": str(kind), **partition.to_dict()})
        else:
            banner(f"{str(kind).upper()} BISIMILARITY")
            for n, block in enumerate(partition.blocks):
                print(f"   block {n}:  {', '.join(render_state(s) for s in block)}")
            print()
        return EXIT_OK

    p, q = parse_pair(L, args.pairs)
    if kind.rooted:
        related = rooted_related(L, p, q, kind)
    else:
        related = bisimilarity(L, kind, method=args.method).same(p, q)
    witness = None
    if args.explain and not related:
        cls = class_for(kind)
        witness = distinguishing_formula(L, p, q, cls) if cls else None
    if args.report == "json":
        emit_json({"kind": str(kind), "p": render_state(p), "q": render_state(q),
                   "related": related, "witness": None if witness is None else str(witness)})
    else:
        verdict = verdict_text(PASS) if related else verdict_text(FAIL)
        print(f"\n {render_state(p)} ~{kind} {render_state(q)}:  {verdict}")
        if witness is not None:
            print(f"   distinguished by {c('formula')}{witness}{reset()}\n")
    return EXIT_OK if related else EXIT_VIOLATION


def cmd_sat(args, bounds: Bounds) -> int:
    L = load_lts(args.lts, args.tau_label, args.term, bounds)
    phi = parse_formula(require_text(args.formula, "Formula"), args.tau_label)
    p = parse_state(L, args.state)
    holds = satisfies(L, p, phi)
    member = {cls: in_class(phi, parse_class(cls)) for cls in args.cls} if args.cls else {}
    if args.report == "json":
        emit_json({"state": render_state(p), "formula": str(phi), "holds": holds, "classes": member})
    else:
        print(f"\n {render_state(p)} |= {c('formula')}{phi}{reset()}:  {verdict_text(PASS if holds else FAIL)}")
        for cls, ok in member.items():
            print(f"   in {cls}: {ok}")
        print()
    return EXIT_OK if holds else EXIT_VIOLATION


def gamma_marking(P: TSS, markings: MarkingSet, choice: str) -> ArgumentMarking:
    """The liquid arguments named by decompose --gamma."""
    if choice == "aleph":
        return markings.aleph
    if choice == "lambda":
        return markings.lam
    if choice == "universal":
        return universal_marking(P.signature)
    if choice == "empty":
        return EMPTY_MARKING
    return markings.gamma


def cmd_decompose(args, bounds: Bounds) -> int:
    P = load_spec(args.spec)
    t = parse_term(require_text(args.term, "Term"), P.signature)
    phi = parse_formula(require_text(args.formula, "Formula"), args.tau_label)
    markings = P.marking_set(args.candidate)
    gamma = gamma_marking(P, markings, args.gamma)
    if args.dr:
        result = decompose_dr(t, phi, P, gamma, bounds, markings=markings, mutation=args.mutation)
    else:
        result = decompose(t, phi, P, gamma, bounds)
    report = None
    if args.verify:
        report = verify_decomposition_theorem(
            P, [t], [phi], P.base, dr=args.dr, gamma=gamma, bounds=bounds, mutation=args.mutation,
        )
    if args.report == "json":
        payload = result.to_dict()
        if report is not None:
            payload["verification"] = report.to_dict()
        emit_json(payload)
    else:
        banner(f"DECOMPOSITION{' (DR)' if args.dr else ''} OF {phi}")
        print(f"   term {c('term')}{t}{reset()}:  {len(result)} mapping(s)")
        for m in result:
            print(f"     {m}")
        for tag in result.tags:
            print(f"   {c('warning')}tag: {tag}{reset()}")
        for rv in result.revisits:
            print(f"   {c('path')}revisited: {rv}{reset()}")
        if report is not None:
            print(f"   checked {report.checked} instances, {len(report.mismatches)} mismatch(es)")
            for mm in report.mismatches:
                print(f"     {c('error')}{mm}{reset()}")
        print()
    if report is not None and not report.ok:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE if result.tags else EXIT_OK


def cmd_congruence(args, bounds: Bounds) -> int:
    P = load_spec(args.spec)
    kind = parse_kind(args.kind)
    base = [parse_term(s, P.signature) for s in args.base] if args.base else None
    report = congruence_check(P, kind, bounds.context_depth, base, multi_hole=args.multi_hole, bounds=bounds)
    if args.report == "json":
        emit_json(report.to_dict())
    else:
        banner(f"CONGRUENCE {str(kind).upper()} ON {P.name}")
        print(f"   pairs tested:  {report.pairs}")
        if report.ok:
            print(f"   {verdict_text(PASS)}  no violations")
        for v in report.violations:
            print(f"   {c('fail')}{v.left} vs {v.right}{reset()}  (context {v.context})")
            if v.witness is not None:
                print(f"       witness {c('formula')}{v.witness}{reset()}")
        print()
    if not report.ok:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE if report.partial else EXIT_OK


def cmd_suite(args, bounds: Bounds) -> int:
    summary = run_bundled_suite(bounds, only=args.only or None)
    if args.report == "json":
        emit_json(summary.to_dict())
    else:
        banner("BUNDLED SUITE")
        for o in summary.outcomes:
            mark = verdict_text(PASS) if o.ok else verdict_text(FAIL)
            print(f"   {o.spec:<20} {o.check:<40} {mark}")
            if not o.ok:
                print(f"       expected {o.expected!r}, got {o.actual!r}")
        print()
    return EXIT_OK if summary.ok else EXIT_VIOLATION


COMMANDS = {
    "parse": cmd_parse,
    "check": cmd_check,
    "ruloids": cmd_ruloids,
    "lts": cmd_lts,
    "equiv": cmd_equiv,
    "sat": cmd_sat,
    "decompose": cmd_decompose,
    "congruence": cmd_congruence,
    "suite": cmd_suite,
}


# ============================================================
# BUILD ARGPARSE SUBCOMMANDS + FLAGS
# ============================================================

# Choices for decompose --gamma: the marking the decomposition keeps liquid
GAMMA_CHOICES = ("aleph-lambda", "aleph", "lambda", "universal", "empty")


def add_global_flags(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """
    Flags read both before and after the subcommand. Subparsers use
    SUPPRESS defaults so a value given before the subcommand survives.
    """
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--depth", type=str, default=default(None), help="Universe, context and proof depth.")
    parser.add_argument("--seed", type=str, default=default(None), help="Seed for sampled checks.")
    parser.add_argument("--report", choices=("text", "json"), default=default("text"), help="Output style.")
    parser.add_argument("--tau-label", type=str, default=default(None),
                        help="Label read as tau in .aut files and formulas.")
    parser.add_argument("--verbose", action="store_true", default=default(False), help="Debug logging.")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sosw",
        description="Structural operational semantics workbench: formats, ruloids, decomposition, congruence.",
    )

    # ------------------------------
    # Global flags
    # ------------------------------
    add_global_flags(parser)
    parser.add_argument("--list-errors", action="store_true", help="Print all registered error codes and exit.")
    parser.add_argument("--explain-error", metavar="CODE", help="Explain one error code and exit.")
    parser.add_argument("--dev", action="store_true", help=argparse.SUPPRESS)

    common = argparse.ArgumentParser(add_help=False)
    add_global_flags(common, suppress=True)

    sub = parser.add_subparsers(dest="command", help="Use `sosw <cmd> --help` for details.")

    p = sub.add_parser("parse", parents=[common], help="Parse a .tss spec and summarise it.")
    p.add_argument("spec", help="Path to a .tss file or a bundled spec name.")
    p.add_argument("--print", action="store_true", help="Print the spec back in DSL form.")

    p = sub.add_parser("check", parents=[common], help="Run congruence format checks.")
    p.add_argument("spec")
    p.add_argument("--format", action="append", help=f"One of: {', '.join(FORMATS)} (repeatable).")
    p.add_argument("--candidate", "--markings", dest="candidate",
                   help="Marking candidate (default: the first one).")
    p.add_argument("--infer", action="store_true", help="Use the least aleph and lambda instead.")

    p = sub.add_parser("ruloids", parents=[common], help="List the ruloids of an open term.")
    p.add_argument("spec")
    p.add_argument("--term", "--source", dest="term", required=True, help="Source term of the ruloids.")
    p.add_argument("--label")
    p.add_argument("--linear-only", action="store_true")
    p.add_argument("--proofs", action="store_true", help="Print the proof tree behind each ruloid.")

    p = sub.add_parser("lts", parents=[common], help="Generate the LTS of closed terms as .aut.")
    p.add_argument("spec")
    p.add_argument("--term", action="append", default=[], help="Root term (repeatable; default: base).")
    p.add_argument("--out", help="Write the .aut file here.")

    p = sub.add_parser("equiv", parents=[common], help="Decide an equivalence on an LTS.")
    p.add_argument("lts", help=".aut file or spec.")
    p.add_argument("--kind", default="rooted-delay")
    p.add_argument("--pairs", help="Two states 'p,q'.")
    p.add_argument("--explain", action="store_true", help="Print a distinguishing formula.")
    p.add_argument("--method", choices=("fixpoint", "saturation"), default="fixpoint")
    p.add_argument("--term", action="append", default=[])

    p = sub.add_parser("sat", parents=[common], help="Model-check a formula at a state.")
    p.add_argument("lts")
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--class", dest="cls", action="append", help="Also test syntactic class membership.")
    p.add_argument("--term", action="append", default=[])

    p = sub.add_parser("decompose", parents=[common], help="Decompose a formula through a term.")
    p.add_argument("spec")
    p.add_argument("--term", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--candidate", "--markings", dest="candidate")
    p.add_argument("--gamma", choices=GAMMA_CHOICES, default="aleph-lambda",
                   help="Arguments kept liquid (default: aleph-lambda, the intersection of aleph and lambda).")
    p.add_argument("--dr", action="store_true", help="Use the delay resistant variant.")
    p.add_argument("--verify", action="store_true", help="Brute-force the theorem over the base processes.")
    p.add_argument("--mutation", choices=MUTATIONS, help=argparse.SUPPRESS)

    p = sub.add_parser("congruence", parents=[common], help="Search for congruence violations.")
    p.add_argument("spec")
    p.add_argument("--kind", default="rooted-delay")
    p.add_argument("--base", action="append", help="Base process (repeatable; default: from the spec).")
    p.add_argument("--multi-hole", action="store_true")

    p = sub.add_parser("suite", parents=[common], help="Run the bundled expected-verdict suite.")
    p.add_argument("--only", action="append", help="Restrict to these specs.")

    return parser


# ============================================================
# MAIN ENTRY
# ============================================================

def main(argv: Optional[List[str]] = None) -> int:
    colorama_init()
    parser = build_arg_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    set_enabled(args.report != "json")

    if args.list_errors:
        for info in list_error_codes_ordered():
            print(f"{info.code}: {info.short}")
        return EXIT_OK

    if args.explain_error:
        code = args.explain_error.strip().upper()
        if get_error_info(code) is None:
            print(f"{c('error')}Unknown error code '{code}'{reset()}")
            return EXIT_INPUT
        print(format_error_for_help(code, dev_mode=args.dev))
        return EXIT_OK

    if args.command is None:
        parser.print_help()
        return EXIT_INPUT

    try:
        bounds = bounds_from(args)
        return COMMANDS[args.command](args, bounds)

    except SoswCLIError as e:
        print(f"{c('error')}Error [{e.code}]: {e.msg}{reset()}", file=sys.stderr)
        if e.code in ("E009", "E010", "E011", "E013"):
            return EXIT_INCONCLUSIVE
        return EXIT_INPUT

    except SoswError as e:
        print(f"{c('error')}Error: {e}{reset()}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
