# src/sosw/dsl.py

"""
The .tss specification language: a line-oriented lark grammar, the builder
that turns parse trees into TSS values, and the printer that turns them
back into text.

    tss bpa
    actions: a b tick
    symbols: +/2 ./2 eps/0 delta/0 a/0 b/0 tau/0
    aleph: +/1 +/2 ./1 ./2
    lambda: ./1
    base: a, tau . a
    rule act [l in a b tau]: |- l -l-> eps
    rule seq1 [l in a b tau]: x1 -l-> y |- x1 . x2 -l-> y . x2
"""

from __future__ import annotations

import itertools
import logging
import re
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Tuple

from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedInput

from .errors import ArityError, DuplicateMarkingError, ParseError, UnknownActionError
from .terms import App, ArgumentMarking, Signature, Term, Var, universal_marking
from .tss import TAU, Literal, MarkingSet, Rule, TSS

log = logging.getLogger(__name__)


GRAMMAR = r"""
spec: _NL* (_statement _NL+)* _statement?

_statement: tss_decl
          | actions_decl
          | symbols_decl
          | candidate_decl
          | marking_decl
          | base_decl
          | rule_decl

tss_decl: "tss" NAME
actions_decl: "actions" ":" NAME*
symbols_decl: "symbols" ":" symbol_decl*
symbol_decl: SYMBOL "/" INT
candidate_decl: "candidate" ":" NAME
marking_decl: MARK_KIND label_index? ":" (arg_ref* | ALL)
label_index: "[" NAME "]"
arg_ref: SYMBOL "/" INT
base_decl: "base" ":" term ("," term)*

rule_decl: "rule" NAME? schema? ":" premises "|-" literal
schema: "[" schema_var (";" schema_var)* "]"
schema_var: NAME "in" NAME+
premises: (literal ("," literal)*)?
literal: term POS_ARROW term   -> positive
       | term NEG_ARROW        -> negative

term_start: term

?term: sum
?sum: product
    | sum "+" product       -> plus
?product: starred
    | product "." starred   -> dot
?starred: atom
    | starred "*" atom      -> star
?atom: NAME "(" term ("," term)* ")" -> apply
    | NAME                  -> name
    | "(" term ")"

MARK_KIND: "aleph" | "lambda" | "delta"
ALL: "all"
POS_ARROW: /-[A-Za-z_][A-Za-z0-9_]*->/
NEG_ARROW: /-[A-Za-z_][A-Za-z0-9_]*!->/
SYMBOL: /[A-Za-z_][A-Za-z0-9_]*|[+.*]/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
INT: /[0-9]+/
COMMENT: /#[^\n]*/
_NL: /\r?\n/

%ignore /[ \t\f]+/
%ignore COMMENT
"""

NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
DEFAULT_CANDIDATE = "default"


@lru_cache(maxsize=None)
def _parser(start: str) -> Lark:
    return Lark(GRAMMAR, start=start, propagate_positions=True)


def _parse_tree(text: str, start: str) -> Tree:
    try:
        return _parser(start).parse(text)
    except UnexpectedInput as e:
        first = str(e).strip().splitlines()[0] if str(e).strip() else "Unexpected input"
        line = e.line if getattr(e, "line", -1) and e.line > 0 else None
        column = e.column if getattr(e, "column", -1) and e.column > 0 else None
        raise ParseError(first, line, column) from None


# ============================================================
# Tree -> terms
# ============================================================

_INFIX_NODES = {"plus": "+", "dot": ".", "star": "*"}


def _where(node: Tree) -> str:
    meta = getattr(node, "meta", None)
    if meta is not None and not getattr(meta, "empty", True):
        return f"line {meta.line}: "
    return ""


def _build_term(node, signature: Signature, binding: Mapping[str, str]) -> Term:
    if isinstance(node, Tree) and node.data in _INFIX_NODES:
        symbol = _INFIX_NODES[node.data]
        left, right = node.children
        t = App(symbol, (_build_term(left, signature, binding), _build_term(right, signature, binding)))
    elif isinstance(node, Tree) and node.data == "apply":
        head = str(node.children[0])
        args = tuple(_build_term(c, signature, binding) for c in node.children[1:])
        t = App(head, args)
    elif isinstance(node, Tree) and node.data == "name":
        ident = str(node.children[0])
        if ident in binding:
            t = App(binding[ident], ())
        elif signature.arity(ident) is None:
            return Var(ident)
        else:
            t = App(ident, ())
    else:
        raise ParseError(f"Unexpected node {node!r}")
    try:
        signature.check(t)
    except ArityError as e:
        where = _where(node) if isinstance(node, Tree) else ""
        raise ArityError(f"{where}{e.msg}", e.symbol) from None
    return t


def parse_term(text: str, signature: Signature) -> Term:
    tree = _parse_tree(text, "term_start")
    return _build_term(tree.children[0], signature, {})


# ============================================================
# Tree -> TSS
# ============================================================

def _arrow_label(token: Token) -> str:
    text = str(token)
    if text.endswith("!->"):
        return text[1:-3]
    return text[1:-2]


def _build_literal(node: Tree, signature: Signature, binding: Mapping[str, str], labels) -> Literal:
    if node.data == "positive":
        lhs, arrow, rhs = node.children
        label = _arrow_label(arrow)
        label = binding.get(label, label)
        lit = Literal(_build_term(lhs, signature, binding), label, _build_term(rhs, signature, binding))
    else:
        lhs, arrow = node.children
        label = _arrow_label(arrow)
        label = binding.get(label, label)
        lit = Literal(_build_term(lhs, signature, binding), label, None)
    if label not in labels:
        raise UnknownActionError(label)
    return lit


def _schema_bindings(schema: Optional[Tree], labels) -> List[Dict[str, str]]:
    if schema is None:
        return [{}]
    names: List[str] = []
    ranges: List[List[str]] = []
    for var in schema.children:
        head, *values = [str(tok) for tok in var.children]
        for v in values:
            if v not in labels:
                raise UnknownActionError(v)
        names.append(head)
        ranges.append(values)
    return [dict(zip(names, combo)) for combo in itertools.product(*ranges)]


def _build_rules(node: Tree, signature: Signature, labels) -> List[Rule]:
    name = ""
    schema: Optional[Tree] = None
    premises_node: Optional[Tree] = None
    conclusion_node: Optional[Tree] = None
    for child in node.children:
        if isinstance(child, Token):
            name = str(child)
        elif child.data == "schema":
            schema = child
        elif child.data == "premises":
            premises_node = child
        else:
            conclusion_node = child
    assert premises_node is not None and conclusion_node is not None

    rules = []
    bindings = _schema_bindings(schema, labels)
    for binding in bindings:
        prems = tuple(_build_literal(p, signature, binding, labels) for p in premises_node.children)
        concl = _build_literal(conclusion_node, signature, binding, labels)
        suffix = "_".join(binding[k] for k in binding)
        rule_name = f"{name}_{suffix}" if name and suffix else name
        rules.append(Rule(prems, concl, rule_name))
    return rules


def _marking_entries(node: Tree) -> Tuple[str, Optional[str], Optional[List[Tuple[str, int]]]]:
    kind = ""
    label: Optional[str] = None
    entries: Optional[List[Tuple[str, int]]] = []
    for child in node.children:
        if isinstance(child, Token) and child.type == "MARK_KIND":
            kind = str(child)
        elif isinstance(child, Token) and child.type == "ALL":
            entries = None
        elif child.data == "label_index":
            label = str(child.children[0])
        elif child.data == "arg_ref":
            sym, idx = child.children
            assert entries is not None
            entries.append((str(sym), int(idx)))
    return kind, label, entries


def parse_spec(text: str) -> TSS:
    tree = _parse_tree(text, "spec")
    statements = tree.children

    name = "unnamed"
    actions: List[str] = []
    symbols: List[Tuple[str, int]] = []
    for st in statements:
        if st.data == "tss_decl":
            name = str(st.children[0])
        elif st.data == "actions_decl":
            actions.extend(str(tok) for tok in st.children if str(tok) != TAU)
        elif st.data == "symbols_decl":
            for decl in st.children:
                sym, ar = decl.children
                symbols.append((str(sym), int(ar)))

    signature = Signature.of(symbols)
    actions = list(dict.fromkeys(actions))
    labels = tuple(actions) + (TAU,)

    groups: Dict[str, Dict[str, ArgumentMarking]] = {}
    current = DEFAULT_CANDIDATE
    rules: List[Rule] = []
    base: List[Term] = []
    for st in statements:
        if st.data == "candidate_decl":
            current = str(st.children[0])
            groups.setdefault(current, {})
        elif st.data == "marking_decl":
            kind, label, entries = _marking_entries(st)
            key = kind if label is None else f"delta[{label}]"
            if kind == "delta" and label is None:
                raise ParseError("delta markings need a label, e.g. delta[a]:", st.meta.line)
            if kind != "delta" and label is not None:
                raise ParseError(f"{kind} markings take no label", st.meta.line)
            if label is not None and label not in labels:
                raise UnknownActionError(label)
            group = groups.setdefault(current, {})
            if key in group:
                raise DuplicateMarkingError(key, current)
            if entries is None:
                marking = universal_marking(signature, key)
            else:
                marking = ArgumentMarking(key, frozenset(entries))
            marking.validate(signature)
            group[key] = marking
        elif st.data == "base_decl":
            base.extend(_build_term(t, signature, {}) for t in st.children)
        elif st.data == "rule_decl":
            rules.extend(_build_rules(st, signature, labels))

    markings = tuple((cand, _marking_set(group)) for cand, group in groups.items())
    P = TSS(name, signature, tuple(actions), tuple(rules), markings, tuple(base))
    P.validate()
    log.debug("parsed spec %s: %d rules, %d candidates", name, len(rules), len(markings))
    return P


def _marking_set(group: Mapping[str, ArgumentMarking]) -> MarkingSet:
    delta = tuple(
        (key[len("delta["):-1], m) for key, m in sorted(group.items()) if key.startswith("delta[")
    )
    return MarkingSet(
        aleph=group.get("aleph", ArgumentMarking("aleph")),
        lam=group.get("lambda", ArgumentMarking("lambda")),
        delta=delta,
    )


# ============================================================
# Printer
# ============================================================

def _refs(m: ArgumentMarking) -> str:
    return " ".join(f"{f}/{i}" for f, i in sorted(m.liquid))


def print_spec(P: TSS) -> str:
    lines = [f"tss {P.name}"]
    lines.append("actions: " + " ".join(P.actions))
    lines.append("symbols: " + " ".join(f"{n}/{ar}" for n, ar in P.signature.symbols))
    for cand, ms in P.markings:
        lines.append(f"candidate: {cand}")
        lines.append(f"aleph: {_refs(ms.aleph)}".rstrip())
        lines.append(f"lambda: {_refs(ms.lam)}".rstrip())
        for label, m in ms.delta:
            lines.append(f"delta[{label}]: {_refs(m)}".rstrip())
    if P.base:
        lines.append("base: " + ", ".join(str(t) for t in P.base))
    for r in P.rules:
        head = f"rule {r.name}:" if r.name and NAME_RE.match(r.name) else "rule:"
        lines.append(f"{head} {r}")
    return "\n".join(lines) + "\n"
