# src/sosw/modal.py

"""
Modal formulas with the <eps> operator.

    T                 empty conjunction
    ~phi              negation
    /\\[phi, psi]      finite conjunction
    <a>phi            a-step (a may be tau)
    <eps>phi          zero or more tau-steps

Classes: O (everything), O_d / O_rd (delay, rooted delay) and O_w / O_rw
(weak, rooted weak). distinguishing_formula builds witnesses that stay
inside the requested class.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from .equivalence import (
    DELAY,
    STRONG,
    WEAK,
    EquivalenceKind,
    bisimilarity,
    deletion_levels,
    rooted_moves,
    rooted_related,
)
from .errors import BoundExceeded, ParseError, SoswCLIError
from .semantics import LTS, State
from .tss import TAU

log = logging.getLogger(__name__)


# ============================================================
# Formulas
# ============================================================

@dataclass(frozen=True)
class Conj:
    parts: Tuple["Formula", ...] = ()

    def __str__(self) -> str:
        if not self.parts:
            return "T"
        return "/\\[" + ", ".join(str(p) for p in self.parts) + "]"


@dataclass(frozen=True)
class Neg:
    body: "Formula"

    def __str__(self) -> str:
        return f"~{self.body}"


@dataclass(frozen=True)
class Diamond:
    action: str
    body: "Formula"

    def __str__(self) -> str:
        return f"<{self.action}>{self.body}"


@dataclass(frozen=True)
class Eps:
    body: "Formula"

    def __str__(self) -> str:
        return f"<eps>{self.body}"


Formula = Union[Conj, Neg, Diamond, Eps]
TOP = Conj(())


def conj(parts: Iterable[Formula]) -> Formula:
    """A conjunction, collapsed when it has exactly one part."""
    parts = tuple(dict.fromkeys(parts))
    return parts[0] if len(parts) == 1 else Conj(parts)


def size(phi: Formula) -> int:
    if isinstance(phi, Conj):
        return 1 + sum(size(p) for p in phi.parts)
    return 1 + size(phi.body)


def actions_of(phi: Formula) -> FrozenSet[str]:
    if isinstance(phi, Conj):
        return frozenset().union(*(actions_of(p) for p in phi.parts))
    if isinstance(phi, Diamond):
        return actions_of(phi.body) | {phi.action}
    return actions_of(phi.body)


# ============================================================
# Parser
# ============================================================

FORMULA_GRAMMAR = r"""
?formula: "T"                                  -> top
        | "~" formula                          -> neg
        | "/\\" "[" [formula ("," formula)*] "]" -> conj
        | "<" NAME ">" formula                 -> diamond
        | "(" formula ")"

NAME: /[A-Za-z_][A-Za-z0-9_]*/

%ignore /[ \t\f\r\n]+/
"""


@v_args(inline=True)
class _ToFormula(Transformer):
    def top(self):
        return TOP

    def neg(self, body):
        return Neg(body)

    def conj(self, *parts):
        return Conj(tuple(p for p in parts if p is not None))

    def diamond(self, name, body):
        name = str(name)
        if name == "eps":
            return Eps(body)
        return Diamond(name, body)


@lru_cache(maxsize=None)
def _formula_parser() -> Lark:
    return Lark(FORMULA_GRAMMAR, start="formula", parser="lalr", transformer=_ToFormula())


def parse_formula(text: str, tau_label: Optional[str] = None) -> Formula:
    """Parse the text syntax; `tau_label` is read as an alias of tau."""
    try:
        phi = _formula_parser().parse(text)
    except UnexpectedInput as e:
        first = str(e).strip().splitlines()[0] if str(e).strip() else "Unexpected input"
        line = e.line if getattr(e, "line", -1) and e.line > 0 else None
        column = e.column if getattr(e, "column", -1) and e.column > 0 else None
        raise ParseError(first, line, column) from None
    except VisitError as e:
        raise ParseError(str(e.orig_exc)) from None
    if tau_label is not None and tau_label != TAU:
        phi = rename_action(phi, tau_label, TAU)
    return phi


def rename_action(phi: Formula, old: str, new: str) -> Formula:
    if isinstance(phi, Conj):
        return Conj(tuple(rename_action(p, old, new) for p in phi.parts))
    if isinstance(phi, Neg):
        return Neg(rename_action(phi.body, old, new))
    if isinstance(phi, Eps):
        return Eps(rename_action(phi.body, old, new))
    return Diamond(new if phi.action == old else phi.action, rename_action(phi.body, old, new))


# ============================================================
# Satisfaction
# ============================================================

def extension(L: LTS, phi: Formula, memo: Optional[Dict[Formula, FrozenSet[State]]] = None) -> FrozenSet[State]:
    """All states of L satisfying phi."""
    if memo is None:
        memo = {}
    if phi in memo:
        return memo[phi]
    if isinstance(phi, Conj):
        out = frozenset(L.states)
        for p in phi.parts:
            out &= extension(L, p, memo)
    elif isinstance(phi, Neg):
        out = frozenset(L.states) - extension(L, phi.body, memo)
    elif isinstance(phi, Diamond):
        inner = extension(L, phi.body, memo)
        out = frozenset(s for s in L.states if L.post(s, phi.action) & inner)
    else:
        inner = extension(L, phi.body, memo)
        out = frozenset(s for s in L.states if L.eps_closure[s] & inner)
    memo[phi] = out
    return out


def satisfies(L: LTS, p: State, phi: Formula) -> bool:
    if p not in L:
        raise SoswCLIError("E015", f"State '{p}' is not in the LTS")
    return p in extension(L, phi)


# ============================================================
# Classes
# ============================================================

O = "O"
O_D = "O_d"
O_RD = "O_rd"
O_W = "O_w"
O_RW = "O_rw"
CLASSES = (O, O_D, O_RD, O_W, O_RW)

CLASS_KINDS = {
    O: EquivalenceKind(STRONG),
    O_D: EquivalenceKind(DELAY),
    O_RD: EquivalenceKind(DELAY, rooted=True),
    O_W: EquivalenceKind(WEAK),
    O_RW: EquivalenceKind(WEAK, rooted=True),
}


def flatten(phi: Formula) -> Formula:
    """Merge nested conjunctions; nothing else changes."""
    if isinstance(phi, Conj):
        parts: List[Formula] = []
        for p in phi.parts:
            q = flatten(p)
            if isinstance(q, Conj):
                parts.extend(q.parts)
            else:
                parts.append(q)
        return Conj(tuple(parts))
    if isinstance(phi, Neg):
        return Neg(flatten(phi.body))
    if isinstance(phi, Eps):
        return Eps(flatten(phi.body))
    return Diamond(phi.action, flatten(phi.body))


def _in_d(phi: Formula) -> bool:
    if isinstance(phi, Conj):
        return all(_in_d(p) for p in phi.parts)
    if isinstance(phi, Neg):
        return _in_d(phi.body)
    if isinstance(phi, Eps):
        b = phi.body
        if isinstance(b, Diamond) and b.action != TAU and _in_d(b.body):
            return True
        return _in_d(b)
    return False


def _in_rd(phi: Formula) -> bool:
    if _in_d(phi):
        return True
    if isinstance(phi, Conj):
        return all(_in_rd(p) for p in phi.parts)
    if isinstance(phi, Neg):
        return _in_rd(phi.body)
    if isinstance(phi, Eps) and isinstance(phi.body, Diamond):
        return _in_d(phi.body.body)
    return False


def _in_w(phi: Formula) -> bool:
    if isinstance(phi, Conj):
        return all(_in_w(p) for p in phi.parts)
    if isinstance(phi, Neg):
        return _in_w(phi.body)
    if isinstance(phi, Eps):
        b = phi.body
        if isinstance(b, Diamond) and b.action != TAU and isinstance(b.body, Eps) and _in_w(b.body.body):
            return True
        return _in_w(b)
    return False


def _in_rw(phi: Formula) -> bool:
    if _in_w(phi):
        return True
    if isinstance(phi, Conj):
        return all(_in_rw(p) for p in phi.parts)
    if isinstance(phi, Neg):
        return _in_rw(phi.body)
    if isinstance(phi, Eps) and isinstance(phi.body, Diamond) and isinstance(phi.body.body, Eps):
        return _in_w(phi.body.body.body)
    return False


_MEMBERSHIP = {
    O: lambda phi: True,
    O_D: _in_d,
    O_RD: _in_rd,
    O_W: _in_w,
    O_RW: _in_rw,
}


def parse_class(name: str) -> str:
    for c in CLASSES:
        if c.lower() == name.strip().lower():
            return c
    raise SoswCLIError("E014", f"Unknown formula class '{name}'; known: {', '.join(CLASSES)}")


def in_class(phi: Formula, c: str) -> bool:
    """Syntactic membership, after flattening nested conjunctions."""
    return _MEMBERSHIP[parse_class(c)](flatten(phi))


# ============================================================
# Normalisation
# ============================================================

def _step(phi: Formula) -> Formula:
    if isinstance(phi, Conj):
        parts: List[Formula] = []
        for p in phi.parts:
            q = _step(p)
            if isinstance(q, Conj):
                parts.extend(q.parts)
            elif q != TOP:
                parts.append(q)
        parts = list(dict.fromkeys(parts))
        if len(parts) == 1:
            return parts[0]
        return Conj(tuple(parts))
    if isinstance(phi, Neg):
        if isinstance(phi.body, Neg):
            return _step(phi.body.body)
        return Neg(_step(phi.body))
    if isinstance(phi, Eps):
        if isinstance(phi.body, Eps):
            return _step(phi.body)
        return Eps(_step(phi.body))
    return Diamond(phi.action, _step(phi.body))


def normalize(phi: Formula) -> Formula:
    """
    Apply <eps><eps>phi -> <eps>phi, ~~phi -> phi, conjunction
    flattening, removal of T conjuncts and duplicates, and /\\[phi] -> phi
    until nothing changes.
    """
    while True:
        nxt = _step(phi)
        if nxt == phi:
            return phi
        phi = nxt


# ============================================================
# Distinguishing formulas
# ============================================================

class _Witnesses:
    """
    Formulas for unrelated pairs of an unrooted equivalence, built from the
    round in which pair deletion removed them: a move of one side that the
    other cannot answer against the previous round's relation.
    """

    def __init__(self, L: LTS, base: str):
        self.L = L
        self.base = base
        self.levels = deletion_levels(L, base)
        self.memo: Dict[Tuple[State, State], Formula] = {}
        self.limit = max(len(L.states) ** 2, 1)

    def related_before(self, p: State, q: State, level: int) -> bool:
        k = self.levels.get((p, q))
        return k is None or k >= level

    def answers(self, q: State, label: str) -> FrozenSet[State]:
        if self.base == STRONG:
            return self.L.post(q, label)
        if label == TAU:
            return self.L.eps_closure[q]
        if self.base == DELAY:
            return self.L.eps_then(q, label)
        return self.L.weak_post(q, label)

    def wrap(self, label: str, psi: Formula) -> Formula:
        if self.base == STRONG:
            return Diamond(label, psi)
        if label == TAU:
            return Eps(psi)
        if self.base == DELAY:
            return Eps(Diamond(label, psi))
        return Eps(Diamond(label, Eps(psi)))

    def _from_move(self, s: State, t: State, level: int) -> Optional[Formula]:
        for label, s2 in self.L.successors[s]:
            targets = self.answers(t, label)
            if any(self.related_before(s2, t2, level) for t2 in targets):
                continue
            psi = conj(self.formula(s2, t2) for t2 in sorted(targets, key=str))
            return self.wrap(label, psi)
        return None

    def formula(self, p: State, q: State) -> Formula:
        """phi with p |= phi and q |/= phi."""
        key = (p, q)
        if key in self.memo:
            return self.memo[key]
        level = self.levels.get(key)
        assert level is not None, f"{p} and {q} are related"
        if level > self.limit:
            raise BoundExceeded("distinguishing formula depth", self.limit)
        phi = self._from_move(p, q, level)
        if phi is None:
            back = self._from_move(q, p, level)
            assert back is not None, f"no unanswered move for deleted pair ({p}, {q})"
            phi = Neg(back)
        self.memo[key] = phi
        return phi


def _rooted_witness(L: LTS, p: State, q: State, base: str, unrooted: _Witnesses) -> Optional[Formula]:
    partition = bisimilarity(L, EquivalenceKind(base))

    def from_move(s: State, t: State) -> Optional[Formula]:
        for label, s2 in L.successors[s]:
            targets = rooted_moves(L, t, label, base)
            if any(partition.same(s2, t2) for t2 in targets):
                continue
            psi = conj(unrooted.formula(s2, t2) for t2 in sorted(targets, key=str))
            if base == DELAY:
                return Eps(Diamond(label, psi))
            return Eps(Diamond(label, Eps(psi)))
        return None

    phi = from_move(p, q)
    if phi is not None:
        return phi
    back = from_move(q, p)
    return None if back is None else Neg(back)


def distinguishing_formula(L: LTS, p: State, q: State, c: str) -> Optional[Formula]:
    """
    A formula of class c that p satisfies and q does not, or None when p
    and q are equivalent under the equivalence c characterises.
    """
    c = parse_class(c)
    for s in (p, q):
        if s not in L:
            raise SoswCLIError("E015", f"State '{s}' is not in the LTS")
    if p == q:
        return None
    kind = CLASS_KINDS[c]
    witnesses = _Witnesses(L, kind.base)
    if kind.rooted:
        if rooted_related(L, p, q, kind):
            return None
        phi = _rooted_witness(L, p, q, kind.base, witnesses)
    else:
        if (p, q) not in witnesses.levels:
            return None
        phi = witnesses.formula(p, q)
    assert phi is not None
    log.debug("distinguishing %s from %s in %s: %s", p, q, c, phi)
    return phi
