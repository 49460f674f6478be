# src/sosw/semantics.py

"""
Ground semantics of a TSS over a finite closed-term universe.

Provides:
  - LTS: finite labelled transition system (states are Terms, ints or strings).
  - ground_model(P, universe): the three-valued well-founded model of the
    ground instantiation of P, computed by the alternating fixpoint.
  - generate_lts(P, roots, depth_bound): grow the universe breadth first
    until the reachable part is closed, then keep the proved transitions.
  - read_aut / write_aut: the Aldebaran .aut text format.

A literal is "undefined" when the alternating fixpoint leaves it open; that
is how incompleteness of a TSS shows up on a finite universe.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Optional,
    Set,
    Tuple,
)

from .errors import IncompleteTSS, ParseError, UniverseEscape
from .settings import DEFAULT_BOUNDS, Bounds
from .terms import App, Term, Var, apply, const, depth, is_closed, match, render_term, size, variables
from .tss import TAU, Literal, Rule, TSS

log = logging.getLogger(__name__)

State = Hashable
Transition = Tuple[State, str, State]


def state_key(s: State) -> Tuple:
    """Total order over mixed state values: ints, then strings, then terms."""
    if isinstance(s, int):
        return (0, s, "")
    if isinstance(s, str):
        return (1, 0, s)
    if isinstance(s, (Var, App)):
        return (2, size(s), render_term(s))
    if isinstance(s, tuple):
        return (3, len(s), tuple(state_key(x) for x in s))
    return (4, 0, repr(s))


def render_state(s: State) -> str:
    if isinstance(s, (Var, App)):
        return render_term(s)
    return str(s)


# ============================================================
# LTS
# ============================================================

@dataclass(frozen=True)
class LTS:
    states: Tuple[State, ...]
    transitions: FrozenSet[Transition]
    initial: Optional[State] = None
    alphabet: FrozenSet[str] = frozenset({TAU})
    partial: bool = False

    def __post_init__(self):
        known = set(self.states)
        for s, a, t in self.transitions:
            known.add(s)
            known.add(t)
        if self.initial is not None:
            known.add(self.initial)
        labels = frozenset(a for _, a, _ in self.transitions) | self.alphabet | {TAU}
        object.__setattr__(self, "states", tuple(sorted(known, key=state_key)))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "alphabet", labels)

    @property
    def actions(self) -> Tuple[str, ...]:
        """Visible labels, sorted."""
        return tuple(sorted(self.alphabet - {TAU}))

    def __contains__(self, s: object) -> bool:
        return s in self._state_set

    @cached_property
    def _state_set(self) -> FrozenSet[State]:
        return frozenset(self.states)

    @cached_property
    def successors(self) -> Dict[State, Tuple[Tuple[str, State], ...]]:
        out: Dict[State, List[Tuple[str, State]]] = {s: [] for s in self.states}
        for s, a, t in sorted(self.transitions, key=lambda tr: (state_key(tr[0]), tr[1], state_key(tr[2]))):
            out[s].append((a, t))
        return {s: tuple(v) for s, v in out.items()}

    def post(self, s: State, label: str) -> FrozenSet[State]:
        return frozenset(t for a, t in self.successors.get(s, ()) if a == label)

    def enabled(self, s: State) -> FrozenSet[str]:
        return frozenset(a for a, _ in self.successors.get(s, ()))

    @cached_property
    def eps_closure(self) -> Dict[State, FrozenSet[State]]:
        """s => every state reachable by zero or more tau steps."""
        out: Dict[State, FrozenSet[State]] = {}
        for s in self.states:
            seen = {s}
            todo = [s]
            while todo:
                p = todo.pop()
                for a, q in self.successors[p]:
                    if a == TAU and q not in seen:
                        seen.add(q)
                        todo.append(q)
            out[s] = frozenset(seen)
        return out

    def eps_then(self, s: State, label: str) -> FrozenSet[State]:
        """States q with s =eps=> -label-> q."""
        out: Set[State] = set()
        for p in self.eps_closure[s]:
            out |= self.post(p, label)
        return frozenset(out)

    def weak_post(self, s: State, label: str) -> FrozenSet[State]:
        """s =eps=> -label-> =eps=> q; for tau the middle step may be empty."""
        if label == TAU:
            return self.eps_closure[s]
        out: Set[State] = set()
        for q in self.eps_then(s, label):
            out |= self.eps_closure[q]
        return frozenset(out)

    def reachable(self, roots: Iterable[State]) -> FrozenSet[State]:
        seen: Set[State] = set()
        todo = deque(r for r in roots if r in self)
        seen.update(todo)
        while todo:
            p = todo.popleft()
            for _, q in self.successors[p]:
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def restrict(self, roots: Iterable[State]) -> "LTS":
        roots = list(roots)
        keep = self.reachable(roots)
        trans = frozenset(tr for tr in self.transitions if tr[0] in keep)
        initial = self.initial if self.initial in keep else (roots[0] if roots else None)
        return LTS(tuple(keep), trans, initial, self.alphabet, self.partial)

    def disjoint_union(self, other: "LTS") -> Tuple["LTS", Dict[State, int], Dict[State, int]]:
        """Renumber both systems into one; returns the union and both state maps."""
        left = {s: n for n, s in enumerate(self.states)}
        right = {s: n + len(left) for n, s in enumerate(other.states)}
        trans = {(left[s], a, left[t]) for s, a, t in self.transitions}
        trans |= {(right[s], a, right[t]) for s, a, t in other.transitions}
        initial = left.get(self.initial) if self.initial is not None else None
        union = LTS(
            tuple(left.values()) + tuple(right.values()),
            frozenset(trans),
            initial,
            self.alphabet | other.alphabet,
            self.partial or other.partial,
        )
        return union, left, right

    def to_dict(self) -> Dict[str, object]:
        return {
            "states": [render_state(s) for s in self.states],
            "initial": None if self.initial is None else render_state(self.initial),
            "transitions": [
                [render_state(s), a, render_state(t)]
                for s, a, t in sorted(self.transitions, key=lambda tr: (state_key(tr[0]), tr[1], state_key(tr[2])))
            ],
            "partial": self.partial,
        }


# ============================================================
# Ground model
# ============================================================

PROVED = "proved"
REFUTED = "refuted"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class GroundVerdict:
    literal: Literal
    status: str

    def __str__(self) -> str:
        return f"{self.literal}: {self.status}"


Facts = Dict[Tuple[Term, str], FrozenSet[Term]]


def _index(transitions: Iterable[Tuple[Term, str, Term]]) -> Facts:
    out: Dict[Tuple[Term, str], Set[Term]] = {}
    for s, a, t in transitions:
        out.setdefault((s, a), set()).add(t)
    return {k: frozenset(v) for k, v in out.items()}


@dataclass(frozen=True)
class GroundModel:
    universe: Tuple[Term, ...]
    proved: FrozenSet[Tuple[Term, str, Term]]
    possible: FrozenSet[Tuple[Term, str, Term]]
    escapes: FrozenSet[Term] = frozenset()

    @property
    def undefined(self) -> FrozenSet[Tuple[Term, str, Term]]:
        return self.possible - self.proved

    @property
    def complete(self) -> bool:
        return not self.undefined

    @cached_property
    def _proved_index(self) -> Facts:
        return _index(self.proved)

    @cached_property
    def _possible_index(self) -> Facts:
        return _index(self.possible)

    def verdict(self, literal: Literal) -> GroundVerdict:
        lhs = literal.lhs
        if literal.positive:
            tr = (lhs, literal.label, literal.rhs)
            if tr in self.proved:
                return GroundVerdict(literal, PROVED)
            if tr in self.possible:
                return GroundVerdict(literal, UNDEFINED)
            return GroundVerdict(literal, REFUTED)
        key = (lhs, literal.label)
        if self._proved_index.get(key):
            return GroundVerdict(literal, REFUTED)
        if self._possible_index.get(key):
            return GroundVerdict(literal, UNDEFINED)
        return GroundVerdict(literal, PROVED)

    @cached_property
    def verdicts(self) -> Dict[Literal, GroundVerdict]:
        """Every positive literal that is not refuted; all others are refuted."""
        out = {}
        for s, a, t in sorted(self.possible, key=lambda tr: (state_key(tr[0]), tr[1], state_key(tr[2]))):
            lit = Literal(s, a, t)
            out[lit] = GroundVerdict(lit, PROVED if (s, a, t) in self.proved else UNDEFINED)
        return out

    def targets(self, s: Term, label: str) -> FrozenSet[Term]:
        return self._proved_index.get((s, label), frozenset())


def _subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _subterms(a)


def _heads(P: TSS) -> Dict[Optional[str], List[Rule]]:
    out: Dict[Optional[str], List[Rule]] = {}
    for r in P.rules:
        if not r.standard:
            continue
        head = r.source.symbol if isinstance(r.source, App) else None
        out.setdefault(head, []).append(r)
    return out


def _close_universe(P: TSS, terms: Iterable[Term], max_depth: int) -> Tuple[Tuple[Term, ...], FrozenSet[Term]]:
    """
    Close under subterms and under premise left-hand sides that depend on
    source variables only. Terms deeper than max_depth are not added and
    come back as escapes.
    """
    heads = _heads(P)
    known: Set[Term] = set()
    escapes: Set[Term] = set()
    todo = deque()
    for t in terms:
        for s in _subterms(t):
            if s not in known:
                known.add(s)
                todo.append(s)
    while todo:
        s = todo.popleft()
        head = s.symbol if isinstance(s, App) else None
        for r in heads.get(head, []) + heads.get(None, []):
            sigma = match(r.source, s)
            if sigma is None:
                continue
            bound = set(sigma)
            for p in r.premises:
                if not variables(p.lhs) <= bound:
                    continue
                w = apply(sigma, p.lhs)
                for sub in _subterms(w):
                    if sub in known:
                        continue
                    if depth(sub) > max_depth:
                        escapes.add(sub)
                        continue
                    known.add(sub)
                    todo.append(sub)
    return tuple(sorted(known, key=state_key)), frozenset(escapes)


class _Instantiator:
    """Ground instances of the standard rules of P over a fixed universe."""

    def __init__(self, P: TSS, universe: Tuple[Term, ...]):
        self.universe = universe
        self.members = frozenset(universe)
        self.heads = _heads(P)
        self.escapes: Set[Term] = set()

    def _rules_for(self, s: Term) -> List[Rule]:
        head = s.symbol if isinstance(s, App) else None
        return self.heads.get(head, []) + self.heads.get(None, [])

    def _solve(
        self,
        premises: Tuple[Literal, ...],
        sigma: Dict[str, Term],
        facts: Facts,
        negative_holds: Callable[[Term, str], bool],
    ) -> Iterator[Dict[str, Term]]:
        if not premises:
            yield sigma
            return
        pick = None
        for i, p in enumerate(premises):
            if is_closed(apply(sigma, p.lhs)):
                pick = i
                break
        if pick is None:
            # Unbound premise variable: range it over the universe.
            name = sorted(variables(apply(sigma, premises[0].lhs)))[0]
            for u in self.universe:
                yield from self._solve(premises, {**sigma, name: u}, facts, negative_holds)
            return
        p = premises[pick]
        rest = premises[:pick] + premises[pick + 1:]
        w = apply(sigma, p.lhs)
        if w not in self.members:
            self.escapes.add(w)
            return
        if p.positive:
            for q in facts.get((w, p.label), ()):
                extended = match(p.rhs, q, sigma)
                if extended is not None:
                    yield from self._solve(rest, extended, facts, negative_holds)
        elif negative_holds(w, p.label):
            yield from self._solve(rest, sigma, facts, negative_holds)

    def _targets(self, r: Rule, sigma: Dict[str, Term]) -> Iterator[Term]:
        open_names = sorted(variables(apply(sigma, r.target)))
        if not open_names:
            yield apply(sigma, r.target)
            return
        name = open_names[0]
        for u in self.universe:
            yield from self._targets(r, {**sigma, name: u})

    def gamma(self, assumed: FrozenSet[Tuple[Term, str, Term]]) -> FrozenSet[Tuple[Term, str, Term]]:
        """Least model with negative premises read against `assumed`."""
        assumed_index = _index(assumed)

        def negative_holds(w: Term, label: str) -> bool:
            return not assumed_index.get((w, label))

        derived: Set[Tuple[Term, str, Term]] = set()
        facts: Facts = {}
        changed = True
        while changed:
            changed = False
            for s in self.universe:
                for r in self._rules_for(s):
                    sigma = match(r.source, s)
                    if sigma is None:
                        continue
                    for solved in self._solve(r.premises, sigma, facts, negative_holds):
                        for t in self._targets(r, solved):
                            tr = (s, r.label, t)
                            if tr not in derived:
                                derived.add(tr)
                                changed = True
            if changed:
                facts = _index(derived)
        return frozenset(derived)


def _is_positive(P: TSS) -> bool:
    return all(not r.negative_premises for r in P.rules if r.standard)


def _alternating_fixpoint(P: TSS, universe: Tuple[Term, ...]) -> Tuple[FrozenSet, FrozenSet, FrozenSet[Term]]:
    inst = _Instantiator(P, universe)
    if _is_positive(P):
        facts = inst.gamma(frozenset())
        return facts, facts, frozenset(inst.escapes)
    under: FrozenSet = frozenset()
    rounds = 0
    while True:
        rounds += 1
        over = inst.gamma(under)
        nxt = inst.gamma(over)
        if nxt == under:
            break
        under = nxt
    log.debug("alternating fixpoint for %s: %d rounds, %d/%d facts", P.name, rounds, len(under), len(over))
    return under, over, frozenset(inst.escapes)


def ground_model(
    P: TSS,
    universe: Iterable[Term],
    strict: bool = True,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> GroundModel:
    """
    Well-founded model of P instantiated over `universe`.

    The universe is first closed under subterms and premise dependencies
    and extended with every constant of the signature.
    With strict=True any term the rules need but the universe lacks (a
    transition target or a premise left-hand side) raises UniverseEscape;
    otherwise those terms are collected in GroundModel.escapes.
    """
    terms = list(universe)
    for t in terms:
        if not is_closed(t):
            raise UniverseEscape([t])
    max_depth = max((depth(t) for t in terms), default=0) + bounds.universe_depth
    seeds = terms + [const(c) for c in P.signature.constants()]
    closed, deep = _close_universe(P, seeds, max_depth)
    proved, possible, lhs_escapes = _alternating_fixpoint(P, closed)
    members = frozenset(closed)
    target_escapes = {t for _, _, t in possible if t not in members}
    escapes = frozenset(target_escapes | set(lhs_escapes) | set(deep))
    if strict and escapes:
        raise UniverseEscape(sorted(escapes, key=state_key))
    return GroundModel(closed, proved, possible, escapes)


def generate_lts(
    P: TSS,
    roots: Iterable[Term],
    depth_bound: Optional[int] = None,
    strict: bool = False,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> LTS:
    """
    The LTS reachable from `roots`, growing the universe by one round of
    transition targets at a time. After depth_bound rounds with new states
    still appearing the result is flagged partial (UniverseEscape when
    strict).
    """
    roots = list(dict.fromkeys(roots))
    for t in roots:
        if not is_closed(t):
            raise UniverseEscape([t])
    if depth_bound is None:
        depth_bound = bounds.universe_depth
    universe: Set[Term] = set(roots)
    partial = False
    round_no = 0
    while True:
        model = ground_model(P, universe, strict=False, bounds=bounds)
        members = frozenset(model.universe)
        reach = _reachable(roots, model)
        missing = {t for t in reach if t not in members} | set(model.escapes)
        if not missing:
            break
        if round_no >= depth_bound:
            if strict:
                raise UniverseEscape(sorted(missing, key=state_key))
            log.info("universe still growing after %d rounds; LTS is partial", round_no)
            partial = True
            break
        universe |= missing
        round_no += 1
        log.debug("generate_lts round %d: +%d terms", round_no, len(missing))

    for s, a, t in sorted(model.undefined, key=lambda tr: (state_key(tr[0]), tr[1], state_key(tr[2]))):
        if s in reach:
            raise IncompleteTSS(Literal(s, a, t))
    trans = frozenset(tr for tr in model.proved if tr[0] in reach)
    return LTS(
        tuple(reach),
        trans,
        roots[0] if roots else None,
        frozenset(P.labels),
        partial,
    )


def _reachable(roots: Iterable[Term], model: GroundModel) -> FrozenSet[Term]:
    by_source: Dict[Term, List[Term]] = {}
    for s, _, t in model.possible:
        by_source.setdefault(s, []).append(t)
    seen = set(roots)
    todo = deque(seen)
    while todo:
        p = todo.popleft()
        for q in by_source.get(p, ()):
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return frozenset(seen)


# ============================================================
# Aldebaran .aut
# ============================================================

_HEADER_RE = re.compile(r"^\s*des\s*\(\s*([^,\s]+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_EDGE_RE = re.compile(
    r'^\s*\(\s*([^,\s]+)\s*,\s*("(?:[^"\\]|\\.)*"|[^,"]*?)\s*,\s*([^,\s)]+)\s*\)\s*$'
)


def _aut_state(text: str) -> State:
    return int(text) if text.isdigit() else text


def _column(line: str) -> int:
    return len(line) - len(line.lstrip()) + 1


def _escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace('"', '\\"')


def _unescape(label: str) -> str:
    return re.sub(r"\\(.)", r"\1", label)


def read_aut(text: str, tau_label: Optional[str] = None) -> LTS:
    lines = text.splitlines()
    numbered = [(n, line) for n, line in enumerate(lines, start=1) if line.strip()]
    if not numbered:
        raise ParseError("Empty .aut input: expected a 'des (init,transitions,states)' header", 1, 1)
    head_no, head = numbered[0]
    m = _HEADER_RE.match(head)
    if m is None:
        raise ParseError("Expected header 'des (init,transitions,states)'", head_no, _column(head))
    initial = _aut_state(m.group(1))
    n_trans = int(m.group(2))
    n_states = int(m.group(3))

    tau_names = {TAU}
    if tau_label:
        tau_names.add(tau_label)
    transitions: Set[Transition] = set()
    seen_edges = 0
    for line_no, line in numbered[1:]:
        em = _EDGE_RE.match(line)
        if em is None:
            raise ParseError("Expected a transition '(from,\"label\",to)'", line_no, _column(line))
        src, raw, dst = em.group(1), em.group(2), em.group(3)
        label = _unescape(raw[1:-1]) if raw.startswith('"') else raw.strip()
        if not label:
            raise ParseError("Empty transition label", line_no, line.index(",") + 2)
        if label in tau_names:
            label = TAU
        s, t = _aut_state(src), _aut_state(dst)
        for st in (s, t):
            if isinstance(st, int) and not 0 <= st < n_states:
                raise ParseError(
                    f"State {st} outside the {n_states} states declared in the header",
                    line_no,
                    _column(line),
                )
        transitions.add((s, label, t))
        seen_edges += 1

    if seen_edges != n_trans:
        raise ParseError(
            f"Header declares {n_trans} transitions but {seen_edges} were given",
            head_no,
            _column(head),
        )
    states: Set[State] = set(range(n_states))
    for s, _, t in transitions:
        states.update((s, t))
    if initial not in states:
        raise ParseError(
            f"Initial state {initial} is not one of the {n_states} states declared in the header",
            head_no,
            _column(head),
        )
    if len(states) != n_states:
        raise ParseError(
            f"Header declares {n_states} states but {len(states)} are used",
            head_no,
            _column(head),
        )
    return LTS(tuple(states), frozenset(transitions), initial)


def aut_numbering(L: LTS) -> Dict[State, int]:
    """Initial state first, then state order."""
    order = list(L.states)
    if L.initial is not None:
        order.remove(L.initial)
        order.insert(0, L.initial)
    return {s: n for n, s in enumerate(order)}


def write_aut(L: LTS) -> str:
    number = aut_numbering(L)
    edges = sorted((number[s], a, number[t]) for s, a, t in L.transitions)
    out = [f"des (0,{len(edges)},{len(number)})"]
    for s, a, t in edges:
        out.append(f'({s},"{_escape(a)}",{t})')
    return "\n".join(out) + "\n"
