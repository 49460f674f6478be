# src/sosw/equivalence.py

"""
Bisimilarity on finite LTSs.

Provides:
  - EquivalenceKind: strong / branching / delay / weak, optionally rooted.
  - Partition: canonical block structure over the states of an LTS.
  - bisimilarity(L, kind): coarsest bisimulation by pair deletion
    (method="fixpoint") or by signature refinement on the saturated
    system (method="saturation", strong/delay/weak only).
  - rooted_related(L, p, q, kind): the rooted clause over the unrooted
    partition.
  - oracle_bisimilarity(L, kind): an independent boolean-matrix
    computation for small systems, used to cross-check the above.
  - deletion_levels(L, base): the round in which each pair was deleted;
    modal.distinguishing_formula builds its witnesses from these.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import CapExceeded, SoswCLIError
from .semantics import LTS, State, render_state, state_key
from .settings import DEFAULT_BOUNDS
from .tss import TAU

log = logging.getLogger(__name__)

STRONG = "strong"
BRANCHING = "branching"
DELAY = "delay"
WEAK = "weak"
BASES = (STRONG, BRANCHING, DELAY, WEAK)


@dataclass(frozen=True)
class EquivalenceKind:
    base: str
    rooted: bool = False

    def __post_init__(self):
        if self.base not in BASES:
            raise SoswCLIError("E014", f"Unknown equivalence '{self.base}'; known: {', '.join(BASES)}")

    @classmethod
    def parse(cls, text: str) -> "EquivalenceKind":
        name = text.strip().lower()
        rooted = name.startswith("rooted-")
        if rooted:
            name = name[len("rooted-"):]
        return cls(name, rooted)

    @property
    def unrooted(self) -> "EquivalenceKind":
        return EquivalenceKind(self.base, False)

    def __str__(self) -> str:
        return f"rooted-{self.base}" if self.rooted else self.base


def as_kind(kind) -> EquivalenceKind:
    return kind if isinstance(kind, EquivalenceKind) else EquivalenceKind.parse(str(kind))


# ============================================================
# Partition
# ============================================================

@dataclass(frozen=True)
class Partition:
    """Blocks sorted by their least state; members sorted within a block."""
    blocks: Tuple[Tuple[State, ...], ...]

    @classmethod
    def from_blocks(cls, blocks) -> "Partition":
        cleaned = [tuple(sorted(b, key=state_key)) for b in blocks if b]
        cleaned.sort(key=lambda b: state_key(b[0]))
        return cls(tuple(cleaned))

    @classmethod
    def from_relation(cls, states: Sequence[State], related) -> "Partition":
        """Group states with an equivalence given as a predicate on pairs."""
        blocks: List[List[State]] = []
        for s in sorted(states, key=state_key):
            for block in blocks:
                if related(block[0], s):
                    block.append(s)
                    break
            else:
                blocks.append([s])
        return cls.from_blocks(blocks)

    @cached_property
    def block_of(self) -> Dict[State, int]:
        return {s: n for n, block in enumerate(self.blocks) for s in block}

    def same(self, p: State, q: State) -> bool:
        return self.block_of[p] == self.block_of[q]

    def refines(self, other: "Partition") -> bool:
        """Every block of self lies inside a block of other."""
        return all(len({other.block_of[s] for s in block}) == 1 for block in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> Dict[str, object]:
        return {"blocks": [[render_state(s) for s in block] for block in self.blocks]}


# ============================================================
# Matching moves
# ============================================================

def eps_then_eps(L: LTS, s: State, label: str) -> FrozenSet[State]:
    """s =eps=> -label-> =eps=> q with the middle step mandatory, also for tau."""
    out: Set[State] = set()
    for q in L.eps_then(s, label):
        out |= L.eps_closure[q]
    return frozenset(out)


def rooted_moves(L: LTS, s: State, label: str, base: str) -> FrozenSet[State]:
    """Answers allowed to a rooted move s -label-> under the given base equivalence."""
    if base == DELAY:
        return L.eps_then(s, label)
    if base == WEAK:
        return eps_then_eps(L, s, label)
    return L.post(s, label)


# ============================================================
# Pair deletion
# ============================================================

class _Deletion:
    """Synchronous rounds: every pair violating the clause against R_k leaves R_{k+1}."""

    def __init__(self, L: LTS, base: str):
        self.L = L
        self.base = base
        self.related: Set[Tuple[State, State]] = {(p, q) for p in L.states for q in L.states}
        self.level: Dict[Tuple[State, State], int] = {}

    def _answers(self, q: State, label: str) -> FrozenSet[State]:
        if self.base == STRONG:
            return self.L.post(q, label)
        if self.base == DELAY:
            return self.L.eps_then(q, label)
        if self.base == WEAK:
            return self.L.weak_post(q, label)
        return frozenset()

    def matched(self, p: State, q: State, label: str, p2: State, R) -> bool:
        if label == TAU and self.base != STRONG and (p2, q) in R:
            return True
        if self.base == BRANCHING:
            for q1 in self.L.eps_closure[q]:
                if (p, q1) not in R:
                    continue
                if any((p2, q2) in R for q2 in self.L.post(q1, label)):
                    return True
            return False
        return any((p2, q2) in R for q2 in self._answers(q, label))

    def transfer(self, p: State, q: State, R) -> bool:
        return all(self.matched(p, q, a, p2, R) for a, p2 in self.L.successors[p])

    def run(self) -> "_Deletion":
        rounds = 0
        while True:
            rounds += 1
            R = frozenset(self.related)
            doomed = {
                (p, q) for (p, q) in R
                if p != q and not (self.transfer(p, q, R) and self.transfer(q, p, R))
            }
            if not doomed:
                break
            for pair in doomed:
                self.level[pair] = rounds
            self.related -= doomed
        log.debug("%s pair deletion: %d rounds, %d pairs left", self.base, rounds, len(self.related))
        return self


def deletion_levels(L: LTS, base: str) -> Dict[Tuple[State, State], int]:
    """Round (from 1) in which each unrelated ordered pair was deleted."""
    return dict(_Deletion(L, base).run().level)


def _fixpoint(L: LTS, base: str) -> Partition:
    run = _Deletion(L, base).run()
    return Partition.from_relation(L.states, lambda p, q: (p, q) in run.related)


# ============================================================
# Saturation fast path
# ============================================================

def _saturated(L: LTS, base: str) -> Dict[State, Tuple[Tuple[str, State], ...]]:
    out: Dict[State, Tuple[Tuple[str, State], ...]] = {}
    for s in L.states:
        moves: Set[Tuple[str, State]] = set()
        for a in L.alphabet:
            if base == STRONG:
                targets = L.post(s, a)
            elif a == TAU:
                targets = L.eps_closure[s]
            elif base == DELAY:
                targets = L.eps_then(s, a)
            else:
                targets = L.weak_post(s, a)
            moves |= {(a, t) for t in targets}
        out[s] = tuple(moves)
    return out


def _saturation(L: LTS, base: str) -> Partition:
    if base == BRANCHING:
        log.debug("no saturation for branching bisimilarity; using pair deletion")
        return _fixpoint(L, base)
    moves = _saturated(L, base)
    block = {s: 0 for s in L.states}
    count = 1
    while True:
        signature = {
            s: (block[s], frozenset((a, block[t]) for a, t in moves[s])) for s in L.states
        }
        ids: Dict[Tuple, int] = {}
        for s in sorted(L.states, key=state_key):
            ids.setdefault(signature[s], len(ids))
        block = {s: ids[signature[s]] for s in L.states}
        if len(ids) == count:
            break
        count = len(ids)
    groups: Dict[int, List[State]] = {}
    for s, b in block.items():
        groups.setdefault(b, []).append(s)
    return Partition.from_blocks(groups.values())


# ============================================================
# Public API
# ============================================================

def rooted_related(
    L: LTS,
    p: State,
    q: State,
    kind,
    partition: Optional[Partition] = None,
) -> bool:
    """
    The rooted clause: every p -a-> p' is answered by a rooted move of q
    into the unrooted class of p', and symmetrically.
    """
    kind = as_kind(kind)
    if p == q:
        return True
    if partition is None:
        partition = bisimilarity(L, kind.unrooted)
    base = kind.base

    def answered(s: State, t: State) -> bool:
        for a, s2 in L.successors[s]:
            if not any(partition.same(s2, t2) for t2 in rooted_moves(L, t, a, base)):
                return False
        return True

    return answered(p, q) and answered(q, p)


def bisimilarity(L: LTS, kind, method: str = "fixpoint") -> Partition:
    kind = as_kind(kind)
    if method not in ("fixpoint", "saturation"):
        raise SoswCLIError("E014", f"Unknown method '{method}'; known: fixpoint, saturation")
    unrooted = _fixpoint(L, kind.base) if method == "fixpoint" else _saturation(L, kind.base)
    if not kind.rooted:
        return unrooted
    return Partition.from_relation(L.states, lambda p, q: rooted_related(L, p, q, kind, unrooted))


def equivalent(L: LTS, p: State, q: State, kind) -> bool:
    kind = as_kind(kind)
    if kind.rooted:
        return rooted_related(L, p, q, kind)
    return bisimilarity(L, kind).same(p, q)


# ============================================================
# Naive oracle
# ============================================================

def oracle_bisimilarity(L: LTS, kind, cap: int = DEFAULT_BOUNDS.oracle_cap) -> Partition:
    """
    Boolean matrices over state indices: tau-closure by Warshall, the
    transfer conditions written out per kind, and whole-relation
    recomputation until nothing changes.
    """
    kind = as_kind(kind)
    n = len(L.states)
    if n > cap:
        raise CapExceeded(n, cap)
    index = {s: i for i, s in enumerate(L.states)}
    labels = sorted(L.alphabet)
    step = {a: [[False] * n for _ in range(n)] for a in labels}
    for s, a, t in L.transitions:
        step[a][index[s]][index[t]] = True

    closure = [[i == j or step[TAU][i][j] for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if closure[i][k]:
                for j in range(n):
                    if closure[k][j]:
                        closure[i][j] = True

    def compose(x, y):
        return [[any(x[i][k] and y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    delay_step = {a: compose(closure, step[a]) for a in labels}
    weak_step = {a: compose(delay_step[a], closure) for a in labels}

    def holds(rel, i: int, j: int, base: str) -> bool:
        for a in labels:
            for i2 in range(n):
                if not step[a][i][i2]:
                    continue
                if base != STRONG and a == TAU and rel[i2][j]:
                    continue
                if base == STRONG:
                    ok = any(step[a][j][j2] and rel[i2][j2] for j2 in range(n))
                elif base == DELAY:
                    ok = any(delay_step[a][j][j2] and rel[i2][j2] for j2 in range(n))
                elif base == WEAK:
                    ok = any(weak_step[a][j][j2] and rel[i2][j2] for j2 in range(n))
                else:
                    ok = any(
                        closure[j][j1] and rel[i][j1] and step[a][j1][j2] and rel[i2][j2]
                        for j1 in range(n) for j2 in range(n)
                    )
                if not ok:
                    return False
        return True

    rel = [[True] * n for _ in range(n)]
    while True:
        new = [[rel[i][j] and holds(rel, i, j, kind.base) and holds(rel, j, i, kind.base) for j in range(n)] for i in range(n)]
        if new == rel:
            break
        rel = new

    if kind.rooted:
        answer = {STRONG: step, BRANCHING: step, DELAY: delay_step, WEAK: weak_step}[kind.base]

        def rooted(i: int, j: int) -> bool:
            return all(
                any(answer[a][j][j2] and rel[i2][j2] for j2 in range(n))
                for a in labels for i2 in range(n) if step[a][i][i2]
            )

        final = [[rooted(i, j) and rooted(j, i) for j in range(n)] for i in range(n)]
    else:
        final = rel
    return Partition.from_relation(L.states, lambda p, q: final[index[p]][index[q]])


# ============================================================
# Random systems for cross-checks
# ============================================================

def random_lts(
    rng: random.Random,
    max_states: int = 12,
    actions: Sequence[str] = ("a", "b", "c"),
    density: float = 0.25,
) -> LTS:
    """States 0..n-1, each possible edge present with the given density; tau is always available."""
    n = rng.randint(1, max_states)
    labels = list(actions) + [TAU]
    trans = {
        (s, a, t)
        for s in range(n)
        for a in labels
        for t in range(n)
        if rng.random() < density / len(labels)
    }
    return LTS(tuple(range(n)), frozenset(trans), 0, frozenset(labels))
