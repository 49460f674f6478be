# src/sosw/ruloids.py

"""
Ruloid construction: the conversion pipeline P -> P(decent ntyft) ->
P(xynft) -> P+ (with non-standard rules), linear proof search, and
bijective rule matching.

Provides:
  - ProofTree / Ruloid / RuloidSet
  - to_decent_ntyft, resolve_premises / to_xynft, augment_nonstandard,
    build_pipeline
  - ruloids_for(P, source, label): decent nxytt rules with that source
  - search_linear_proofs / linearly_provable: bounded linear proof search
  - match_rule_into: find a rule of R (up to bijective renaming) whose
    premises lie inside a given premise set
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import (
    AbstractSet,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .errors import BoundExceeded, FormatPrecondition, PartialRuloids, Unbounded
from .settings import DEFAULT_BOUNDS, Bounds
from .terms import (
    App,
    Term,
    Var,
    apply,
    closed_terms,
    fresh_variables,
    match,
    resolve,
    unify,
    variables,
)
from .tss import (
    Literal,
    Rule,
    TSS,
    alpha_key,
    classify,
    free_variables,
    neg,
    pos,
    ready_simulation_format,
)

log = logging.getLogger(__name__)


# ============================================================
# Proof trees
# ============================================================

@dataclass(frozen=True)
class ProofTree:
    literal: Literal
    rule: Optional[str] = None      # None marks a hypothesis leaf
    substitution: Tuple[Tuple[str, Term], ...] = ()
    children: Tuple["ProofTree", ...] = ()

    @property
    def hypothesis(self) -> bool:
        return self.rule is None

    def hypotheses(self) -> List[Literal]:
        if self.hypothesis:
            return [self.literal]
        return [h for c in self.children for h in c.hypotheses()]

    def is_linear(self) -> bool:
        positives = [h for h in self.hypotheses() if h.positive]
        return len(positives) == len(set(positives))

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)

    def apply(self, sigma: Mapping[str, Term]) -> "ProofTree":
        if not sigma:
            return self
        subst = tuple((x, apply(sigma, t)) for x, t in self.substitution)
        return ProofTree(
            self.literal.apply(sigma),
            self.rule,
            subst,
            tuple(c.apply(sigma) for c in self.children),
        )

    def replace_leaf(self, leaf: Literal, subtree: "ProofTree") -> "ProofTree":
        if self.hypothesis:
            return subtree if self.literal == leaf else self
        return ProofTree(
            self.literal,
            self.rule,
            self.substitution,
            tuple(c.replace_leaf(leaf, subtree) for c in self.children),
        )

    def render(self, indent: int = 0) -> List[str]:
        pad = "  " * indent
        tag = "hypothesis" if self.hypothesis else f"by {self.rule}"
        lines = [f"{pad}{self.literal}    [{tag}]"]
        for c in self.children:
            lines.extend(c.render(indent + 1))
        return lines

    def __str__(self) -> str:
        return "\n".join(self.render())


def _hypothesis(lit: Literal) -> ProofTree:
    return ProofTree(lit)


@dataclass(frozen=True)
class Ruloid:
    rule: Rule
    proof: ProofTree
    linear: bool

    def __str__(self) -> str:
        tag = "linear" if self.linear else "non-linear"
        return f"{self.rule}    ({tag})"


@dataclass(frozen=True)
class RuloidSet:
    source: Term
    label: str
    ruloids: Tuple[Ruloid, ...]
    partial: bool = False

    def __iter__(self) -> Iterator[Ruloid]:
        return iter(self.ruloids)

    def __len__(self) -> int:
        return len(self.ruloids)

    def rules(self) -> List[Rule]:
        return [r.rule for r in self.ruloids]

    def linear(self) -> List[Ruloid]:
        return [r for r in self.ruloids if r.linear]

    def require_complete(self) -> "RuloidSet":
        if self.partial:
            raise PartialRuloids(self.source, self.label)
        return self


# ============================================================
# Renaming helpers
# ============================================================

class _Fresh:
    """Fresh variable names that cannot clash with names from the DSL."""

    def __init__(self, tag: str = "v"):
        self.tag = tag
        self.n = 0

    def name(self, base: str) -> str:
        self.n += 1
        return f"{base.split('#')[0]}#{self.tag}{self.n}"

    def rename(self, r: Rule, keep: AbstractSet[str] = frozenset()) -> Tuple[Rule, Dict[str, Term]]:
        sigma: Dict[str, Term] = {x: Var(self.name(x)) for x in sorted(r.variables() - set(keep))}
        return r.apply(sigma), sigma


def tidy(r: Rule, keep: AbstractSet[str], prefix: str = "y") -> Tuple[Rule, Dict[str, Term]]:
    """Rename every variable outside `keep` to y1, y2, ... in occurrence order."""
    order: List[str] = []
    for lit in r.premises + (r.conclusion,):
        for t in (lit.lhs, lit.rhs):
            if t is None:
                continue
            for x in _occurrence_order(t):
                if x not in keep and x not in order:
                    order.append(x)
    avoid = set(keep)
    names: List[str] = []
    n = 0
    while len(names) < len(order):
        n += 1
        cand = f"{prefix}{n}"
        if cand not in avoid:
            names.append(cand)
    sigma = {old: Var(new) for old, new in zip(order, names)}
    return r.apply(sigma), sigma


def _occurrence_order(t: Term) -> List[str]:
    if isinstance(t, Var):
        return [t.name]
    out: List[str] = []
    for a in t.args:
        out.extend(_occurrence_order(a))
    return out


# ============================================================
# P -> decent ntyft
# ============================================================

def to_decent_ntyft(P: TSS, universe: Optional[Sequence[Term]] = None) -> TSS:
    """
    Replace variable sources by f(x1..xn) for every symbol f, and
    instantiate free variables over `universe` (Unbounded when none given).
    P must be in ready simulation format.
    """
    ok, violations = ready_simulation_format(P)
    if not ok:
        raise FormatPrecondition(violations)
    out: List[Rule] = []
    for r in P.rules:
        expanded: List[Rule] = []
        if isinstance(r.source, Var):
            x = r.source.name
            for f, ar in P.signature.symbols:
                names = fresh_variables(r.variables(), ar, prefix="x")
                src = App(f, tuple(Var(n) for n in names))
                expanded.append(r.apply({x: src}).named(f"{r.name}[{f}]" if r.name else f))
        else:
            expanded.append(r)
        for e in expanded:
            free = sorted(free_variables(e))
            if not free:
                out.append(e)
                continue
            if universe is None:
                raise Unbounded(e)
            for combo in itertools.product(universe, repeat=len(free)):
                inst = e.apply(dict(zip(free, combo)))
                out.append(inst.named(f"{e.name}{{{', '.join(str(t) for t in combo)}}}"))
    log.debug("to_decent_ntyft: %d -> %d rules", len(P.rules), len(out))
    return P.with_rules(_dedupe(out))


def _dedupe(rules: Iterable[Rule]) -> List[Rule]:
    seen: Dict[Tuple, Rule] = {}
    for r in rules:
        seen.setdefault(alpha_key(r), r)
    return list(seen.values())


# ============================================================
# decent ntyft -> xynft
# ============================================================

def _non_variable_premises(r: Rule) -> List[Literal]:
    return [p for p in r.positive_premises if not isinstance(p.lhs, Var)]


def _resolvents(
    r: Rule,
    proof: ProofTree,
    premise: Literal,
    Pd: TSS,
    fresh: _Fresh,
) -> List[Tuple[Rule, ProofTree]]:
    """Replace `premise` by the premises of each rule that can derive it."""
    assert isinstance(premise.lhs, App) and isinstance(premise.rhs, Var)
    out: List[Tuple[Rule, ProofTree]] = []
    for r2 in Pd.rules_for(premise.lhs.symbol, premise.label):
        if not r2.standard:
            continue
        renamed, _ = fresh.rename(r2)
        sigma = match(renamed.source, premise.lhs)
        if sigma is None:
            continue
        inst = renamed.apply(sigma)
        theta = {premise.rhs.name: inst.target}
        premises = [q.apply(theta) for q in r.premises if q != premise] + list(inst.premises)
        new_rule = Rule(tuple(premises), r.conclusion.apply(theta), r.name)
        subtree = ProofTree(
            inst.conclusion,
            r2.name or str(r2),
            tuple(sorted(sigma.items())),
            tuple(_hypothesis(q) for q in inst.premises),
        )
        new_proof = proof.replace_leaf(premise, subtree).apply(theta)
        out.append((new_rule, new_proof))
    return out


def resolve_premises(Pd: TSS, bound: int) -> List[Tuple[Rule, ProofTree]]:
    """
    Resolve non-variable positive premise left-hand sides until every rule
    is xynft. Each result carries the linear proof it was composed from.
    """
    fresh = _Fresh("r")
    pending: List[Tuple[Rule, ProofTree]] = []
    for r in Pd.rules:
        proof = ProofTree(r.conclusion, r.name or str(r), (), tuple(_hypothesis(p) for p in r.premises))
        pending.append((r, proof))
    done: List[Tuple[Rule, ProofTree]] = []
    rounds = 0
    while pending:
        nxt: List[Tuple[Rule, ProofTree]] = []
        for r, proof in pending:
            todo = _non_variable_premises(r)
            if not todo:
                done.append((r, proof))
                continue
            current = [(r, proof)]
            for premise in todo:
                grown: List[Tuple[Rule, ProofTree]] = []
                for cr, cp in current:
                    grown.extend(_resolvents(cr, cp, premise, Pd, fresh))
                current = grown
            nxt.extend(current)
        pending = nxt
        if pending:
            rounds += 1
            if rounds > bound:
                raise BoundExceeded("premise resolution", bound)
    seen: Dict[Tuple, Tuple[Rule, ProofTree]] = {}
    for r, proof in done:
        seen.setdefault(alpha_key(r), (r, proof))
    log.debug("resolve_premises: %d xynft rules after %d rounds", len(seen), rounds)
    return list(seen.values())


def to_xynft(Pd: TSS, bound: int = DEFAULT_BOUNDS.resolution_rounds) -> TSS:
    rules = []
    taken: Dict[str, int] = {}
    for r, _ in resolve_premises(Pd, bound):
        base = r.name or "xy"
        taken[base] = taken.get(base, 0) + 1
        rules.append(r.named(base if taken[base] == 1 else f"{base}~{taken[base]}"))
    return Pd.with_rules(rules)


# ============================================================
# Non-standard augmentation
# ============================================================

@dataclass(frozen=True)
class Augmented:
    tss: TSS
    blowups: Tuple[Tuple[str, str, int], ...] = ()


def _deny(p: Literal, z: str) -> Literal:
    if p.positive:
        return neg(p.lhs, p.label)
    return pos(p.lhs, p.label, Var(z))


def augment_with_report(Pdd: TSS, cap: int = DEFAULT_BOUNDS.blowup_cap) -> Augmented:
    fresh = _Fresh("n")
    added: List[Rule] = []
    blowups: List[Tuple[str, str, int]] = []
    for f, _ in Pdd.signature.symbols:
        gen = Pdd.signature.generic(f)
        for label in Pdd.labels:
            normalized: List[Rule] = []
            for r in Pdd.rules_for(f, label):
                if not r.standard:
                    continue
                renamed, _ = fresh.rename(r)
                sigma = match(renamed.source, gen)
                if sigma is None:
                    continue
                normalized.append(renamed.apply(sigma))
            choices = [list(r.premises) for r in normalized]
            count = 1
            for c in choices:
                count *= len(c)
            if count > cap:
                log.warning("denial product for %s -%s-> has %d choices (cap %d); skipped", f, label, count, cap)
                blowups.append((f, label, count))
                continue
            keys: Set[FrozenSet[str]] = set()
            for combo in itertools.product(*choices):
                zs = fresh_variables(variables(gen), len(combo), prefix="z")
                premises = tuple(_deny(p, z) for p, z in zip(combo, zs))
                key = frozenset(str(p) for p in premises)
                if key in keys:
                    continue
                keys.add(key)
                added.append(Rule(premises, neg(gen, label), f"deny_{f}_{label}_{len(keys)}"))
    log.debug("augment_nonstandard: +%d non-standard rules", len(added))
    return Augmented(Pdd.with_rules(list(Pdd.rules) + added), tuple(blowups))


def augment_nonstandard(Pdd: TSS, cap: int = DEFAULT_BOUNDS.blowup_cap) -> TSS:
    """P+ : the xynft rules plus every rule f(x..) -a!-> obtained by denying one premise per rule."""
    return augment_with_report(Pdd, cap).tss


@dataclass(frozen=True)
class Pipeline:
    original: TSS
    decent: TSS
    xynft: TSS
    plus: TSS
    blowups: Tuple[Tuple[str, str, int], ...] = ()


@lru_cache(maxsize=64)
def build_pipeline(
    P: TSS,
    bounds: Bounds = DEFAULT_BOUNDS,
    universe: Optional[Tuple[Term, ...]] = None,
) -> Pipeline:
    decent = to_decent_ntyft(P, universe)
    xy = to_xynft(decent, bounds.resolution_rounds)
    aug = augment_with_report(xy, bounds.blowup_cap)
    return Pipeline(P, decent, xy, aug.tss, aug.blowups)


@lru_cache(maxsize=64)
def free_variable_universe(P: TSS, bounds: Bounds = DEFAULT_BOUNDS) -> Optional[Tuple[Term, ...]]:
    """
    Closed terms used to instantiate free variables of rules; None when no
    rule has any, which keeps the pipeline cache key small.
    """
    if not any(free_variables(r) for r in P.rules):
        return None
    return tuple(closed_terms(P.signature, max(bounds.universe_depth - 1, 0)))


# ============================================================
# Ruloid construction
# ============================================================

@dataclass
class _Built:
    """Memo entry: the ruloids of one (term, label, sign) and how deep they were built."""
    rules: List[Tuple[Rule, ProofTree]]
    budget: int
    truncated: bool


class _RuloidBuilder:
    """
    Composes P+ rules along a source term. One builder is shared by every
    source over the same P+ and depth bound, so subterm ruloids are built
    once. An entry cut off by the depth bound is rebuilt when a later
    lookup has more depth left.
    """

    def __init__(self, plus: TSS, depth_bound: int):
        self.plus = plus
        self.depth_bound = depth_bound
        self.fresh = _Fresh("u")
        self.memo: Dict[Tuple[Term, str, bool], _Built] = {}

    def _freshen(self, r: Rule, proof: ProofTree, keep: AbstractSet[str]) -> Tuple[Rule, ProofTree]:
        renamed, sigma = self.fresh.rename(r, keep)
        return renamed, proof.apply(sigma)

    def lookup(self, t: Term, label: str, positive: bool, level: int = 0) -> _Built:
        key = (t, label, positive)
        budget = self.depth_bound - level
        hit = self.memo.get(key)
        if hit is None or (hit.truncated and hit.budget < budget):
            hit = self._build(t, label, positive, level)
            self.memo[key] = hit
        return hit

    def build(self, t: Term, label: str, positive: bool, level: int = 0) -> Tuple[List[Tuple[Rule, ProofTree]], bool]:
        hit = self.lookup(t, label, positive, level)
        keep = variables(t)
        return [self._freshen(r, p, keep) for r, p in hit.rules], hit.truncated

    def _build(self, t: Term, label: str, positive: bool, level: int) -> _Built:
        budget = self.depth_bound - level
        if isinstance(t, Var):
            if positive:
                y = Var(self.fresh.name("y"))
                lit = pos(t, label, y)
            else:
                lit = neg(t, label)
            return _Built([(Rule((lit,), lit), _hypothesis(lit))], budget, False)
        if budget <= 0:
            return _Built([], budget, True)
        truncated = False
        out: List[Tuple[Rule, ProofTree]] = []
        for r in self.plus.rules_for(t.symbol, label):
            if r.standard != positive:
                continue
            renamed, _ = self.fresh.rename(r)
            sigma = match(renamed.source, t)
            if sigma is None:
                continue
            options = []
            for q in renamed.premises:
                sub, cut = self.build(apply(sigma, q.lhs), q.label, q.positive, level + 1)
                truncated = truncated or cut
                options.append(sub)
            for combo in itertools.product(*options):
                theta: Dict[str, Term] = dict(sigma)
                premises: List[Literal] = []
                for q, (sub, _) in zip(renamed.premises, combo):
                    if q.positive:
                        theta[q.rhs.name] = sub.target
                    premises.extend(sub.premises)
                if positive:
                    conclusion = pos(t, label, apply(theta, renamed.target))
                else:
                    conclusion = neg(t, label)
                proof = ProofTree(
                    conclusion,
                    r.name or str(r),
                    tuple(sorted(theta.items())),
                    tuple(p for _, p in combo),
                )
                out.append((Rule(tuple(premises), conclusion), proof))
        return _Built(out, budget, truncated)


@lru_cache(maxsize=32)
def _shared_builder(plus: TSS, depth_bound: int) -> _RuloidBuilder:
    return _RuloidBuilder(plus, depth_bound)


def _identifications(r: Rule) -> Iterator[Dict[str, Term]]:
    """Substitutions merging positive premises with equal left-hand side and label."""
    groups: Dict[Tuple[Term, str], List[str]] = {}
    for p in r.positive_premises:
        groups.setdefault((p.lhs, p.label), []).append(p.rhs.name)
    per_group = [list(_set_partitions(names)) for names in groups.values() if len(names) > 1]
    for combo in itertools.product(*per_group):
        sigma: Dict[str, Term] = {}
        for blocks in combo:
            for block in blocks:
                for other in block[1:]:
                    sigma[other] = Var(block[0])
        yield sigma


def _set_partitions(items: List[str]) -> Iterator[List[List[str]]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def ruloids_for(
    P: TSS,
    source: Term,
    label: str,
    depth_bound: Optional[int] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
    linear_only: bool = False,
    universe: Optional[Tuple[Term, ...]] = None,
) -> RuloidSet:
    """
    All P-ruloids with the given source and conclusion label, built by
    composing P+ rules along the structure of `source`. Non-linear
    ruloids arise from identifying positive premises with the same
    left-hand side and label.

    Results are cached per (P, source, label, depth bound); the subterm
    memo is shared by every source over the same pipeline.
    """
    if depth_bound is None:
        depth_bound = bounds.proof_depth
    return _ruloids_cached(P, source, label, depth_bound, bounds, linear_only, universe)


@lru_cache(maxsize=8192)
def _ruloids_cached(
    P: TSS,
    source: Term,
    label: str,
    depth_bound: int,
    bounds: Bounds,
    linear_only: bool,
    universe: Optional[Tuple[Term, ...]],
) -> RuloidSet:
    pipe = build_pipeline(P, bounds, universe)
    builder = _shared_builder(pipe.plus, depth_bound)
    linear, truncated = builder.build(source, label, True)
    keep = variables(source)

    found: Dict[Tuple, Ruloid] = {}
    linear_keys: Set[Tuple] = set()
    for r, proof in linear:
        tidied, sigma = tidy(r, keep)
        key = alpha_key(tidied)
        linear_keys.add(key)
        found.setdefault(key, Ruloid(tidied, proof.apply(sigma), True))
    if not linear_only:
        for r, proof in linear:
            for merge in _identifications(r):
                if not merge:
                    continue
                merged, sigma = tidy(r.apply(merge), keep)
                key = alpha_key(merged)
                if key in found:
                    continue
                found[key] = Ruloid(merged, proof.apply(merge).apply(sigma), key in linear_keys)

    for ruloid in found.values():
        cls = classify(ruloid.rule)
        assert cls.decent and cls.nxytt, f"ruloid {ruloid.rule} is not decent nxytt"
    partial = truncated or bool(pipe.blowups)
    if partial:
        log.info("ruloids for %s -%s-> are partial (depth %d)", source, label, depth_bound)
    ordered = sorted(found.values(), key=lambda r: (len(r.rule.premises), str(r.rule)))
    return RuloidSet(source, label, tuple(ordered), partial)


# ============================================================
# Linear proof search
# ============================================================

@dataclass
class _SearchState:
    P: TSS
    rigid: FrozenSet[str]
    allowed: Tuple[Literal, ...]
    fresh: _Fresh = field(default_factory=lambda: _Fresh("p"))
    truncated: bool = False


def _unify_literals(a: Literal, b: Literal, subst, rigid) -> Optional[Dict[str, Term]]:
    if a.label != b.label or a.positive != b.positive:
        return None
    s = unify(a.lhs, b.lhs, subst, rigid)
    if s is None or not a.positive:
        return s
    return unify(a.rhs, b.rhs, s, rigid)


def _prove(
    goal: Literal,
    subst: Dict[str, Term],
    used: FrozenSet[Literal],
    state: _SearchState,
    budget: int,
) -> Iterator[Tuple[Dict[str, Term], FrozenSet[Literal], ProofTree]]:
    for h in state.allowed:
        if h.positive and h in used:
            continue
        s = _unify_literals(goal, h, subst, state.rigid)
        if s is not None:
            yield s, used | {h}, _hypothesis(h)
    lhs = resolve(goal.lhs, subst)
    if isinstance(lhs, Var) and lhs.name in state.rigid:
        candidates = state.P.rules_for(None, goal.label)
    elif isinstance(lhs, Var):
        candidates = tuple(r for r in state.P.rules if r.label == goal.label)
    else:
        candidates = state.P.rules_for(lhs.symbol, goal.label) + state.P.rules_for(None, goal.label)
    candidates = tuple(r for r in candidates if r.standard == goal.positive)
    if not candidates:
        return
    if budget <= 0:
        state.truncated = True
        return
    for r in candidates:
        renamed, _ = state.fresh.rename(r)
        s = _unify_literals(goal, renamed.conclusion, subst, state.rigid)
        if s is None:
            continue
        for s2, used2, kids in _prove_all(renamed.premises, s, used, state, budget - 1):
            yield s2, used2, ProofTree(renamed.conclusion, r.name or str(r), (), kids)


def _prove_all(
    goals: Sequence[Literal],
    subst: Dict[str, Term],
    used: FrozenSet[Literal],
    state: _SearchState,
    budget: int,
) -> Iterator[Tuple[Dict[str, Term], FrozenSet[Literal], Tuple[ProofTree, ...]]]:
    if not goals:
        yield subst, used, ()
        return
    head, rest = goals[0], goals[1:]
    for s, u, tree in _prove(head, subst, used, state, budget):
        for s2, u2, trees in _prove_all(rest, s, u, state, budget):
            yield s2, u2, (tree,) + trees


def _resolve_tree(tree: ProofTree, subst: Mapping[str, Term]) -> ProofTree:
    lit = tree.literal
    rhs = None if lit.rhs is None else resolve(lit.rhs, subst)
    return ProofTree(
        Literal(resolve(lit.lhs, subst), lit.label, rhs),
        tree.rule,
        tree.substitution,
        tuple(_resolve_tree(c, subst) for c in tree.children),
    )


@dataclass(frozen=True)
class ProofSearch:
    """
    Outcome of a bounded search. `truncated`: deeper proofs were not
    explored. `capped`: the search stopped on reaching the result limit,
    so more proofs may exist.
    """
    results: Tuple[Tuple[FrozenSet[Literal], ProofTree, Dict[str, Term]], ...]
    truncated: bool
    capped: bool = False


def search_linear_proofs(
    goal: Literal,
    allowed: Iterable[Literal],
    P: TSS,
    depth_bound: int = DEFAULT_BOUNDS.proof_depth,
    rigid: Optional[AbstractSet[str]] = None,
    limit: Optional[int] = None,
) -> ProofSearch:
    """
    Linear proofs of `goal` from the rules of P, using hypotheses from
    `allowed` (positive ones at most once). Variables in `rigid` (default:
    those of the goal source and of the allowed premises) act as
    constants; all other goal variables may be instantiated.
    """
    allowed = tuple(allowed)
    if rigid is None:
        rigid = variables(goal.lhs).union(*(h.variables() for h in allowed))
    state = _SearchState(P, frozenset(rigid), allowed)
    results = []
    capped = False
    for subst, used, tree in _prove(goal, {}, frozenset(), state, depth_bound):
        results.append((used, _resolve_tree(tree, subst), subst))
        if limit is not None and len(results) >= limit:
            capped = True
            break
    return ProofSearch(tuple(results), state.truncated, capped)


def linearly_provable(
    r: Rule,
    P: TSS,
    depth_bound: int = DEFAULT_BOUNDS.proof_depth,
    strict: bool = False,
) -> Optional[ProofTree]:
    """
    A linear irredundant proof of r from P, or None. With strict=True a
    search that hit the depth bound raises BoundExceeded instead of
    returning None.
    """
    required = frozenset(r.premises)
    rigid = r.variables()
    search = _SearchState(P, frozenset(rigid), tuple(r.premises))
    for subst, used, tree in _prove(r.conclusion, {}, frozenset(), search, depth_bound):
        if used == required:
            return _resolve_tree(tree, subst)
    if strict and search.truncated:
        raise BoundExceeded(f"linear proof of {r}", depth_bound)
    return None


# ============================================================
# Bijective rule matching (membership in R up to renaming)
# ============================================================

def _var_match(pattern: Term, t: Term, sigma: Dict[str, str], used: Set[str]) -> Optional[Dict[str, str]]:
    """Match with a variable-to-variable injective renaming."""
    if isinstance(pattern, Var):
        if not isinstance(t, Var):
            return None
        bound = sigma.get(pattern.name)
        if bound is None:
            if t.name in used:
                return None
            out = dict(sigma)
            out[pattern.name] = t.name
            used.add(t.name)
            return out
        return sigma if bound == t.name else None
    if not isinstance(t, App) or t.symbol != pattern.symbol or len(t.args) != len(pattern.args):
        return None
    for p, s in zip(pattern.args, t.args):
        sigma = _var_match(p, s, sigma, used)
        if sigma is None:
            return None
    return sigma


def _literal_var_match(p: Literal, q: Literal, sigma: Dict[str, str]) -> Optional[Dict[str, str]]:
    if p.label != q.label or p.positive != q.positive:
        return None
    used = set(sigma.values())
    s = _var_match(p.lhs, q.lhs, sigma, used)
    if s is None or not p.positive:
        return s
    return _var_match(p.rhs, q.rhs, s, used)


def match_rule_into(
    rule: Rule,
    source: Term,
    label: str,
    target: Optional[Term],
    allowed: Iterable[Literal],
) -> Optional[Rule]:
    """
    The renamed copy of `rule` with conclusion source -label-> target
    (target None: any) and every premise in `allowed`, or None. Variables
    only occurring in the target are renamed apart from `allowed`.
    """
    if rule.label != label or not rule.standard:
        return None
    allowed = list(allowed)
    sigma = _var_match(rule.source, source, {}, set())
    if sigma is None:
        return None
    if target is not None:
        sigma = _var_match(rule.target, target, sigma, set(sigma.values()))
        if sigma is None:
            return None

    def place(premises: Sequence[Literal], sigma: Dict[str, str]) -> Optional[Dict[str, str]]:
        if not premises:
            return sigma
        head, rest = premises[0], premises[1:]
        for cand in allowed:
            s = _literal_var_match(head, cand, sigma)
            if s is not None:
                done = place(rest, s)
                if done is not None:
                    return done
        return None

    sigma = place(list(rule.premises), sigma)
    if sigma is None:
        return None
    avoid = set().union(*(l.variables() for l in allowed)) if allowed else set()
    avoid |= variables(source) | set(sigma.values())
    leftover = sorted(rule.variables() - set(sigma))
    for x, n in zip(leftover, fresh_variables(avoid, len(leftover), prefix="v")):
        sigma[x] = n
    return rule.apply({x: Var(n) for x, n in sigma.items()})


def rules_matching(
    R: Iterable[Rule],
    source: Term,
    label: str,
    target: Optional[Term],
    allowed: Iterable[Literal],
) -> Iterator[Rule]:
    allowed = tuple(allowed)
    for r in R:
        hit = match_rule_into(r, source, label, target, allowed)
        if hit is not None:
            yield hit
