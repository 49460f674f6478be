# src/sosw/decomposition.py

"""
Decomposition of modal formulas through the rules of a TSS.

For an open term t and a formula phi, t^-1(phi) is a finite set of
mappings psi from variables to formulas such that, for every closed
substitution rho,

    rho(t) |= phi   iff   some psi has rho(x) |= psi(x) for all x in var(t).

decompose builds the plain sets, decompose_dr the variant for delay
resistant TSSs whose <eps> case keeps every <beta> behind an <eps>.
verify_decomposition_theorem and verify_class_preservation check both
statements by brute force on generated LTSs.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .equivalence import EquivalenceKind, bisimilarity, random_lts
from .errors import BoundExceeded, InfiniteDecomposition
from .formats import PASS, check_delay_resistance, is_patient_rule
from .modal import (
    CLASS_KINDS,
    O_RD,
    O_RW,
    TOP,
    Conj,
    Diamond,
    Eps,
    Formula,
    Neg,
    actions_of,
    extension,
    in_class,
    normalize,
    parse_class,
)
from .ruloids import Ruloid, free_variable_universe, ruloids_for
from .semantics import LTS, generate_lts
from .settings import DEFAULT_BOUNDS, Bounds
from .terms import (
    App,
    ArgumentMarking,
    Term,
    Var,
    apply,
    is_univariate,
    occurrence_liquidity,
    ordered_variables,
    variables,
)
from .tss import TAU, MarkingSet, TSS, is_gamma_patient, stable_negatives

log = logging.getLogger(__name__)

DROP_EPS_4BIII = "drop-eps-4biii"
MUTATIONS = (DROP_EPS_4BIII,)


# ============================================================
# Mappings
# ============================================================

def _and(parts: Iterable[Formula]) -> Formula:
    kept = tuple(dict.fromkeys(p for p in parts if p != TOP))
    if not kept:
        return TOP
    return kept[0] if len(kept) == 1 else Conj(kept)


@dataclass(frozen=True)
class DecompositionMapping:
    """psi: variable -> formula; variables without an entry map to T."""
    entries: Tuple[Tuple[str, Formula], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, Formula]) -> "DecompositionMapping":
        return cls(tuple(sorted((x, phi) for x, phi in mapping.items() if phi != TOP)))

    def __call__(self, x: str) -> Formula:
        for name, phi in self.entries:
            if name == x:
                return phi
        return TOP

    def variables(self) -> FrozenSet[str]:
        return frozenset(x for x, _ in self.entries)

    def rename(self, sigma: Mapping[str, str]) -> "DecompositionMapping":
        return DecompositionMapping.of({sigma.get(x, x): phi for x, phi in self.entries})

    def normalized(self) -> "DecompositionMapping":
        return DecompositionMapping.of({x: normalize(phi) for x, phi in self.entries})

    def to_dict(self) -> Dict[str, str]:
        return {x: str(phi) for x, phi in self.entries}

    def __str__(self) -> str:
        if not self.entries:
            return "{ all T }"
        return "{ " + "; ".join(f"{x} |-> {phi}" for x, phi in self.entries) + " }"


ALL_TOP = DecompositionMapping()


@dataclass(frozen=True)
class DecompositionSet:
    term: Term
    formula: Formula
    mappings: Tuple[DecompositionMapping, ...]
    tags: Tuple[str, ...] = ()
    revisits: Tuple[str, ...] = ()

    def __iter__(self) -> Iterator[DecompositionMapping]:
        return iter(self.mappings)

    def __len__(self) -> int:
        return len(self.mappings)

    def to_dict(self) -> Dict[str, object]:
        return {
            "term": str(self.term),
            "formula": str(self.formula),
            "mappings": [m.to_dict() for m in self.mappings],
            "tags": list(self.tags),
            "revisits": list(self.revisits),
        }


def _conjuncts(phi: Formula) -> FrozenSet[Formula]:
    n = normalize(phi)
    if n == TOP:
        return frozenset()
    return frozenset(n.parts) if isinstance(n, Conj) else frozenset((n,))


def _conjunct_table(m: DecompositionMapping, xs: Sequence[str]) -> Dict[str, FrozenSet[Formula]]:
    return {x: _conjuncts(m(x)) for x in xs}


def _table_key(tab: Mapping[str, FrozenSet[Formula]]) -> Tuple:
    return tuple((x, tuple(sorted(str(f) for f in tab[x]))) for x in sorted(tab))


def _weakest(tables: Iterable[Dict[str, FrozenSet[Formula]]]) -> List[Dict[str, FrozenSet[Formula]]]:
    """
    Drop duplicates and every table implied by another: one whose conjuncts
    include the other's at each variable adds nothing to a disjunction.
    """
    unique: Dict[Tuple, Dict[str, FrozenSet[Formula]]] = {}
    for tab in tables:
        unique.setdefault(_table_key(tab), tab)
    ordered = sorted(unique.items(), key=lambda kv: (sum(len(v) for v in kv[1].values()), kv[0]))
    kept: List[Dict[str, FrozenSet[Formula]]] = []
    for _, tab in ordered:
        if not any(all(k[x] <= tab[x] for x in tab) for k in kept):
            kept.append(tab)
    return kept


def _dedupe(mappings: Iterable[DecompositionMapping]) -> Tuple[DecompositionMapping, ...]:
    seen: Dict[DecompositionMapping, DecompositionMapping] = {}
    for m in mappings:
        seen.setdefault(m.normalized(), m)
    return tuple(sorted(seen.values(), key=str))


# ============================================================
# Decomposer
# ============================================================

def _canonical(t: Term) -> Tuple[Term, Dict[str, str]]:
    """Variables renamed v0, v1, ... in occurrence order; returns the inverse renaming too."""
    names = ordered_variables(t)
    forward = {x: f"v{i}" for i, x in enumerate(names)}
    back = {new: old for old, new in forward.items()}
    return apply({x: Var(n) for x, n in forward.items()}, t), back


def _linearize(t: Term) -> Tuple[Term, Dict[str, str]]:
    """A univariate u and sigma with sigma(u) = t (sigma maps u's variables to t's)."""
    counter = itertools.count()
    sigma: Dict[str, str] = {}

    def go(s: Term) -> Term:
        if isinstance(s, Var):
            z = f"w{next(counter)}"
            sigma[z] = s.name
            return Var(z)
        return App(s.symbol, tuple(go(a) for a in s.args))

    return go(t), sigma


class Decomposer:
    """
    Memoised t^-1 / t^-1_dr over one TSS and one gamma. Results are
    stored for canonical terms and renamed back on every lookup.
    """

    def __init__(
        self,
        P: TSS,
        gamma: ArgumentMarking,
        dr: bool = False,
        bounds: Bounds = DEFAULT_BOUNDS,
        mutation: Optional[str] = None,
    ):
        if mutation is not None and mutation not in MUTATIONS:
            raise ValueError(f"unknown mutation {mutation!r}")
        self.P = P
        self.gamma = gamma
        self.dr = dr
        self.bounds = bounds
        self.mutation = mutation
        self.universe = free_variable_universe(P, bounds)
        self.memo: Dict[Tuple[Term, Formula], Tuple[DecompositionMapping, ...]] = {}
        self.ruloid_memo: Dict[Tuple[Term, str], Tuple[Ruloid, ...]] = {}
        self.active: Set[Tuple[Term, Formula]] = set()
        self.partial: Dict[Tuple[Term, Formula], Tuple[DecompositionMapping, ...]] = {}
        self.revisited: Set[Tuple[Term, Formula]] = set()
        self.revisit_log: List[Tuple[Term, Formula]] = []

    # -------------------- ruloids --------------------

    def ruloids(self, t: Term, label: str) -> Tuple[Ruloid, ...]:
        key = (t, label)
        if key not in self.ruloid_memo:
            rs = ruloids_for(self.P, t, label, bounds=self.bounds, universe=self.universe)
            rs.require_complete()
            self.ruloid_memo[key] = tuple(rs)
        return self.ruloid_memo[key]

    def impatient(self, t: Term) -> List[Ruloid]:
        return [r for r in self.ruloids(t, TAU) if not is_patient_rule(r.rule, self.gamma)]

    # -------------------- entry --------------------

    def decompose(self, t: Term, phi: Formula) -> Tuple[DecompositionMapping, ...]:
        if not is_univariate(t):
            u, sigma = _linearize(t)
            out = []
            for chi in self.decompose(u, phi):
                merged: Dict[str, List[Formula]] = {}
                for z, x in sigma.items():
                    merged.setdefault(x, []).append(chi(z))
                out.append(DecompositionMapping.of({x: _and(parts) for x, parts in merged.items()}))
            return _dedupe(out)

        canon, back = _canonical(t)
        key = (canon, phi)
        if key in self.memo:
            return tuple(m.rename(back) for m in self.memo[key])
        if key in self.active:
            self.revisited.add(key)
            self.revisit_log.append(key)
            return tuple(m.rename(back) for m in self.partial.get(key, ()))

        self.active.add(key)
        seen_before = len(self.revisit_log)
        rounds = 0
        try:
            while True:
                result = _dedupe(self._compute(canon, phi))
                if key not in self.revisited or result == self.partial.get(key):
                    break
                rounds += 1
                if rounds > self.bounds.decomposition_rounds or len(result) > self.bounds.blowup_cap:
                    raise InfiniteDecomposition(rounds)
                self.partial[key] = result
        finally:
            self.active.discard(key)
        # Anything computed while an enclosing key was still open may be stale.
        if set(self.revisit_log[seen_before:]) <= {key}:
            self.memo[key] = result
        return tuple(m.rename(back) for m in result)

    # -------------------- the five cases --------------------

    def _compute(self, t: Term, phi: Formula) -> List[DecompositionMapping]:
        if isinstance(phi, Conj):
            return self._conjunction(t, phi)
        if isinstance(phi, Neg):
            return self._negation(t, phi)
        if isinstance(phi, Diamond):
            return self._diamond(t, phi)
        if self.dr:
            return self._eps_dr(t, phi)
        return self._eps(t, phi)

    def _conjunction(self, t: Term, phi: Conj) -> List[DecompositionMapping]:
        choices = [self.decompose(t, part) for part in phi.parts]
        out = []
        for combo in itertools.product(*choices):
            out.append(DecompositionMapping.of({
                x: _and(chi(x) for chi in combo) for x in variables(t)
            }))
        return out

    def _negation(self, t: Term, phi: Neg) -> List[DecompositionMapping]:
        xs = sorted(variables(t))
        chis = _weakest(_conjunct_table(chi, xs) for chi in self.decompose(t, phi.body))
        # psi refutes every chi by negating it at one variable; a chi with
        # chi(x) = T there would put ~T into psi(x), so only the other
        # variables are options.
        chis.sort(key=lambda chi: sum(1 for x in xs if chi[x]))
        refuters: List[Dict[str, FrozenSet[Formula]]] = [{x: frozenset() for x in xs}]
        for chi in chis:
            options = [x for x in xs if chi[x]]
            denials = {x: Neg(_and(sorted(chi[x], key=str))) for x in options}
            grown: List[Dict[str, FrozenSet[Formula]]] = []
            for psi in refuters:
                if any(denials[x] in psi[x] for x in options):
                    grown.append(psi)
                    continue
                for x in options:
                    grown.append({**psi, x: psi[x] | {denials[x]}})
            refuters = _weakest(grown)
            if len(refuters) > self.bounds.blowup_cap:
                raise BoundExceeded(f"negation over {len(chis)} mappings of {t}", self.bounds.blowup_cap)
        return [
            DecompositionMapping.of({x: _and(sorted(psi[x], key=str)) for x in xs})
            for psi in refuters
        ]

    def _premise_parts(self, x: str, ruloid: Ruloid, chi: DecompositionMapping, delayed: bool) -> List[Formula]:
        H = ruloid.rule.premises
        parts = [chi(x)]
        for p in H:
            if p.lhs != Var(x) or not p.positive:
                continue
            step = Diamond(p.label, chi(p.rhs.name))
            parts.append(Eps(step) if delayed else step)
        negatives = stable_negatives(H) if delayed else tuple(p for p in H if not p.positive)
        for p in negatives:
            if p.lhs == Var(x):
                parts.append(Neg(Diamond(p.label, TOP)))
        return parts

    def _liquid(self, t: Term, x: str) -> bool:
        occ = occurrence_liquidity(t, x, self.gamma)
        return bool(occ) and all(liquid for _, liquid in occ)

    def _diamond(self, t: Term, phi: Diamond) -> List[DecompositionMapping]:
        out = []
        for ruloid in self.ruloids(t, phi.action):
            for chi in self.decompose(ruloid.rule.target, phi.body):
                out.append(DecompositionMapping.of({
                    x: _and(self._premise_parts(x, ruloid, chi, delayed=False)) for x in variables(t)
                }))
        return out

    def _eps(self, t: Term, phi: Eps) -> List[DecompositionMapping]:
        body = phi.body
        out = []
        for chi in self.decompose(t, body):
            out.append(DecompositionMapping.of({
                x: Eps(chi(x)) if self._liquid(t, x) else chi(x) for x in variables(t)
            }))
        for ruloid in self.impatient(t):
            for chi in self.decompose(ruloid.rule.target, phi):
                out.append(self._wrapped(t, ruloid, chi, delayed=False))
        return out

    def _wrapped(self, t: Term, ruloid: Ruloid, chi: DecompositionMapping, delayed: bool, drop_eps: bool = False) -> DecompositionMapping:
        out: Dict[str, Formula] = {}
        for x in variables(t):
            parts = self._premise_parts(x, ruloid, chi, delayed and not drop_eps)
            inner = _and(parts)
            out[x] = Eps(inner) if self._liquid(t, x) and not drop_eps else inner
        return DecompositionMapping.of(out)

    def _eps_dr(self, t: Term, phi: Eps) -> List[DecompositionMapping]:
        body = phi.body
        out = []
        if not isinstance(body, Diamond):
            for chi in self.decompose(t, body):
                out.append(DecompositionMapping.of({
                    x: Eps(chi(x)) if self._liquid(t, x) else chi(x) for x in variables(t)
                }))
        tau_body = isinstance(body, Diamond) and body.action == TAU
        for ruloid in self.impatient(t):
            after = Eps(body.body) if tau_body else phi
            for chi in self.decompose(ruloid.rule.target, after):
                out.append(self._wrapped(t, ruloid, chi, delayed=True))
        if isinstance(body, Diamond):
            drop = self.mutation == DROP_EPS_4BIII
            for ruloid in self.ruloids(t, body.action):
                for chi in self.decompose(ruloid.rule.target, body.body):
                    out.append(self._wrapped(t, ruloid, chi, delayed=True, drop_eps=drop))
        return out

    def revisit_report(self) -> Tuple[str, ...]:
        return tuple(sorted(f"{t} / {phi}" for t, phi in self.revisited))


# ============================================================
# Public API
# ============================================================

def _gamma_of(P: TSS, gamma: Optional[ArgumentMarking]) -> ArgumentMarking:
    return gamma if gamma is not None else P.marking_set().gamma


def _tags(P: TSS, gamma: ArgumentMarking) -> List[str]:
    ok, _ = is_gamma_patient(P, gamma)
    return [] if ok else ["not-patient"]


def decompose(
    t: Term,
    phi: Formula,
    P: TSS,
    gamma: Optional[ArgumentMarking] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> DecompositionSet:
    gamma = _gamma_of(P, gamma)
    engine = Decomposer(P, gamma, dr=False, bounds=bounds)
    mappings = engine.decompose(t, phi)
    return DecompositionSet(t, phi, mappings, tuple(_tags(P, gamma)), engine.revisit_report())


def decompose_dr(
    t: Term,
    phi: Formula,
    P: TSS,
    gamma: Optional[ArgumentMarking] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
    markings: Optional[MarkingSet] = None,
    mutation: Optional[str] = None,
) -> DecompositionSet:
    gamma = _gamma_of(P, gamma)
    tags = _tags(P, gamma)
    if check_delay_resistance(P, markings, bounds).result != PASS:
        log.warning("%s is not shown delay resistant; decompositions may be unsound", P.name)
        tags.append("unsound-premise")
    engine = Decomposer(P, gamma, dr=True, bounds=bounds, mutation=mutation)
    mappings = engine.decompose(t, phi)
    return DecompositionSet(t, phi, mappings, tuple(tags), engine.revisit_report())


# ============================================================
# Brute-force theorem check
# ============================================================

@dataclass(frozen=True)
class Mismatch:
    term: str
    formula: str
    substitution: Tuple[Tuple[str, str], ...]
    lhs: bool
    rhs: bool

    def __str__(self) -> str:
        rho = ", ".join(f"{x} := {p}" for x, p in self.substitution)
        return f"{self.term} under [{rho}] |= {self.formula}: {self.lhs}, decomposition says {self.rhs}"


@dataclass
class TheoremReport:
    dr: bool
    checked: int = 0
    mismatches: List[Mismatch] = field(default_factory=list)
    tags: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> Dict[str, object]:
        return {
            "dr": self.dr,
            "checked": self.checked,
            "mismatches": [str(m) for m in self.mismatches],
            "tags": sorted(set(self.tags)),
        }


def _substitutions(t: Term, universe: Sequence[Term]) -> Iterator[Dict[str, Term]]:
    xs = sorted(variables(t))
    for combo in itertools.product(universe, repeat=len(xs)):
        yield dict(zip(xs, combo))


def verify_decomposition_theorem(
    P: TSS,
    terms: Sequence[Term],
    formulas: Sequence[Formula],
    universe: Sequence[Term],
    dr: bool = False,
    gamma: Optional[ArgumentMarking] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
    mutation: Optional[str] = None,
) -> TheoremReport:
    """
    Evaluate both sides of the decomposition biconditional for every
    term, formula and closed substitution over `universe`.
    """
    gamma = _gamma_of(P, gamma)
    report = TheoremReport(dr)
    report.tags.extend(_tags(P, gamma))
    engine = Decomposer(P, gamma, dr=dr, bounds=bounds, mutation=mutation)

    roots: List[Term] = list(universe)
    for t in terms:
        for rho in _substitutions(t, universe):
            roots.append(apply(rho, t))
    L = generate_lts(P, roots, bounds=bounds)
    if L.partial:
        report.tags.append("partial-lts")
    memo: Dict[Formula, FrozenSet] = {}

    def holds(p: Term, phi: Formula) -> bool:
        return p in extension(L, phi, memo)

    for t in terms:
        for phi in formulas:
            mappings = engine.decompose(t, phi)
            for rho in _substitutions(t, universe):
                lhs = holds(apply(rho, t), phi)
                rhs = any(all(holds(rho[x], psi(x)) for x in rho) for psi in mappings)
                report.checked += 1
                if lhs != rhs:
                    report.mismatches.append(Mismatch(
                        str(t), str(phi), tuple((x, str(p)) for x, p in sorted(rho.items())), lhs, rhs,
                    ))
    if engine.revisited:
        report.tags.append("revisits")
    log.info("decomposition theorem (dr=%s): %d checks, %d mismatches", dr, report.checked, len(report.mismatches))
    return report


# ============================================================
# Class preservation
# ============================================================

@dataclass(frozen=True)
class PreservationEntry:
    term: str
    formula: str
    variable: str
    psi: str
    semantic: bool
    syntactic: bool
    counterexample: Optional[str] = None


@dataclass
class PreservationReport:
    source_class: str
    target_class: str
    entries: List[PreservationEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.semantic for e in self.entries)

    def to_dict(self) -> Dict[str, object]:
        return {
            "classes": [self.source_class, self.target_class],
            "entries": [e.__dict__ for e in self.entries],
        }


def verify_class_preservation(
    P: TSS,
    markings: MarkingSet,
    classes: Tuple[str, str],
    terms: Sequence[Term],
    formulas: Sequence[Formula],
    samples: int = 50,
    max_states: int = 10,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> PreservationReport:
    """
    For phi in the source class, every psi(x) of t^-1_dr(phi) must not
    separate states equivalent under the target class's equivalence on
    random LTSs. For unrooted targets only variables occurring lambda-liquid
    in t are examined. Syntactic membership of normalize(psi(x)) is
    reported alongside.
    """
    source, target = parse_class(classes[0]), parse_class(classes[1])
    report = PreservationReport(source, target)
    kind: EquivalenceKind = CLASS_KINDS[target]
    rooted_target = target in (O_RD, O_RW)
    engine = Decomposer(P, markings.gamma, dr=True, bounds=bounds)
    rng = random.Random(bounds.seed)

    actions = tuple(a for a in P.actions if a != TAU) or ("a",)
    battery: List[Tuple[LTS, object]] = []
    for _ in range(samples):
        L = random_lts(rng, max_states, actions)
        battery.append((L, bisimilarity(L, kind)))

    for t in terms:
        for phi in formulas:
            if not in_class(phi, source):
                continue
            for psi in engine.decompose(t, phi):
                for x in sorted(variables(t)):
                    if not rooted_target:
                        occ = occurrence_liquidity(t, x, markings.lam)
                        if not occ or not all(liquid for _, liquid in occ):
                            continue
                    formula = psi(x)
                    cex = _separating_pair(formula, battery)
                    report.entries.append(PreservationEntry(
                        str(t), str(phi), x, str(formula),
                        semantic=cex is None,
                        syntactic=in_class(normalize(formula), target),
                        counterexample=cex,
                    ))
    return report


def _separating_pair(phi: Formula, battery) -> Optional[str]:
    for n, (L, partition) in enumerate(battery):
        if not actions_of(phi) <= L.alphabet:
            continue
        ext = extension(L, phi)
        for block in partition.blocks:
            inside = [s for s in block if s in ext]
            if inside and len(inside) != len(block):
                outside = next(s for s in block if s not in ext)
                return f"sample {n}: states {inside[0]} and {outside}"
    return None
