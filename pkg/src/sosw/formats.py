# src/sosw/formats.py

"""
Congruence format checkers.

Per-rule conditions (rooted branching / eta safety, condition 5, negative
stability), the delayability family (plain, manifest, tau-pollable),
manifest delay resistance, minimal predicate inference, and check_format,
which combines them into a FormatVerdict for one named format.

Formats that need full delay resistance can only be *passed* through the
manifest route; a ruloid-level search can refute delay resistance but
never establish it.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import SoswCLIError, SubsetBlowup
from .ruloids import (
    build_pipeline,
    free_variable_universe,
    linearly_provable,
    match_rule_into,
    rules_matching,
    ruloids_for,
    search_linear_proofs,
    to_decent_ntyft,
)
from .settings import DEFAULT_BOUNDS, Bounds
from .terms import (
    App,
    ArgumentMarking,
    Path,
    Signature,
    Term,
    Var,
    depth,
    fresh_variables,
    occurrence_liquidity,
    universal_marking,
    var_occurrences,
    variables,
)
from .tss import (
    TAU,
    Literal,
    MarkingSet,
    Rule,
    TSS,
    classify,
    is_gamma_patient,
    neg,
    patience_rule,
    patience_rules,
    pos,
    ready_simulation_format,
    stable_negatives,
)

log = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

FORMATS = (
    "ready-simulation",
    "rooted-branching",
    "rooted-eta",
    "rooted-delay",
    "delay",
    "rooted-weak",
    "weak",
    "manifest-rooted-delay",
    "manifest-rooted-weak",
    "syntactic-delay",
    "syntactic-weak",
    "syntactic-rooted-delay",
    "syntactic-rooted-weak",
)


# ============================================================
# Verdict types
# ============================================================

@dataclass(frozen=True)
class Witness:
    rule: str
    condition: str
    detail: str

    def to_dict(self) -> Dict[str, str]:
        return {"rule": self.rule, "condition": self.condition, "detail": self.detail}


@dataclass(frozen=True)
class CheckResult:
    result: str
    witnesses: Tuple[Witness, ...] = ()

    @property
    def ok(self) -> bool:
        return self.result == PASS


@dataclass(frozen=True)
class FormatVerdict:
    format: str
    result: str
    witnesses: Tuple[Witness, ...] = ()
    predicates: Mapping[str, List[str]] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "format": self.format,
            "result": self.result,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "predicates": dict(self.predicates),
            "notes": list(self.notes),
        }


def _combine(parts: Iterable[CheckResult]) -> CheckResult:
    witnesses: List[Witness] = []
    results = set()
    for part in parts:
        results.add(part.result)
        witnesses.extend(part.witnesses)
    if FAIL in results:
        return CheckResult(FAIL, tuple(w for w in witnesses))
    if INCONCLUSIVE in results:
        return CheckResult(INCONCLUSIVE, tuple(witnesses))
    return CheckResult(PASS)


def _name(r: Rule) -> str:
    return r.name or str(r)


# ============================================================
# Occurrence helpers
# ============================================================

def _frames(t: Term, path: Path) -> List[Tuple[str, int]]:
    out = []
    node = t
    for i in path:
        assert isinstance(node, App)
        out.append((node.symbol, i))
        node = node.args[i - 1]
    return out


def _premise_lhs_occurrences(r: Rule, x: str, m: ArgumentMarking) -> List[Tuple[Literal, bool]]:
    out = []
    for p in r.premises:
        for _, liquid in occurrence_liquidity(p.lhs, x, m):
            out.append((p, liquid))
    return out


def _rule_occurrences(r: Rule, x: str, m: ArgumentMarking) -> List[Tuple[str, bool]]:
    """Every occurrence of x in r: source, target and premise terms."""
    out = [("source", liquid) for _, liquid in occurrence_liquidity(r.source, x, m)]
    if r.target is not None:
        out += [("target", liquid) for _, liquid in occurrence_liquidity(r.target, x, m)]
    for p in r.premises:
        out += [(str(p), liquid) for _, liquid in occurrence_liquidity(p.lhs, x, m)]
        if p.rhs is not None:
            out += [(str(p), liquid) for _, liquid in occurrence_liquidity(p.rhs, x, m)]
    return out


def _symbols_of(r: Rule) -> Signature:
    seen: Dict[str, int] = {}

    def walk(t: Optional[Term]) -> None:
        if isinstance(t, App):
            seen[t.symbol] = len(t.args)
            for a in t.args:
                walk(a)

    for lit in r.premises + (r.conclusion,):
        walk(lit.lhs)
        walk(lit.rhs)
    return Signature.of(seen.items())


def is_patient_rule(r: Rule, gamma: ArgumentMarking) -> bool:
    """Irredundantly provable from the gamma-patience rules."""
    if not r.standard or r.label != TAU or len(r.premises) != 1 or not r.premises[0].positive:
        return False
    sig = _symbols_of(r)
    restricted = ArgumentMarking(gamma.name, frozenset(fi for fi in gamma.liquid if fi[0] in sig))
    patience = TSS("patience", sig, (), patience_rules(sig, restricted))
    return linearly_provable(r, patience, depth(r.source) + 1) is not None


# ============================================================
# Minimal predicates
# ============================================================

def infer_minimal_predicates(P: TSS) -> Tuple[ArgumentMarking, ArgumentMarking]:
    """
    The least aleph and lambda: lambda generated by the first two
    branching-safety conditions, aleph by the third.
    """
    lam: Set[Tuple[str, int]] = set()
    aleph: Set[Tuple[str, int]] = set()
    changed = True
    while changed:
        changed = False
        L = ArgumentMarking("lambda", frozenset(lam))
        A = ArgumentMarking("aleph", frozenset(aleph))
        for r in P.rules:
            t = r.source
            need_l: List[Tuple[str, int]] = []
            if r.standard:
                for p in r.positive_premises:
                    for name, path in var_occurrences(r.target):
                        if isinstance(p.rhs, Var) and name == p.rhs.name:
                            need_l += _frames(r.target, path)
            for x in sorted(variables(t)):
                if all(liquid for _, liquid in occurrence_liquidity(t, x, L)):
                    terms = [p.lhs for p in r.premises]
                    if r.target is not None:
                        terms.append(r.target)
                    for term in terms:
                        for name, path in var_occurrences(term):
                            if name == x:
                                need_l += _frames(term, path)
            need_a: List[Tuple[str, int]] = []
            for x in sorted(variables(t)):
                if any(liquid for _, liquid in _premise_lhs_occurrences(r, x, A)):
                    for name, path in var_occurrences(t):
                        if name == x:
                            need_a += _frames(t, path)
            if set(need_l) - lam:
                lam |= set(need_l)
                changed = True
            if set(need_a) - aleph:
                aleph |= set(need_a)
                changed = True
    return ArgumentMarking("aleph0", frozenset(aleph)), ArgumentMarking("lambda0", frozenset(lam))


# ============================================================
# Per-rule safety conditions
# ============================================================

def check_rbb_safe(r: Rule, aleph: ArgumentMarking, lam: ArgumentMarking, eta: bool = False) -> CheckResult:
    """
    Rooted branching bisimulation safety (eta=False) or rooted eta
    safety (eta=True, condition 1' instead of 1). Non-standard rules are
    held to conditions 2 and 3 only.
    """
    name = _name(r)
    t = r.source
    gamma = aleph.intersect(lam)
    fails: List[Witness] = []

    if r.standard:
        first = gamma if eta else lam
        tag = "1'" if eta else "1"
        for p in r.positive_premises:
            if not isinstance(p.rhs, Var):
                continue
            y = p.rhs.name
            frozen = [path for path, liquid in occurrence_liquidity(r.target, y, first) if not liquid]
            if frozen:
                kind = "aleph&lambda" if eta else "lambda"
                fails.append(Witness(name, tag, f"{y} occurs {kind}-frozen in the target {r.target}"))

    for x in sorted(variables(t)):
        in_t = occurrence_liquidity(t, x, lam)
        if all(liquid for _, liquid in in_t):
            bad = [where for where, liquid in _rule_occurrences(r, x, lam) if not liquid]
            if bad:
                fails.append(Witness(name, "2", f"{x} is lambda-liquid in the source but lambda-frozen in {bad[0]}"))
        in_t_aleph = occurrence_liquidity(t, x, aleph)
        if all(not liquid for _, liquid in in_t_aleph):
            hot = [p for p, liquid in _premise_lhs_occurrences(r, x, aleph) if liquid]
            if hot:
                fails.append(Witness(name, "3", f"{x} is aleph-frozen in the source but aleph-liquid in {hot[0]}"))

    if r.standard:
        for x in sorted(variables(t)):
            aleph_liquid = [path for path, liquid in occurrence_liquidity(t, x, aleph) if liquid]
            if len(aleph_liquid) != 1 or not _path_liquid(t, aleph_liquid[0], lam):
                continue
            hot = [p for p, liquid in _premise_lhs_occurrences(r, x, aleph) if liquid]
            if len(hot) > 1:
                fails.append(Witness(name, "4", f"{x} has {len(hot)} aleph-liquid occurrences in the premises"))
                continue
            if hot and not hot[0].positive:
                fails.append(Witness(name, "4", f"{x} occurs aleph-liquid in the negative premise {hot[0]}"))
                continue
            if hot and hot[0].label == TAU and not is_patient_rule(r, gamma):
                fails.append(Witness(name, "4", f"tau-premise {hot[0]} on {x} but the rule is not aleph&lambda-patient"))

    return CheckResult(FAIL, tuple(fails)) if fails else CheckResult(PASS)


def _path_liquid(t: Term, path: Path, m: ArgumentMarking) -> bool:
    return all(m.is_liquid(f, i) for f, i in _frames(t, path))


def check_eta_safe(r: Rule, aleph: ArgumentMarking, lam: ArgumentMarking) -> CheckResult:
    return check_rbb_safe(r, aleph, lam, eta=True)


def check_condition5(r: Rule, aleph: ArgumentMarking, lam: ArgumentMarking) -> CheckResult:
    """A variable tested once Λ-liquid in the source and ℵ-liquid in a premise occurs nowhere else."""
    if not r.standard:
        return CheckResult(PASS)
    fails: List[Witness] = []
    for x in sorted(variables(r.source)):
        in_t = occurrence_liquidity(r.source, x, lam)
        if len(in_t) != 1 or not in_t[0][1]:
            continue
        hot = [p for p, liquid in _premise_lhs_occurrences(r, x, aleph) if liquid]
        if not hot:
            continue
        total = len(_rule_occurrences(r, x, lam))
        if total != 2:
            others = [where for where, _ in _rule_occurrences(r, x, lam) if where not in ("source", str(hot[0]))]
            where = others[0] if others else "the premises"
            fails.append(Witness(_name(r), "5", f"{x} is tested in {hot[0]} and also occurs in {where}"))
    return CheckResult(FAIL, tuple(fails)) if fails else CheckResult(PASS)


def check_negative_stable(r: Rule) -> CheckResult:
    present = set(r.premises)
    fails = [
        Witness(_name(r), "negative-stable", f"{p} without {neg(p.lhs, TAU)}")
        for p in r.negative_premises
        if neg(p.lhs, TAU) not in present
    ]
    return CheckResult(FAIL, tuple(fails)) if fails else CheckResult(PASS)


# ============================================================
# Delayability
# ============================================================

@dataclass(frozen=True)
class DelayResult:
    result: str
    h1: Optional[Rule] = None
    h2: Optional[Rule] = None

    @property
    def ok(self) -> bool:
        return self.result == PASS

    def describe(self) -> str:
        if self.h1 is None or self.h2 is None:
            return self.result
        return f"{self.h1}  then  {self.h2}"


# First rules H1 tried per premise by check_delayable
DELAY_CANDIDATE_LIMIT = 64


def _fresh_for(r: Rule, count: int = 1, prefix: str = "z") -> List[str]:
    return fresh_variables(r.variables(), count, prefix)


def check_delayable(
    premise: Literal,
    r: Rule,
    P: TSS,
    bounds: Bounds = DEFAULT_BOUNDS,
    manifest: bool = False,
    R: Optional[Sequence[Rule]] = None,
    limit: int = DELAY_CANDIDATE_LIMIT,
) -> DelayResult:
    """
    Find H1/t -tau-> v and H2/v -alpha-> u with
    H1 within (H minus the premise) plus w -tau-> z and
    H2 within (H minus the premise) plus z -beta-> y.
    With manifest=True the first rule must come from R (default P.rules)
    up to bijective renaming. Hitting `limit` first-rule candidates
    without a match is inconclusive, not a failure.
    """
    assert premise.positive and premise in r.premises
    z = Var(_fresh_for(r)[0])
    rest = tuple(p for p in r.premises if p != premise)
    allowed1 = rest + (pos(premise.lhs, TAU, z),)
    allowed2 = rest + (pos(z, premise.label, premise.rhs),)
    rigid = r.variables() | {z.name}
    truncated = False

    candidates: List[Rule] = []
    if manifest:
        for hit in rules_matching(R if R is not None else P.rules, r.source, TAU, None, allowed1):
            candidates.append(hit)
    else:
        v = Var(_fresh_for(r, 1, prefix="v")[0])
        search = search_linear_proofs(
            Literal(r.source, TAU, v), allowed1, P, bounds.proof_depth, rigid=rigid, limit=limit
        )
        truncated = search.truncated or search.capped
        for used, tree, _ in search.results:
            candidates.append(Rule(tuple(used), tree.literal))

    for h1 in candidates:
        v_term = h1.target
        rigid2 = rigid | variables(v_term)
        search = search_linear_proofs(
            Literal(v_term, r.label, r.target), allowed2, P, bounds.proof_depth, rigid=rigid2, limit=1
        )
        truncated = truncated or search.truncated
        if search.results:
            used, tree, _ = search.results[0]
            return DelayResult(PASS, h1, Rule(tuple(used), tree.literal))
    return DelayResult(INCONCLUSIVE if truncated else FAIL)


def check_pollable(premise: Literal, r: Rule, P: TSS, bounds: Bounds = DEFAULT_BOUNDS) -> DelayResult:
    """
    tau-pollability of a single positive premise: some rule with premises
    within (H minus the premise) plus w -tau-> z concludes t -alpha-> u or
    t -tau-> w' for some w'.
    """
    assert premise.positive and premise in r.premises
    z = Var(_fresh_for(r)[0])
    allowed = tuple(p for p in r.premises if p != premise) + (pos(premise.lhs, TAU, z),)
    rigid = r.variables() | {z.name}
    goals = [Literal(r.source, r.label, r.target)]
    if r.label != TAU:
        goals.append(Literal(r.source, TAU, Var(_fresh_for(r, 1, prefix="w")[0])))
    truncated = False
    for goal in goals:
        search = search_linear_proofs(goal, allowed, P, bounds.proof_depth, rigid=rigid, limit=1)
        truncated = truncated or search.truncated
        if search.results:
            used, tree, _ = search.results[0]
            return DelayResult(PASS, Rule(tuple(used), tree.literal))
    return DelayResult(INCONCLUSIVE if truncated else FAIL)


# ============================================================
# Manifest delay resistance
# ============================================================

def lambda_liquid_premises(r: Rule, lam: Optional[ArgumentMarking]) -> Tuple[Literal, ...]:
    """Premises whose left-hand side variables all occur lambda-liquid in the source."""
    if lam is None:
        return ()
    out = []
    for p in r.premises:
        names = variables(p.lhs)
        if all(
            (occ := occurrence_liquidity(r.source, x, lam)) and all(liquid for _, liquid in occ)
            for x in names
        ):
            out.append(p)
    return tuple(out)


def _m_tau(M: Sequence[Literal], avoid: Set[str]) -> Tuple[Literal, ...]:
    zs = fresh_variables(avoid, len(M), prefix="z")
    return tuple(pos(p.lhs, TAU, Var(z)) for p, z in zip(M, zs))


def _manifest_rule(
    r: Rule,
    R: Sequence[Rule],
    Pd: TSS,
    lam: Optional[ArgumentMarking],
    bounds: Bounds,
) -> Tuple[CheckResult, List[str]]:
    name = _name(r)
    notes: List[str] = []
    stable = check_negative_stable(r)
    if not stable.ok:
        return stable, notes
    liquid = set(lambda_liquid_premises(r, lam))
    delayable: List[Literal] = []
    undecided: List[Literal] = []
    for p in r.positive_premises:
        if p in liquid:
            continue
        res = check_delayable(p, r, Pd, bounds, manifest=True, R=R)
        if res.ok:
            delayable.append(p)
            notes.append(f"{name}: {p} manifestly delayable via {res.describe()}")
        else:
            undecided.append(p)
    if not undecided:
        return CheckResult(PASS), notes

    count = 2 ** len(undecided)
    if count > bounds.subset_cap:
        err = SubsetBlowup(name, count, bounds.subset_cap)
        log.warning("%s", err.msg)
        return CheckResult(INCONCLUSIVE, (Witness(name, "manifest", err.msg),)), notes
    avoid = set(r.variables())
    for k in range(len(undecided) + 1):
        for M in itertools.combinations(undecided, k):
            allowed = tuple(p for p in r.premises if p not in M) + _m_tau(M, avoid)
            hit = next(rules_matching(R, r.source, r.label, r.target, allowed), None)
            if hit is None:
                shown = "{" + ", ".join(str(p) for p in M) + "}"
                return CheckResult(FAIL, (Witness(name, "manifest", f"no rule r_M in R for M = {shown}"),)), notes
            if M:
                notes.append(f"{name}: r_M for {{{', '.join(str(p) for p in M)}}} is {hit}")
    return CheckResult(PASS), notes


def _decent(P: TSS, bounds: Bounds) -> TSS:
    universe = free_variable_universe(P, bounds)
    return to_decent_ntyft(P, universe)


def check_manifest_delay_resistance(
    P: TSS,
    lam: Optional[ArgumentMarking] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> FormatVerdict:
    """Every rule of the decent ntyft conversion of P is manifestly delay resistant (w.r.t. lam)."""
    Pd = _decent(P, bounds)
    parts: List[CheckResult] = []
    notes: List[str] = []
    for r in Pd.rules:
        if not r.standard:
            continue
        res, rule_notes = _manifest_rule(r, Pd.rules, Pd, lam, bounds)
        parts.append(res)
        notes.extend(rule_notes)
    total = _combine(parts)
    preds = {"lambda": sorted(f"{f}/{i}" for f, i in lam.liquid)} if lam is not None else {}
    return FormatVerdict("manifest-delay-resistance", total.result, total.witnesses, preds, tuple(notes))


# ============================================================
# Ruloid-level refutation of delay resistance
# ============================================================

def _refute_ruloid(rule: Rule, plus: TSS, bounds: Bounds) -> Optional[Witness]:
    """A witness when `rule` is certainly not delay resistant w.r.t. plus."""
    name = str(rule)
    allowed = tuple(rule.positive_premises) + stable_negatives(rule.premises)
    goal = rule.conclusion
    search = search_linear_proofs(goal, allowed, plus, bounds.proof_depth, rigid=rule.variables(), limit=1)
    if not search.results and not search.truncated:
        return Witness(name, "negative-delay-resistance", "no proof from the positive and stable negative premises")

    delayable: List[Literal] = []
    for p in rule.positive_premises:
        res = check_delayable(p, rule, plus, bounds)
        if res.result == INCONCLUSIVE:
            return None
        if res.ok:
            delayable.append(p)
    rest = [p for p in rule.positive_premises if p not in delayable]
    if 2 ** len(rest) > bounds.subset_cap:
        return None
    avoid = set(rule.variables())
    for k in range(1, len(rest) + 1):
        for M in itertools.combinations(rest, k):
            m_tau = _m_tau(M, avoid)
            allowed = tuple(p for p in rule.premises if p not in M) + m_tau
            rigid = rule.variables() | set().union(*(l.variables() for l in m_tau))
            search = search_linear_proofs(goal, allowed, plus, bounds.proof_depth, rigid=rigid, limit=1)
            if search.truncated:
                return None
            if not search.results:
                shown = ", ".join(str(p) for p in M)
                return Witness(name, "positive-delay-resistance", f"premises {{{shown}}} neither delayable nor replaceable by tau")
    return None


def refute_delay_resistance(P: TSS, bounds: Bounds = DEFAULT_BOUNDS) -> List[Witness]:
    """Linear ruloids for f(x1..xn) sources that are certainly not delay resistant."""
    pipe = build_pipeline(P, bounds, free_variable_universe(P, bounds))
    found: List[Witness] = []
    for f, _ in P.signature.functions():
        source = P.signature.generic(f)
        for label in P.labels:
            for ruloid in ruloids_for(P, source, label, bounds=bounds, linear_only=True,
                                      universe=free_variable_universe(P, bounds)):
                w = _refute_ruloid(ruloid.rule, pipe.plus, bounds)
                if w is not None:
                    found.append(w)
    return found


# ============================================================
# Named formats
# ============================================================

def _effective_markings(P: TSS, markings: Optional[MarkingSet], infer: bool) -> MarkingSet:
    ms = markings if markings is not None else P.marking_set()
    if infer:
        aleph0, lam0 = infer_minimal_predicates(P)
        ms = MarkingSet(aleph0, lam0, ms.delta)
    return ms


def _patience(P: TSS, gamma: ArgumentMarking) -> CheckResult:
    ok, missing = is_gamma_patient(P, gamma)
    if ok:
        return CheckResult(PASS)
    return CheckResult(FAIL, tuple(
        Witness(f"{f}/{i}", "patience", f"missing patience rule {patience_rule(P.signature, f, i)}")
        for f, i in missing
    ))


def _ready_sim(P: TSS) -> CheckResult:
    ok, violations = ready_simulation_format(P)
    if ok:
        return CheckResult(PASS)
    return CheckResult(FAIL, tuple(Witness(v.split(":")[0], "ready-simulation", v) for v in violations))


def _all_rules(P: TSS, check) -> CheckResult:
    return _combine(check(r) for r in P.rules)


def _delay_resistance(P: TSS, ms: MarkingSet, bounds: Bounds) -> Tuple[CheckResult, List[str]]:
    notes: List[str] = []
    smooth = _all_rules(P, lambda r: check_condition5(r, ms.aleph, ms.lam))
    if smooth.ok:
        v = check_manifest_delay_resistance(P, ms.lam, bounds)
        if v.result == PASS:
            notes.append("delay resistance: manifestly delay resistant w.r.t. lambda, with condition 5")
            notes.extend(v.notes)
            return CheckResult(PASS), notes
    v = check_manifest_delay_resistance(P, None, bounds)
    if v.result == PASS:
        notes.append("delay resistance: manifestly delay resistant")
        notes.extend(v.notes)
        return CheckResult(PASS), notes
    refuted = refute_delay_resistance(P, bounds)
    if refuted:
        return CheckResult(FAIL, tuple(refuted)), notes
    notes.append("delay resistance could not be established by the manifest criteria")
    return CheckResult(INCONCLUSIVE, (Witness(P.name, "delay-resistance", "undecided within bounds"),)), notes


def check_delay_resistance(
    P: TSS,
    markings: Optional[MarkingSet] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> FormatVerdict:
    """Delay resistance alone: manifest criteria first, then ruloid refutation."""
    ms = markings if markings is not None else P.marking_set()
    pre = _ready_sim(P)
    if not pre.ok:
        return FormatVerdict("delay-resistance", FAIL, pre.witnesses, ms.describe())
    res, notes = _delay_resistance(P, ms, bounds)
    return FormatVerdict("delay-resistance", res.result, res.witnesses, ms.describe(), tuple(notes))


def _syntactic_rooted(P: TSS, ms: MarkingSet, eta: bool) -> CheckResult:
    parts: List[CheckResult] = []
    gamma = ms.gamma
    for r in P.rules:
        cls = classify(r)
        if not (cls.decent and cls.nxytt):
            parts.append(CheckResult(FAIL, (Witness(_name(r), "S1", "not decent nxytt"),)))
    parts.append(_patience(P, gamma))
    for r in P.rules:
        parts.append(check_rbb_safe(r, ms.aleph, ms.lam, eta=eta))
        parts.append(check_negative_stable(r))
        parts.append(check_condition5(r, ms.aleph, ms.lam))
    for r in P.rules:
        parts.append(_syntactic_condition3(r, P, ms))
    parts.append(_syntactic_condition4(P, ms))
    return _combine(parts)


def _generic_source(t: Term) -> bool:
    if not isinstance(t, App):
        return False
    names = [a.name for a in t.args if isinstance(a, Var)]
    return len(names) == len(t.args) and len(set(names)) == len(names)


def _syntactic_condition3(r: Rule, P: TSS, ms: MarkingSet) -> CheckResult:
    if not r.standard or not _generic_source(r.source):
        return CheckResult(PASS)
    name = _name(r)
    src = r.source
    fails: List[Witness] = []
    for i, arg in enumerate(src.args, start=1):
        if ms.lam.is_liquid(src.symbol, i):
            continue
        for p in r.positive_premises:
            if p.lhs != arg:
                continue
            if p.label != r.label:
                fails.append(Witness(name, "S3a", f"premise {p} on lambda-frozen {src.symbol}/{i} has label {p.label}, not {r.label}"))
                continue
            rest = tuple(q for q in r.premises if q != p)
            tau_premise = pos(arg, TAU, p.rhs)
            found = False
            for cand in P.rules:
                hit = match_rule_into(cand, src, TAU, r.target, rest + (tau_premise,))
                if hit is not None and tau_premise in hit.premises:
                    found = True
                    break
            if not found:
                fails.append(Witness(name, "S3b", f"no tau-variant of the rule with premise {tau_premise}"))
            y = p.rhs.name
            delta = ms.delta_for(r.label)
            occ = occurrence_liquidity(r.target, y, delta)
            if len(occ) != 1 or not occ[0][1]:
                fails.append(Witness(name, "S3c", f"{y} must occur exactly once, {delta.name}-liquid, in {r.target}"))
    return CheckResult(FAIL, tuple(fails)) if fails else CheckResult(PASS)


def _syntactic_condition4(P: TSS, ms: MarkingSet) -> CheckResult:
    fails: List[Witness] = []
    for label in P.labels:
        delta = ms.delta_for(label)
        for f, i in sorted(delta.liquid):
            if not ms.gamma.is_liquid(f, i):
                fails.append(Witness(f"{f}/{i}", "S4", f"delta[{label}] is not contained in aleph&lambda"))
                continue
            src = P.signature.generic(f)
            y = Var(fresh_variables(variables(src), 1, prefix="y")[0])
            target = App(f, src.args[: i - 1] + (y,) + src.args[i:])
            premise = pos(src.args[i - 1], label, y)
            ok = any(
                (hit := match_rule_into(cand, src, label, target, (premise,))) is not None and len(hit.premises) == 1
                for cand in P.rules
            )
            if not ok:
                fails.append(Witness(f"{f}/{i}", "S4", f"missing rule {premise} |- {Literal(src, label, target)}"))
    return CheckResult(FAIL, tuple(fails)) if fails else CheckResult(PASS)


def check_format(
    P: TSS,
    format: str,
    markings: Optional[MarkingSet] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
    infer: bool = False,
) -> FormatVerdict:
    if format not in FORMATS:
        raise SoswCLIError("E014", f"Unknown format '{format}'; known: {', '.join(FORMATS)}")
    ms = _effective_markings(P, markings, infer)
    if format in ("delay", "weak", "syntactic-delay", "syntactic-weak"):
        ms = MarkingSet(ms.aleph, universal_marking(P.signature, "lambda"), ms.delta)
    eta = format.endswith("weak") or format == "rooted-eta"
    notes: List[str] = []

    parts: List[CheckResult] = [_ready_sim(P)]
    if format != "ready-simulation" and parts[0].ok:
        if format.startswith("syntactic-rooted"):
            parts.append(_syntactic_rooted(P, ms, eta))
        else:
            parts.append(_patience(P, ms.gamma))
            parts.append(_all_rules(P, lambda r: check_rbb_safe(r, ms.aleph, ms.lam, eta=eta)))
            if format.startswith(("manifest", "syntactic")):
                parts.append(_all_rules(P, lambda r: check_condition5(r, ms.aleph, ms.lam)))
            if format.startswith("manifest"):
                mv = check_manifest_delay_resistance(P, ms.lam, bounds)
                parts.append(CheckResult(mv.result, mv.witnesses))
                notes.extend(mv.notes)
            if format in ("rooted-delay", "delay", "rooted-weak", "weak"):
                prior = _combine(parts)
                if prior.result == FAIL:
                    notes.append("delay resistance not examined: structural conditions already fail")
                else:
                    dr, dr_notes = _delay_resistance(P, ms, bounds)
                    parts.append(dr)
                    notes.extend(dr_notes)
    total = _combine(parts)
    if total.result != PASS:
        ok, missing = is_gamma_patient(P, ms.gamma)
        for f, i in missing:
            notes.append(f"suggested patience rule: {patience_rule(P.signature, f, i)}")
    log.info("format %s for %s: %s", format, P.name, total.result)
    return FormatVerdict(format, total.result, total.witnesses, ms.describe(), tuple(notes))
