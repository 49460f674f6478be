# src/sosw/tss.py

"""
Literals, transition rules and transition system specifications, plus the
syntactic classifiers the formats are phrased in.

Provides:
  - Literal / Rule / MarkingSet / TSS.
  - classify(rule) -> RuleClassification (ntytt family, decency, ...).
  - stable_negatives, is_patience_rule, patience_rule, is_gamma_patient,
    ready_simulation_format.
  - canonical_rule: alpha-normal form used for deduplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .errors import SoswCLIError, UnknownActionError
from .terms import (
    App,
    ArgumentMarking,
    EMPTY_MARKING,
    Signature,
    Term,
    Var,
    apply,
    fresh_variable,
    is_univariate,
    render_term,
    variables,
    var_occurrences,
)


TAU = "tau"


# ============================================================
# Literals + rules
# ============================================================

@dataclass(frozen=True)
class Literal:
    lhs: Term
    label: str
    rhs: Optional[Term] = None   # None marks a negative literal

    @property
    def positive(self) -> bool:
        return self.rhs is not None

    def apply(self, sigma: Mapping[str, Term]) -> "Literal":
        rhs = None if self.rhs is None else apply(sigma, self.rhs)
        return Literal(apply(sigma, self.lhs), self.label, rhs)

    def variables(self) -> FrozenSet[str]:
        out = variables(self.lhs)
        if self.rhs is not None:
            out |= variables(self.rhs)
        return out

    def __str__(self) -> str:
        if self.rhs is None:
            return f"{render_term(self.lhs)} -{self.label}!->"
        return f"{render_term(self.lhs)} -{self.label}-> {render_term(self.rhs)}"


def pos(lhs: Term, label: str, rhs: Term) -> Literal:
    return Literal(lhs, label, rhs)


def neg(lhs: Term, label: str) -> Literal:
    return Literal(lhs, label, None)


def literal_key(lit: Literal) -> str:
    return str(lit)


@dataclass(frozen=True)
class Rule:
    premises: Tuple[Literal, ...]
    conclusion: Literal
    name: str = field(default="", compare=False)

    def __post_init__(self):
        unique = {literal_key(p): p for p in self.premises}
        object.__setattr__(self, "premises", tuple(unique[k] for k in sorted(unique)))

    @property
    def source(self) -> Term:
        return self.conclusion.lhs

    @property
    def target(self) -> Optional[Term]:
        return self.conclusion.rhs

    @property
    def label(self) -> str:
        return self.conclusion.label

    @property
    def standard(self) -> bool:
        return self.conclusion.positive

    @property
    def positive_premises(self) -> Tuple[Literal, ...]:
        return tuple(p for p in self.premises if p.positive)

    @property
    def negative_premises(self) -> Tuple[Literal, ...]:
        return tuple(p for p in self.premises if not p.positive)

    def premise_rhs_variables(self) -> FrozenSet[str]:
        return frozenset(
            p.rhs.name for p in self.premises if p.positive and isinstance(p.rhs, Var)
        )

    def variables(self) -> FrozenSet[str]:
        out = self.conclusion.variables()
        for p in self.premises:
            out |= p.variables()
        return out

    def apply(self, sigma: Mapping[str, Term]) -> "Rule":
        return Rule(tuple(p.apply(sigma) for p in self.premises), self.conclusion.apply(sigma), self.name)

    def named(self, name: str) -> "Rule":
        return replace(self, name=name)

    def __str__(self) -> str:
        prems = ", ".join(str(p) for p in self.premises)
        return f"{prems} |- {self.conclusion}" if prems else f"|- {self.conclusion}"


# ============================================================
# Classification
# ============================================================

@dataclass(frozen=True)
class RuleClassification:
    standard: bool
    positive: bool
    ntytt: bool
    ntyxt: bool
    ntyft: bool
    nxytt: bool
    xyntt: bool
    xynft: bool
    decent: bool
    has_lookahead: bool
    has_free_variables: bool

    def flags(self) -> List[str]:
        return [name for name, value in self.__dict__.items() if value is True]


def _distinct_variables(terms: Iterable[Term]) -> bool:
    names = []
    for t in terms:
        if not isinstance(t, Var):
            return False
        names.append(t.name)
    return len(names) == len(set(names))


def lookahead_variables(r: Rule) -> FrozenSet[str]:
    rhs = r.premise_rhs_variables()
    lhs = frozenset().union(*(variables(p.lhs) for p in r.premises)) if r.premises else frozenset()
    return rhs & lhs


def free_variables(r: Rule) -> FrozenSet[str]:
    bound = variables(r.source) | r.premise_rhs_variables()
    return r.variables() - bound


def classify(r: Rule) -> RuleClassification:
    positives = r.positive_premises
    rhs_terms = [p.rhs for p in positives]
    ntytt = _distinct_variables(rhs_terms) and not (
        {t.name for t in rhs_terms if isinstance(t, Var)} & variables(r.source)
    )
    src = r.source
    ntyxt = ntytt and isinstance(src, Var)
    ntyft = ntytt and isinstance(src, App) and _distinct_variables(src.args)
    nxytt = ntytt and all(isinstance(p.lhs, Var) for p in r.premises)
    xyntt = ntytt and all(isinstance(p.lhs, Var) for p in positives)
    xynft = ntyft and xyntt
    lookahead = bool(lookahead_variables(r))
    free = bool(free_variables(r))
    return RuleClassification(
        standard=r.standard,
        positive=not r.negative_premises,
        ntytt=ntytt,
        ntyxt=ntyxt,
        ntyft=ntyft,
        nxytt=nxytt,
        xyntt=xyntt,
        xynft=xynft,
        decent=not lookahead and not free,
        has_lookahead=lookahead,
        has_free_variables=free,
    )


def stable_negatives(premises: Iterable[Literal]) -> Tuple[Literal, ...]:
    """Negative premises w -a!-> for which w -tau!-> is also present."""
    premises = tuple(premises)
    tau_blocked = {p.lhs for p in premises if not p.positive and p.label == TAU}
    return tuple(p for p in premises if not p.positive and p.lhs in tau_blocked)


# ============================================================
# Patience
# ============================================================

def is_patience_rule(r: Rule, f: str, i: int) -> bool:
    if len(r.premises) != 1 or not r.standard or r.label != TAU:
        return False
    (prem,) = r.premises
    src = r.source
    if not prem.positive or prem.label != TAU:
        return False
    if not isinstance(src, App) or src.symbol != f or not 1 <= i <= len(src.args):
        return False
    if not _distinct_variables(src.args):
        return False
    y = prem.rhs
    if not isinstance(y, Var) or y in src.args or prem.lhs != src.args[i - 1]:
        return False
    expected = App(f, src.args[: i - 1] + (y,) + src.args[i:])
    return r.target == expected


def patience_rule(signature: Signature, f: str, i: int) -> Rule:
    src = signature.generic(f)
    y = Var(fresh_variable(variables(src), prefix="y"))
    target = App(f, src.args[: i - 1] + (y,) + src.args[i:])
    return Rule((Literal(src.args[i - 1], TAU, y),), Literal(src, TAU, target), name=f"patience_{f}_{i}")


def is_gamma_patient(P: "TSS", gamma: ArgumentMarking) -> Tuple[bool, List[Tuple[str, int]]]:
    missing = [
        (f, i) for f, i in sorted(gamma.liquid)
        if not any(is_patience_rule(r, f, i) for r in P.rules)
    ]
    return (not missing, missing)


def patience_rules(signature: Signature, gamma: ArgumentMarking) -> Tuple[Rule, ...]:
    return tuple(patience_rule(signature, f, i) for f, i in sorted(gamma.liquid))


def ready_simulation_format(P: "TSS") -> Tuple[bool, List[str]]:
    violations: List[str] = []
    for r in P.rules:
        cls = classify(r)
        label = r.name or str(r)
        if not (cls.ntyft or cls.ntyxt):
            if not cls.ntytt:
                reason = "positive premise right-hand sides are not distinct fresh variables"
            else:
                reason = "source is neither a variable nor f(x1..xn) with distinct variables"
            violations.append(f"{label}: not ntyft/ntyxt ({reason})")
        if cls.has_lookahead:
            names = ", ".join(sorted(lookahead_variables(r)))
            violations.append(f"{label}: lookahead through {names}")
    return (not violations, violations)


# ============================================================
# Alpha-normal form
# ============================================================

def _mask(lit: Literal, known: Mapping[str, Term]) -> str:
    """Printed form with not-yet-named variables hidden."""
    def hide(t: Term) -> str:
        masked = apply({n: Var("?") for n in variables(t) if n not in known}, apply(known, t))
        return render_term(masked)
    rhs = "" if lit.rhs is None else hide(lit.rhs)
    return f"{hide(lit.lhs)}|{lit.label}|{rhs}|{lit.positive}"


def canonical_rule(r: Rule, prefix: str = "v") -> Rule:
    """
    Rename variables by a fixed traversal: source left to right, then
    premises ordered by their shape, then the target.
    """
    names: Dict[str, Term] = {}

    def take(t: Optional[Term]) -> None:
        if t is None:
            return
        for n, _ in var_occurrences(t):
            if n not in names:
                names[n] = Var(f"{prefix}{len(names)}")

    take(r.source)
    pending = list(r.premises)
    while pending:
        pending.sort(key=lambda p: _mask(p, names))
        head = pending.pop(0)
        take(head.lhs)
        take(head.rhs)
    take(r.target)
    return Rule(tuple(p.apply(names) for p in r.premises), r.conclusion.apply(names), r.name)


def alpha_key(r: Rule) -> Tuple[Tuple[str, ...], str]:
    c = canonical_rule(r)
    return (tuple(str(p) for p in c.premises), str(c.conclusion))


# ============================================================
# Markings + TSS
# ============================================================

@dataclass(frozen=True)
class MarkingSet:
    aleph: ArgumentMarking = EMPTY_MARKING
    lam: ArgumentMarking = EMPTY_MARKING
    delta: Tuple[Tuple[str, ArgumentMarking], ...] = ()

    @property
    def gamma(self) -> ArgumentMarking:
        return self.aleph.intersect(self.lam, "aleph&lambda")

    def delta_for(self, label: str) -> ArgumentMarking:
        for name, m in self.delta:
            if name == label:
                return m
        for name, m in self.delta:
            if name == "*":
                return m
        return ArgumentMarking(f"delta[{label}]")

    def describe(self) -> Dict[str, List[str]]:
        out = {
            "aleph": [f"{f}/{i}" for f, i in sorted(self.aleph.liquid)],
            "lambda": [f"{f}/{i}" for f, i in sorted(self.lam.liquid)],
        }
        for name, m in self.delta:
            out[f"delta[{name}]"] = [f"{f}/{i}" for f, i in sorted(m.liquid)]
        return out


@dataclass(frozen=True)
class TSS:
    name: str
    signature: Signature
    actions: Tuple[str, ...]
    rules: Tuple[Rule, ...]
    markings: Tuple[Tuple[str, MarkingSet], ...] = ()
    base: Tuple[Term, ...] = ()

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.actions + (TAU,)

    @cached_property
    def _by_head(self) -> Dict[Tuple[Optional[str], str], Tuple[Rule, ...]]:
        out: Dict[Tuple[Optional[str], str], List[Rule]] = {}
        for r in self.rules:
            head = r.source.symbol if isinstance(r.source, App) else None
            out.setdefault((head, r.label), []).append(r)
        return {k: tuple(v) for k, v in out.items()}

    def rules_for(self, symbol: Optional[str], label: str) -> Tuple[Rule, ...]:
        """Rules whose source is headed by `symbol` (None: variable source)."""
        return self._by_head.get((symbol, label), ())

    def candidates(self) -> List[str]:
        return [name for name, _ in self.markings]

    def marking_set(self, name: Optional[str] = None) -> MarkingSet:
        if not self.markings:
            if name is None:
                return MarkingSet()
            raise SoswCLIError("E016", f"No marking candidate '{name}' (spec declares none)")
        if name is None:
            return self.markings[0][1]
        for cand, ms in self.markings:
            if cand == name:
                return ms
        raise SoswCLIError("E016", f"No marking candidate '{name}'; known: {', '.join(self.candidates())}")

    def with_rules(self, rules: Iterable[Rule], name: Optional[str] = None) -> "TSS":
        return replace(self, rules=tuple(rules), name=name or self.name)

    def without_rule(self, rule_name: str) -> "TSS":
        return self.with_rules(r for r in self.rules if r.name != rule_name)

    def validate(self) -> None:
        for r in self.rules:
            for lit in r.premises + (r.conclusion,):
                self.signature.check(lit.lhs)
                if lit.rhs is not None:
                    self.signature.check(lit.rhs)
                if lit.label not in self.labels:
                    raise UnknownActionError(lit.label)
        for _, ms in self.markings:
            ms.aleph.validate(self.signature)
            ms.lam.validate(self.signature)
            for label, m in ms.delta:
                if label not in self.labels and label != "*":
                    raise UnknownActionError(label)
                m.validate(self.signature)
        for t in self.base:
            self.signature.check(t)


def univariate_sources(rules: Iterable[Rule]) -> bool:
    return all(is_univariate(r.source) for r in rules)
