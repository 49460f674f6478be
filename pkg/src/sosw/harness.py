# src/sosw/harness.py

"""
Brute-force harnesses over bundled specs: congruence testing by context
enumeration, ruloid correspondence, delayed conclusions, and the bundled
expected-verdict suite driven by specs/suite.yaml.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import yaml

from .decomposition import verify_decomposition_theorem
from .dsl import parse_spec, parse_term, print_spec
from .equivalence import STRONG, EquivalenceKind, as_kind, bisimilarity, rooted_related
from .errors import SoswCLIError
from .formats import PASS, check_format, check_negative_stable
from .modal import CLASS_KINDS, Formula, distinguishing_formula, parse_formula, satisfies
from .ruloids import free_variable_universe, ruloids_for
from .semantics import LTS, generate_lts
from .settings import DEFAULT_BOUNDS, Bounds
from .terms import App, Term, Var, apply, closed_terms, open_terms, term_key, variables
from .tss import TSS, classify, stable_negatives

log = logging.getLogger(__name__)

SPEC_PACKAGE = "sosw.specs"


def class_for(kind: EquivalenceKind) -> Optional[str]:
    """The formula class characterising `kind`; branching has none."""
    for name, k in CLASS_KINDS.items():
        if k == kind:
            return name
    return None


# ============================================================
# Congruence
# ============================================================

@dataclass(frozen=True)
class Violation:
    context: Term
    rho: Tuple[Tuple[str, Term], ...]
    rho_prime: Tuple[Tuple[str, Term], ...]
    left: Term
    right: Term
    witness: Optional[Formula]

    def to_dict(self) -> Dict[str, object]:
        return {
            "context": str(self.context),
            "rho": {x: str(p) for x, p in self.rho},
            "rho_prime": {x: str(p) for x, p in self.rho_prime},
            "left": str(self.left),
            "right": str(self.right),
            "witness": None if self.witness is None else str(self.witness),
        }

    def __str__(self) -> str:
        w = f"  witness {self.witness}" if self.witness is not None else ""
        return f"{self.left} vs {self.right} in context {self.context}{w}"


@dataclass
class CongruenceReport:
    kind: EquivalenceKind
    depth: int
    pairs: int = 0
    violations: List[Violation] = field(default_factory=list)
    partial: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": str(self.kind),
            "depth": self.depth,
            "pairs": self.pairs,
            "partial": self.partial,
            "violations": [v.to_dict() for v in self.violations],
        }


def contexts(
    P: TSS,
    depth: int,
    multi_hole: bool = False,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> List[Term]:
    """
    Univariate open terms up to `depth`; single-hole unless multi_hole.
    Single-hole contexts take their closed arguments up to strong
    bisimilarity (see closed_representatives).
    """
    if multi_hole:
        out = open_terms(P.signature, depth, univariate=True, max_variables=3)
        return [t for t in out if variables(t)]
    reps = closed_representatives(P, depth - 1, bounds)
    hole = Var("x1")
    level: List[Term] = [hole]
    for k in range(depth):
        grown: List[Term] = list(level)
        for name, ar in P.signature.functions():
            for i in range(ar):
                for inner in level:
                    for others in itertools.product(reps[k], repeat=ar - 1):
                        args = list(others)
                        args.insert(i, inner)
                        grown.append(App(name, tuple(args)))
        level = list(dict.fromkeys(grown))
    return sorted(level, key=term_key)


def closed_representatives(P: TSS, depth: int, bounds: Bounds = DEFAULT_BOUNDS) -> List[List[Term]]:
    """
    reps[k]: closed terms of depth <= k, one per strong bisimilarity class.
    Strong bisimilarity is a congruence for ntyft/ntyxt rules, so a context
    built from representatives stands for every context it abbreviates.
    Any other rule shape, or a partial LTS, keeps every closed term.
    """
    levels = [closed_terms(P.signature, k) for k in range(depth + 1)]
    if not levels:
        return []
    shapes = [classify(r) for r in P.rules]
    if not all(c.ntyft or c.ntyxt for c in shapes):
        return levels
    L = generate_lts(P, levels[-1], bounds=bounds)
    if L.partial:
        return levels
    strong = bisimilarity(L, EquivalenceKind(STRONG), method="saturation")
    out: List[List[Term]] = []
    for terms in levels:
        picked: Dict[int, Term] = {}
        for t in terms:
            picked.setdefault(strong.block_of[t], t)
        out.append(list(picked.values()))
    log.debug("closed representatives per depth: %s", [len(r) for r in out])
    return out


def _substitutions(xs: Sequence[str], base: Sequence[Term]) -> Iterator[Dict[str, Term]]:
    for combo in itertools.product(base, repeat=len(xs)):
        yield dict(zip(xs, combo))


class _Relation:
    """Equivalence of one kind on one LTS; rooted pairs are decided on demand."""

    def __init__(self, L: LTS, kind: EquivalenceKind):
        self.L = L
        self.kind = kind
        self.unrooted = bisimilarity(L, kind.unrooted, method="saturation")
        self.memo: Dict[Tuple[Term, Term], bool] = {}

    def __call__(self, p: Term, q: Term) -> bool:
        if p == q:
            return True
        if not self.kind.rooted:
            return self.unrooted.same(p, q)
        key = (p, q) if term_key(p) <= term_key(q) else (q, p)
        if key not in self.memo:
            self.memo[key] = rooted_related(self.L, p, q, self.kind, self.unrooted)
        return self.memo[key]


def _related_substitutions(
    xs: Sequence[str],
    base: Sequence[Term],
    related,
) -> List[Tuple[Dict[str, Term], Dict[str, Term]]]:
    subs = list(_substitutions(xs, base))
    return [
        (rho, rho2) for rho, rho2 in itertools.combinations(subs, 2)
        if all(related(rho[x], rho2[x]) for x in xs)
    ]


def congruence_check(
    P: TSS,
    kind,
    depth: Optional[int] = None,
    base: Optional[Sequence[Term]] = None,
    multi_hole: bool = False,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> CongruenceReport:
    """
    For every context t and closed substitutions rho, rho' over the base
    processes with rho(x) ~ rho'(x) for all x, test rho(t) ~ rho'(t).
    Failures carry a distinguishing formula that is re-checked on both
    sides before being reported.

    Only contexts filled by some related pair are generated, and each
    context gets its own LTS.
    """
    kind = as_kind(kind)
    depth = bounds.context_depth if depth is None else depth
    base = list(base if base is not None else P.base)
    if not base:
        raise SoswCLIError("E020", f"{P.name} declares no base processes and none were given")
    report = CongruenceReport(kind, depth)

    base_lts = generate_lts(P, base, bounds=bounds)
    report.partial = base_lts.partial
    on_base = _Relation(base_lts, kind)
    ctxs = contexts(P, depth, multi_hole, bounds)
    cls = class_for(kind)
    log.info("congruence %s on %s: %d contexts", kind, P.name, len(ctxs))

    for t in ctxs:
        xs = sorted(variables(t))
        pairs = _related_substitutions(xs, base, on_base)
        if not pairs:
            continue
        filled = [(rho, rho2, apply(rho, t), apply(rho2, t)) for rho, rho2 in pairs]
        L = generate_lts(P, [s for _, _, l, r in filled for s in (l, r)], bounds=bounds)
        report.partial = report.partial or L.partial
        related = _Relation(L, kind)
        for rho, rho2, left, right in filled:
            report.pairs += 1
            if related(left, right):
                continue
            witness = distinguishing_formula(L, left, right, cls) if cls else None
            if witness is not None and satisfies(L, left, witness) == satisfies(L, right, witness):
                raise AssertionError(f"witness {witness} does not separate {left} and {right}")
            report.violations.append(Violation(
                t, tuple(sorted(rho.items())), tuple(sorted(rho2.items())), left, right, witness,
            ))
    return report


# ============================================================
# Ruloid correspondence
# ============================================================

@dataclass(frozen=True)
class Discrepancy:
    source: str
    label: str
    instance: str
    target: str
    direction: str   # "lts-only" | "ruloid-only"

    def __str__(self) -> str:
        return f"{self.instance} -{self.label}-> {self.target} ({self.direction}, source {self.source})"


def _premise_instances(rule, rho: Mapping[str, Term], L: LTS, delayed: bool) -> Iterator[Dict[str, Term]]:
    """Extensions of rho to premise targets that satisfy the ruloid's premises in L."""
    positives = rule.positive_premises
    negatives = stable_negatives(rule.premises) if delayed else rule.negative_premises
    for p in negatives:
        if L.post(apply(rho, p.lhs), p.label):
            return
    choices = []
    for p in positives:
        lhs = apply(rho, p.lhs)
        post = L.eps_then(lhs, p.label) if delayed else L.post(lhs, p.label)
        choices.append(sorted(post, key=str))
    for combo in itertools.product(*choices):
        sigma = dict(rho)
        ok = True
        for p, q in zip(positives, combo):
            y = p.rhs.name
            if y in sigma and sigma[y] != q:
                ok = False
                break
            sigma[y] = q
        if ok:
            yield sigma


def _source_terms(P: TSS, depth: int, max_variables: int = 4) -> List[Term]:
    """
    Linear constant-free open terms up to `depth`. Constants reach the
    sources through the universe the variables range over.
    """
    return open_terms(P.signature, depth, univariate=True, max_variables=max_variables, with_constants=False)


def _source_instances(
    P: TSS,
    t: Term,
    universe: Sequence[Term],
    bounds: Bounds,
) -> Tuple[List[Dict[str, Term]], LTS]:
    """Closed substitutions for t over the universe and the LTS of those instances alone."""
    subs = list(_substitutions(sorted(variables(t)), universe))
    L = generate_lts(P, list(universe) + [apply(rho, t) for rho in subs], bounds=bounds)
    return subs, L


def check_ruloid_correspondence(
    P: TSS,
    depth: int = 2,
    universe: Optional[Sequence[Term]] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> List[Discrepancy]:
    """
    rho(t) -a-> q in the generated LTS iff some ruloid H/t -a-> u and some
    extension sigma of rho satisfy H with sigma(u) = q.
    """
    universe = list(universe if universe is not None else P.base)
    free_universe = free_variable_universe(P, bounds)

    out: List[Discrepancy] = []
    sources = _source_terms(P, depth)
    for t in sources:
        subs, L = _source_instances(P, t, universe, bounds)
        for label in P.labels:
            rs = ruloids_for(P, t, label, bounds=bounds, universe=free_universe).require_complete()
            for rho in subs:
                inst = apply(rho, t)
                derived = set()
                for ruloid in rs:
                    for sigma in _premise_instances(ruloid.rule, rho, L, delayed=False):
                        derived.add(apply(sigma, ruloid.rule.target))
                actual = set(L.post(inst, label))
                for q in sorted(actual - derived, key=str):
                    out.append(Discrepancy(str(t), label, str(inst), str(q), "lts-only"))
                for q in sorted(derived - actual, key=str):
                    out.append(Discrepancy(str(t), label, str(inst), str(q), "ruloid-only"))
    log.info("ruloid correspondence on %s: %d sources, %d discrepancies", P.name, len(sources), len(out))
    return out


def check_delayed_conclusions(
    P: TSS,
    depth: int = 2,
    universe: Optional[Sequence[Term]] = None,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> List[Discrepancy]:
    """
    Every ruloid instance whose positive premises hold as =eps=> -b->
    steps and whose stable negative premises hold must give
    rho(t) =eps=> -a-> rho(u).
    """
    universe = list(universe if universe is not None else P.base)
    free_universe = free_variable_universe(P, bounds)

    out: List[Discrepancy] = []
    for t in _source_terms(P, depth):
        subs, L = _source_instances(P, t, universe, bounds)
        for label in P.labels:
            rs = ruloids_for(P, t, label, bounds=bounds, universe=free_universe).require_complete()
            for rho in subs:
                inst = apply(rho, t)
                reach = L.eps_then(inst, label) if inst in L else frozenset()
                for ruloid in rs:
                    for sigma in _premise_instances(ruloid.rule, rho, L, delayed=True):
                        q = apply(sigma, ruloid.rule.target)
                        if q not in reach:
                            out.append(Discrepancy(str(t), label, str(inst), str(q), "not-delayed"))
    return sorted(set(out), key=str)


# ============================================================
# Bundled suite
# ============================================================

def spec_text(name: str) -> str:
    fname = name if name.endswith(".tss") else f"{name}.tss"
    try:
        return resources.files(SPEC_PACKAGE).joinpath(fname).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SoswCLIError("E017", f"No bundled spec '{name}'")


def load_bundled_spec(name: str) -> TSS:
    return parse_spec(spec_text(name))


def bundled_spec_names() -> List[str]:
    root = resources.files(SPEC_PACKAGE)
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".tss"))


def load_suite_table(text: Optional[str] = None) -> Dict[str, dict]:
    if text is None:
        text = resources.files(SPEC_PACKAGE).joinpath("suite.yaml").read_text(encoding="utf-8")
    try:
        table = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise SoswCLIError("E020", f"suite.yaml is not valid YAML: {e}")
    if not isinstance(table, dict) or not all(isinstance(v, dict) for v in table.values()):
        raise SoswCLIError("E020", "suite.yaml must map spec names to expectation tables")
    return table


@dataclass
class SuiteOutcome:
    spec: str
    check: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual

    def to_dict(self) -> Dict[str, object]:
        return {"spec": self.spec, "check": self.check, "expected": self.expected,
                "actual": self.actual, "ok": self.ok}


@dataclass
class SuiteSummary:
    outcomes: List[SuiteOutcome] = field(default_factory=list)

    @property
    def failures(self) -> List[SuiteOutcome]:
        return [o for o in self.outcomes if not o.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, object]:
        return {"ok": self.ok, "outcomes": [o.to_dict() for o in self.outcomes]}


def _depth_and_universe(P: TSS, item) -> Tuple[int, Optional[List[Term]]]:
    """A suite item is a bare depth or {depth, universe}; the universe defaults to the base."""
    if isinstance(item, Mapping):
        universe = item.get("universe")
        terms = [parse_term(s, P.signature) for s in universe] if universe else None
        return int(item.get("depth", 1)), terms
    return int(item), None


def _run_entry(name: str, entry: Mapping, bounds: Bounds) -> List[SuiteOutcome]:
    P = load_bundled_spec(entry.get("file", name))
    candidate = entry.get("candidate")
    markings = P.marking_set(candidate)
    out: List[SuiteOutcome] = []

    out.append(SuiteOutcome(name, "round-trip", True, parse_spec(print_spec(P)) == P))

    for fmt, expected in (entry.get("formats") or {}).items():
        verdict = check_format(P, fmt, markings, bounds)
        out.append(SuiteOutcome(name, f"format {fmt}", expected, verdict.result))

    for fmt, conditions in (entry.get("failing_conditions") or {}).items():
        verdict = check_format(P, fmt, markings, bounds)
        failing = sorted({w.condition for w in verdict.witnesses})
        out.append(SuiteOutcome(name, f"failing conditions {fmt}", sorted(conditions), failing))

    if entry.get("negative_stable"):
        results = {check_negative_stable(r).result for r in P.rules}
        out.append(SuiteOutcome(name, "negative-stable rules", [PASS], sorted(results)))

    for item in entry.get("congruence") or ():
        kind = EquivalenceKind.parse(item["kind"])
        report = congruence_check(P, kind, depth=item.get("depth", bounds.context_depth), bounds=bounds)
        out.append(SuiteOutcome(name, f"congruence {kind}", item.get("violations", False), not report.ok))
        if "pair" in item:
            left, right = (parse_term(s, P.signature) for s in item["pair"])
            found = any({v.left, v.right} == {left, right} for v in report.violations)
            out.append(SuiteOutcome(name, f"violation {item['pair'][0]} / {item['pair'][1]}", True, found))
        if item.get("tested"):
            out.append(SuiteOutcome(name, f"related pairs tested {kind}", True, report.pairs > 0))

    for key, check, label in (
        ("correspondence", check_ruloid_correspondence, "ruloid correspondence"),
        ("delayed", check_delayed_conclusions, "delayed conclusions"),
    ):
        if entry.get(key):
            depth, universe = _depth_and_universe(P, entry[key])
            found = check(P, depth, universe, bounds=bounds)
            out.append(SuiteOutcome(name, f"{label} (depth {depth})", 0, len(found)))

    decomp = entry.get("decomposition")
    if decomp:
        terms = [parse_term(s, P.signature) for s in decomp["terms"]]
        formulas = [parse_formula(s) for s in decomp["formulas"]]
        report = verify_decomposition_theorem(
            P, terms, formulas, P.base, dr=decomp.get("dr", True), gamma=markings.gamma, bounds=bounds,
        )
        out.append(SuiteOutcome(name, "decomposition theorem", 0, len(report.mismatches)))
    return out


def run_bundled_suite(
    bounds: Bounds = DEFAULT_BOUNDS,
    only: Optional[Sequence[str]] = None,
    table: Optional[Mapping[str, dict]] = None,
) -> SuiteSummary:
    table = load_suite_table() if table is None else table
    summary = SuiteSummary()
    for name in sorted(table):
        if only and name not in only:
            continue
        log.info("suite: %s", name)
        summary.outcomes.extend(_run_entry(name, table[name], bounds))
    return summary

