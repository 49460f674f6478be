# src/sosw/errors.py

"""
Error handling and error-code registry for the SOS workbench.

Provides:
  - ErrorInfo: structured metadata for each error code.
  - ERROR_REGISTRY: mapping from code -> ErrorInfo.
  - SoswError: base exception type for library-level errors.
  - SoswCLIError: exception type for coded errors (CLI and library).
  - one SoswCLIError subclass per named failure of the engine
    (ParseError, UniverseEscape, BoundExceeded, ...).
  - helper functions to format errors for CLI and help screens.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Optional


# ============================================================
# Base error types
# ============================================================

class SoswError(Exception):
    """Base exception for the sosw library/tool."""


@dataclass
class ErrorInfo:
    code: str
    short: str          # brief, user-facing message (CLI)
    long: str           # more detailed explanation (help)
    dev: Optional[str]  # optional dev notes for debugging / internals


# ============================================================
# ERROR REGISTRY
# ============================================================

ERROR_REGISTRY: Dict[str, ErrorInfo] = {

    # --------------------------------------------------------
    # E001: Empty or missing input
    # --------------------------------------------------------
    "E001": ErrorInfo(
        code="E001",
        short="Input cannot be empty.",
        long=(
            "A required argument was empty. Terms, formulas, state names and "
            "spec files must all be given as non-empty strings."
        ),
        dev="Raised by validators.require_text before any parsing happens.",
    ),

    # --------------------------------------------------------
    # E002: Syntax error (DSL, term, formula, .aut)
    # --------------------------------------------------------
    "E002": ErrorInfo(
        code="E002",
        short="Syntax error.",
        long=(
            "The text could not be parsed. The message names the line and "
            "column of the first offending character.\n\n"
            "Arrows are written -a-> (positive) and -a!-> (negative); "
            "formulas use T, ~phi, /\\[phi, psi], <a>phi and <eps>phi; "
            ".aut files start with des (init,#transitions,#states)."
        ),
        dev=(
            "Raised as ParseError by dsl.parse_spec, dsl.parse_term, "
            "modal.parse_formula and semantics.read_aut. Lark exceptions are "
            "translated, never leaked."
        ),
    ),

    # --------------------------------------------------------
    # E003: Undeclared symbol or wrong arity
    # --------------------------------------------------------
    "E003": ErrorInfo(
        code="E003",
        short="Undeclared function symbol or wrong number of arguments.",
        long=(
            "Every function symbol must be declared on the symbols: line as "
            "name/arity, and every application must supply exactly that many "
            "arguments. Marking entries f/i need 1 <= i <= arity of f."
        ),
        dev="Raised as ArityError by terms.Signature and the DSL resolver.",
    ),

    # --------------------------------------------------------
    # E004: Unknown action label
    # --------------------------------------------------------
    "E004": ErrorInfo(
        code="E004",
        short="Unknown action label.",
        long=(
            "A rule uses a label that was not declared on the actions: line. "
            "The silent action is always available as tau."
        ),
        dev="Raised as UnknownActionError after schema expansion.",
    ),

    # --------------------------------------------------------
    # E005: Duplicate marking declaration
    # --------------------------------------------------------
    "E005": ErrorInfo(
        code="E005",
        short="Marking declared twice.",
        long=(
            "Inside one candidate group each of aleph, lambda and delta[l] "
            "may be declared at most once. Start a new group with "
            "candidate: NAME to give alternative markings."
        ),
        dev="Raised as DuplicateMarkingError by the DSL builder.",
    ),

    # --------------------------------------------------------
    # E006: Universe escape
    # --------------------------------------------------------
    "E006": ErrorInfo(
        code="E006",
        short="Rule targets escape the closed-term universe.",
        long=(
            "A ground rule instance produced a target term outside the "
            "universe that was handed to the ground model. Grow the universe "
            "(or the depth bound) instead of truncating silently."
        ),
        dev="Raised as UniverseEscape by semantics.ground_model(strict=True).",
    ),

    # --------------------------------------------------------
    # E007: Incomplete TSS
    # --------------------------------------------------------
    "E007": ErrorInfo(
        code="E007",
        short="TSS is incomplete on the explored universe.",
        long=(
            "Some transition is neither provable nor refutable with a "
            "well-supported proof, so the TSS does not determine an LTS."
        ),
        dev="Raised as IncompleteTSS by semantics.generate_lts.",
    ),

    # --------------------------------------------------------
    # E008: Free variables with no finite universe
    # --------------------------------------------------------
    "E008": ErrorInfo(
        code="E008",
        short="Free variables need a finite closed-term universe.",
        long=(
            "A rule has variables that occur neither in its source nor in a "
            "premise right-hand side. They are instantiated over a finite "
            "universe, which must be configured (base: line or --depth)."
        ),
        dev="Raised as Unbounded by ruloids.to_decent_ntyft.",
    ),

    # --------------------------------------------------------
    # E009: Bounded search exhausted
    # --------------------------------------------------------
    "E009": ErrorInfo(
        code="E009",
        short="Search bound exceeded.",
        long=(
            "A bounded search (premise resolution, proof search) hit its "
            "depth bound before it could decide. Raise --depth to search "
            "further; the verdict is inconclusive, not negative."
        ),
        dev="Raised as BoundExceeded by ruloids.to_xynft and linearly_provable.",
    ),

    # --------------------------------------------------------
    # E010: Partial ruloid set
    # --------------------------------------------------------
    "E010": ErrorInfo(
        code="E010",
        short="Ruloid enumeration is partial.",
        long=(
            "The ruloid set for some source and label was cut off by the "
            "depth bound. Decomposition refuses partial inputs."
        ),
        dev="Raised as PartialRuloids by decomposition.Decomposer.",
    ),

    # --------------------------------------------------------
    # E011: Decomposition does not stabilise
    # --------------------------------------------------------
    "E011": ErrorInfo(
        code="E011",
        short="Decomposition did not reach a fixpoint.",
        long=(
            "The mapping sets for mutually recursive (term, formula) pairs "
            "kept growing past the round cap."
        ),
        dev="Raised as InfiniteDecomposition by decomposition.Decomposer.",
    ),

    # --------------------------------------------------------
    # E012: Oracle cap exceeded
    # --------------------------------------------------------
    "E012": ErrorInfo(
        code="E012",
        short="LTS too large for the naive oracle.",
        long="The definitional oracle only runs on small LTSs (default 12 states).",
        dev="Raised as CapExceeded by equivalence.oracle_bisimilarity.",
    ),

    # --------------------------------------------------------
    # E013: Subset enumeration blowup
    # --------------------------------------------------------
    "E013": ErrorInfo(
        code="E013",
        short="Too many premise subsets to enumerate.",
        long=(
            "Manifest delay resistance enumerates subsets of positive "
            "premises. Above the configured cap the verdict is inconclusive."
        ),
        dev="Raised as SubsetBlowup inside formats; converted to inconclusive.",
    ),

    # --------------------------------------------------------
    # E014: Unknown name (format, equivalence kind, class)
    # --------------------------------------------------------
    "E014": ErrorInfo(
        code="E014",
        short="Unknown format, equivalence or formula class.",
        long=(
            "Formats: ready-simulation, rooted-branching, rooted-eta, "
            "rooted-delay, delay, rooted-weak, weak, manifest-rooted-delay, "
            "manifest-rooted-weak, syntactic-rooted-delay, "
            "syntactic-rooted-weak, syntactic-delay, syntactic-weak.\n"
            "Kinds: strong, branching, delay, weak, each optionally "
            "prefixed with rooted-."
        ),
        dev="Raised by validators.parse_format_name / parse_kind / parse_class.",
    ),

    # --------------------------------------------------------
    # E015: Unknown state
    # --------------------------------------------------------
    "E015": ErrorInfo(
        code="E015",
        short="Unknown LTS state.",
        long="The state you named does not occur in the loaded LTS.",
        dev="Raised by validators.parse_state.",
    ),

    # --------------------------------------------------------
    # E016: Unknown marking candidate
    # --------------------------------------------------------
    "E016": ErrorInfo(
        code="E016",
        short="Unknown marking candidate.",
        long=(
            "The spec declares no candidate group with that name. Use "
            "sosw parse to list the candidates of a spec."
        ),
        dev="Raised by tss.TSS.marking_set.",
    ),

    # --------------------------------------------------------
    # E017: Unreadable file
    # --------------------------------------------------------
    "E017": ErrorInfo(
        code="E017",
        short="File could not be read.",
        long="The path does not exist, is a directory, or is not UTF-8 text.",
        dev="Raised by validators.read_text_file.",
    ),

    # --------------------------------------------------------
    # E018: Invalid numeric flag
    # --------------------------------------------------------
    "E018": ErrorInfo(
        code="E018",
        short="Invalid numeric value.",
        long="Depths, seeds and caps must be non-negative integers.",
        dev="Raised by validators.parse_non_negative_int.",
    ),

    # --------------------------------------------------------
    # E019: Precondition: ready simulation format
    # --------------------------------------------------------
    "E019": ErrorInfo(
        code="E019",
        short="TSS is not in ready simulation format.",
        long=(
            "Ruloids and decompositions are only defined for TSSs whose rules "
            "are ntyft or ntyxt rules without lookahead."
        ),
        dev="Raised as FormatPrecondition by ruloids.to_decent_ntyft.",
    ),

    # --------------------------------------------------------
    # E020: Bundled suite problem
    # --------------------------------------------------------
    "E020": ErrorInfo(
        code="E020",
        short="Bundled suite table is malformed.",
        long="specs/suite.yaml must map spec names to expectation tables.",
        dev="Raised by harness.load_suite_table.",
    ),
}


# ============================================================
# CLI-level coded exception + helper functions
# ============================================================

class SoswCLIError(SoswError):
    """
    Error that carries an error code + registry metadata.
    Inherits SoswError so callers can catch either broad or specific errors.
    """
    def __init__(self, code: str, msg: Optional[str] = None):
        self.code = code
        self.info = ERROR_REGISTRY.get(code)

        if msg is not None:
            self.msg = msg
        elif self.info:
            self.msg = self.info.short
        else:
            self.msg = f"Unregistered error code: {code}"

        super().__init__(self.msg)

    def __str__(self):
        return f"Error [{self.code}]: {self.msg}"


# ============================================================
# Engine failures (each pinned to one registry code)
# ============================================================

class ParseError(SoswCLIError):
    def __init__(self, msg: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            msg = f"{msg} ({where})"
        super().__init__("E002", msg)


class ArityError(SoswCLIError):
    def __init__(self, msg: str, symbol: Optional[str] = None):
        self.symbol = symbol
        super().__init__("E003", msg)


class UnknownActionError(SoswCLIError):
    def __init__(self, label: str):
        self.label = label
        super().__init__("E004", f"Unknown action '{label}'")


class DuplicateMarkingError(SoswCLIError):
    def __init__(self, kind: str, candidate: str):
        self.kind = kind
        self.candidate = candidate
        super().__init__("E005", f"Marking '{kind}' declared twice in candidate '{candidate}'")


class UniverseEscape(SoswCLIError):
    def __init__(self, terms: Iterable[object]):
        self.terms = list(terms)
        shown = ", ".join(str(t) for t in self.terms[:5])
        more = "" if len(self.terms) <= 5 else f" (+{len(self.terms) - 5} more)"
        super().__init__("E006", f"Targets outside the universe: {shown}{more}")


class IncompleteTSS(SoswCLIError):
    def __init__(self, literal: object):
        self.literal = literal
        super().__init__("E007", f"Literal {literal} is undefined in the well-founded model")


class Unbounded(SoswCLIError):
    def __init__(self, rule: object):
        self.rule = rule
        super().__init__("E008", f"Rule {rule} has free variables but no universe was given")


class BoundExceeded(SoswCLIError):
    def __init__(self, what: str, bound: int):
        self.what = what
        self.bound = bound
        super().__init__("E009", f"{what}: bound {bound} exhausted")


class PartialRuloids(SoswCLIError):
    def __init__(self, source: object, label: str):
        self.source = source
        self.label = label
        super().__init__("E010", f"Ruloids for {source} -{label}-> are partial")


class InfiniteDecomposition(SoswCLIError):
    def __init__(self, rounds: int):
        self.rounds = rounds
        super().__init__("E011", f"No fixpoint after {rounds} rounds")


class CapExceeded(SoswCLIError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__("E012", f"{size} states exceed the oracle cap of {cap}")


class SubsetBlowup(SoswCLIError):
    def __init__(self, rule: object, count: int, cap: int):
        self.rule = rule
        self.count = count
        self.cap = cap
        super().__init__("E013", f"{count} premise subsets for {rule} exceed the cap of {cap}")


class FormatPrecondition(SoswCLIError):
    def __init__(self, violations: Iterable[str]):
        self.violations = list(violations)
        super().__init__("E019", "; ".join(self.violations) or None)


# ============================================================
# Helpers
# ============================================================

def get_error_info(code: str) -> Optional[ErrorInfo]:
    return ERROR_REGISTRY.get(code)


def format_error_for_cli(err: SoswCLIError) -> str:
    return f"Error [{err.code}]: {err.msg}"


def format_error_for_help(code: str, dev_mode: bool = False) -> str:
    info = ERROR_REGISTRY.get(code)
    if not info:
        return f"{code}: (no registry entry found)"

    if not dev_mode:
        return f"{code}: {info.long}"

    if info.dev:
        return f"{code}: {info.long}\n\n[DEV]\n{info.dev}"
    return f"{code}: {info.long}"


def list_error_codes_ordered():
    """
    Order for human help display: input problems first (syntax, symbols,
    actions), then engine limits, then everything else in registry order.
    """
    preferred_order = ["E002", "E003", "E004", "E005", "E007", "E009"]

    ordered = []
    for code in preferred_order:
        if code in ERROR_REGISTRY:
            ordered.append(ERROR_REGISTRY[code])

    for code in ERROR_REGISTRY:
        if code not in preferred_order:
            ordered.append(ERROR_REGISTRY[code])

    return ordered
