from .dsl import parse_spec, parse_term, print_spec
from .decomposition import decompose, decompose_dr, verify_decomposition_theorem
from .equivalence import EquivalenceKind, bisimilarity, rooted_related
from .errors import SoswCLIError, SoswError
from .formats import check_format
from .harness import congruence_check, run_bundled_suite
from .modal import distinguishing_formula, parse_formula, satisfies
from .ruloids import ruloids_for
from .semantics import generate_lts, read_aut, write_aut

__all__ = [
    "parse_spec",
    "parse_term",
    "print_spec",
    "decompose",
    "decompose_dr",
    "verify_decomposition_theorem",
    "EquivalenceKind",
    "bisimilarity",
    "rooted_related",
    "SoswCLIError",
    "SoswError",
    "check_format",
    "congruence_check",
    "run_bundled_suite",
    "distinguishing_formula",
    "parse_formula",
    "satisfies",
    "ruloids_for",
    "generate_lts",
    "read_aut",
    "write_aut",
]
