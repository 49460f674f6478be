# src/sosw/validators.py

"""
Pure validation + parsing helpers for the sosw command line.

This module must NOT:
- print()
- reference color helpers

It MAY:
- raise SoswCLIError with specific error codes/messages
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .equivalence import EquivalenceKind
from .errors import SoswCLIError
from .formats import FORMATS
from .semantics import LTS, State, render_state


# ============================================================
# Basic string guards
# ============================================================

def require_text(value: Optional[str], what: str = "Input") -> str:
    if value is None or value.strip() == "":
        raise SoswCLIError("E001", f"{what} cannot be empty.")
    return value.strip()


# ============================================================
# Files
# ============================================================

def read_text_file(path: str) -> str:
    require_text(path, "Path")
    p = Path(path)
    if not p.is_file():
        raise SoswCLIError("E017", f"No such file: '{path}'")
    try:
        return p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SoswCLIError("E017", f"Cannot read '{path}': {e}")


# ============================================================
# Numbers
# ============================================================

def parse_non_negative_int(value: str, what: str = "value") -> int:
    raw = require_text(value, what)
    if raw.startswith("+"):
        raw = raw[1:]
    if not raw.isdigit():
        raise SoswCLIError("E018", f"Invalid {what} '{value}' (non-negative integer expected).")
    return int(raw)


# ============================================================
# Names
# ============================================================

FORMAT_ALIASES = {
    "rd": "rooted-delay",
    "rw": "rooted-weak",
    "d": "delay",
    "w": "weak",
    "rs": "ready-simulation",
}


def parse_format_name(value: str) -> str:
    raw = require_text(value, "Format").lower().replace("_", "-")
    raw = FORMAT_ALIASES.get(raw, raw)
    if raw not in FORMATS:
        raise SoswCLIError("E014", f"Unknown format '{value}'; known: {', '.join(FORMATS)}")
    return raw


def parse_kind(value: str) -> EquivalenceKind:
    raw = require_text(value, "Equivalence kind").lower().replace("_", "-")
    return EquivalenceKind.parse(raw)


def parse_state(L: LTS, value: str) -> State:
    """A state of L by its printed name; .aut states are numbers."""
    raw = require_text(value, "State")
    if raw.isdigit() and int(raw) in L:
        return int(raw)
    for s in L.states:
        if render_state(s) == raw:
            return s
    raise SoswCLIError("E015", f"No state '{value}' in the LTS ({len(L.states)} states)")


def parse_pair(L: LTS, value: str):
    raw = require_text(value, "Pair")
    parts = raw.split(",")
    if len(parts) != 2:
        raise SoswCLIError("E015", f"Expected two states 'p,q', got '{value}'")
    return parse_state(L, parts[0]), parse_state(L, parts[1])
