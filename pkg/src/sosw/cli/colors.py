# src/sosw/cli/colors.py

"""
Centralized color and style definitions for the sosw command line.
"""

from colorama import Fore, Style

# ============================================================
# Semantic Color Palette
# ============================================================
# Named for meaning, not hue.

COLORS = {
    # General
    "reset": Style.RESET_ALL,
    "error": Fore.LIGHTRED_EX,
    "warning": Fore.LIGHTYELLOW_EX,
    "info": Fore.CYAN,

    # Verdicts
    "pass": Fore.LIGHTGREEN_EX,
    "fail": Fore.RED,
    "inconclusive": Fore.LIGHTYELLOW_EX,

    # Objects
    "rule": Fore.LIGHTBLUE_EX,
    "formula": Fore.LIGHTMAGENTA_EX,
    "term": Fore.LIGHTCYAN_EX,

    # Headers / emphasis
    "header": Fore.WHITE,
    "label": Fore.YELLOW,
    "path": Fore.LIGHTBLACK_EX,
}

_enabled = True


def set_enabled(flag: bool) -> None:
    """Colour is off for JSON reports."""
    global _enabled
    _enabled = flag


def c(name: str) -> str:
    """
    Return a color by semantic name.
    Falls back to reset if the name is unknown.
    """
    if not _enabled:
        return ""
    return COLORS.get(name.lower(), Style.RESET_ALL)


def reset() -> str:
    return Style.RESET_ALL if _enabled else ""
