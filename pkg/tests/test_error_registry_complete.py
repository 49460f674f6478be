import ast
from pathlib import Path

import pytest

from sosw.errors import ERROR_REGISTRY, format_error_for_help, list_error_codes_ordered


PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = PROJECT_ROOT / "src" / "sosw"


def _is_code(node) -> bool:
    return isinstance(node, ast.Constant) and isinstance(node.value, str)


def _extract_error_codes_from_file(py_path: Path) -> set[str]:
    """
    Finds SoswCLIError("EXXX", ...) calls and the super().__init__("EXXX", ...)
    calls of its subclasses. AST, so comments and docstrings don't count.
    """
    tree = ast.parse(py_path.read_text(encoding="utf-8"), filename=str(py_path))
    codes: set[str] = set()

    class Visitor(ast.NodeVisitor):
        def visit_Call(self, node: ast.Call):
            func = node.func
            direct = isinstance(func, ast.Name) and func.id == "SoswCLIError"
            via_super = (
                isinstance(func, ast.Attribute)
                and func.attr == "__init__"
                and isinstance(func.value, ast.Call)
                and isinstance(func.value.func, ast.Name)
                and func.value.func.id == "super"
            )
            if (direct or via_super) and node.args and _is_code(node.args[0]):
                codes.add(node.args[0].value)
            self.generic_visit(node)

    Visitor().visit(tree)
    return codes


def _used_codes() -> set[str]:
    used: set[str] = set()
    for f in SRC_ROOT.rglob("*.py"):
        used |= _extract_error_codes_from_file(f)
    return {c for c in used if len(c) == 4 and c.startswith("E") and c[1:].isdigit()}


def test_all_raised_error_codes_are_registered():
    assert list(SRC_ROOT.rglob("*.py")), "No python files found under src/sosw"

    missing = sorted(_used_codes() - set(ERROR_REGISTRY))
    if missing:
        pytest.fail(
            "Missing error codes in ERROR_REGISTRY: "
            + ", ".join(missing)
            + "\nAdd them to sosw/errors.py ERROR_REGISTRY."
        )


def test_engine_errors_are_raised_somewhere():
    # the subclasses pin E002..E013 and E019
    used = _used_codes()
    for code in ("E002", "E006", "E009", "E010", "E011", "E012", "E013", "E019"):
        assert code in used


def test_registry_keys_match_codes():
    for key, info in ERROR_REGISTRY.items():
        assert info.code == key


def test_ordered_listing_covers_registry_once():
    codes = [info.code for info in list_error_codes_ordered()]
    assert sorted(codes) == sorted(ERROR_REGISTRY)
    assert codes[0] == "E002"


def test_help_text_dev_mode_adds_notes():
    plain = format_error_for_help("E019")
    dev = format_error_for_help("E019", dev_mode=True)
    assert plain.startswith("E019:")
    assert "[DEV]" in dev and "[DEV]" not in plain
    assert "no registry entry" in format_error_for_help("E999")
