import pytest

from sosw.equivalence import DELAY, WEAK
from sosw.errors import SoswCLIError
from sosw.semantics import read_aut
from sosw.validators import (
    parse_format_name,
    parse_kind,
    parse_non_negative_int,
    parse_pair,
    parse_state,
    read_text_file,
    require_text,
)


def assert_cli_error(excinfo, code: str, contains: str | None = None):
    err = excinfo.value
    assert isinstance(err, SoswCLIError)
    assert err.code == code
    if contains is not None:
        assert contains in err.msg


SMALL_AUT = 'des (0,2,3)\n(0,"a",1)\n(1,"tau",2)\n'


# ----------------------------
# E001: Empty input
# ----------------------------

def test_require_text_blank_raises_E001():
    with pytest.raises(SoswCLIError) as excinfo:
        require_text("   ", "Formula")
    assert_cli_error(excinfo, "E001", "Formula")


def test_require_text_none_raises_E001():
    with pytest.raises(SoswCLIError) as excinfo:
        require_text(None)
    assert_cli_error(excinfo, "E001")


def test_require_text_strips():
    assert require_text("  <a>T \n") == "<a>T"


# ----------------------------
# E014: Unknown names
# ----------------------------

@pytest.mark.parametrize("raw, expected", [
    ("rd", "rooted-delay"),
    ("RW", "rooted-weak"),
    ("ready_simulation", "ready-simulation"),
    ("syntactic-rooted-delay", "syntactic-rooted-delay"),
    ("manifest-rooted-delay", "manifest-rooted-delay"),
])
def test_parse_format_name_accepts_aliases(raw, expected):
    assert parse_format_name(raw) == expected


def test_parse_format_name_unknown_raises_E014():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_format_name("rooted-branching")
    assert_cli_error(excinfo, "E014", "rooted-branching")


def test_parse_kind_variants():
    rd = parse_kind("rooted-delay")
    assert rd.rooted and rd.base == DELAY
    w = parse_kind("Weak")
    assert not w.rooted and w.base == WEAK


def test_parse_kind_unknown_raises_E014():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_kind("trace")
    assert_cli_error(excinfo, "E014")


# ----------------------------
# E015: Unknown state
# ----------------------------

def test_parse_state_by_number():
    L = read_aut(SMALL_AUT)
    assert parse_state(L, "1") == 1


def test_parse_state_missing_raises_E015():
    L = read_aut(SMALL_AUT)
    with pytest.raises(SoswCLIError) as excinfo:
        parse_state(L, "7")
    assert_cli_error(excinfo, "E015", "'7'")


def test_parse_pair_ok():
    L = read_aut(SMALL_AUT)
    assert parse_pair(L, "0,2") == (0, 2)


def test_parse_pair_wrong_shape_raises_E015():
    L = read_aut(SMALL_AUT)
    with pytest.raises(SoswCLIError) as excinfo:
        parse_pair(L, "0,1,2")
    assert_cli_error(excinfo, "E015", "two states")


# ----------------------------
# E017: Files
# ----------------------------

def test_read_text_file_missing_raises_E017(tmp_path):
    with pytest.raises(SoswCLIError) as excinfo:
        read_text_file(str(tmp_path / "nope.tss"))
    assert_cli_error(excinfo, "E017", "nope.tss")


def test_read_text_file_reads(tmp_path):
    p = tmp_path / "x.aut"
    p.write_text(SMALL_AUT, encoding="utf-8")
    assert read_text_file(str(p)) == SMALL_AUT


# ----------------------------
# E018: Numbers
# ----------------------------

@pytest.mark.parametrize("bad", ["-1", "two", "1.5", "3x"])
def test_parse_non_negative_int_rejects(bad):
    with pytest.raises(SoswCLIError) as excinfo:
        parse_non_negative_int(bad, "depth")
    assert_cli_error(excinfo, "E018", "depth")


def test_parse_non_negative_int_accepts_plus_sign():
    assert parse_non_negative_int("+4") == 4
    assert parse_non_negative_int("0") == 0
