import pytest

from sosw.dsl import parse_spec, parse_term, print_spec
from sosw.errors import ParseError, SoswCLIError
from sosw.harness import bundled_spec_names, spec_text
from sosw.terms import App, Var, const
from sosw.tss import TAU


def assert_cli_error(excinfo, code: str, contains: str | None = None):
    err = excinfo.value
    assert isinstance(err, SoswCLIError)
    assert err.code == code
    if contains is not None:
        assert contains in err.msg


HEADER = "tss t\nactions: a\nsymbols: f/1 c/0\n"


# ----------------------------
# Round trip over the bundled specs
# ----------------------------

@pytest.mark.parametrize("name", bundled_spec_names())
def test_print_then_parse_is_identity(name):
    P = parse_spec(spec_text(name))
    again = parse_spec(print_spec(P))
    assert again == P
    assert [r.name for r in again.rules] == [r.name for r in P.rules]


def test_bundled_specs_are_all_present():
    names = bundled_spec_names()
    for expected in ("bpa", "kleene", "deadlock", "s_operator", "eta_counter"):
        assert expected in names


# ----------------------------
# Parsing details
# ----------------------------

def test_schema_expands_one_rule_per_label(bpa):
    act = [r for r in bpa.rules if r.name.startswith("act_")]
    assert sorted(r.name for r in act) == ["act_a", "act_b", "act_tau"]
    assert {r.label for r in act} == {"a", "b", TAU}


def test_identifiers_outside_signature_are_variables(bpa):
    t = parse_term("x1 + a . y", bpa.signature)
    assert t == App("+", (Var("x1"), App(".", (const("a"), Var("y")))))


def test_candidate_markings(bpa):
    ms = bpa.marking_set("main")
    assert ms.lam.is_liquid(".", 1)
    assert not ms.lam.is_liquid(".", 2)
    assert ms.aleph.is_liquid("+", 2)


def test_delta_markings_by_label():
    P = parse_spec(spec_text("kleene"))
    ms = P.marking_set()
    assert ms.delta_for("a").is_liquid(".", 1)
    assert ms.delta_for("tick").liquid == frozenset()


def test_all_marks_every_argument():
    P = parse_spec(HEADER + "candidate: c1\naleph: all\n")
    assert P.marking_set("c1").aleph.is_liquid("f", 1)


def test_tau_in_actions_is_implicit():
    P = parse_spec("tss t\nactions: a tau\nsymbols: c/0\n")
    assert P.actions == ("a",)
    assert P.labels == ("a", TAU)


def test_comments_and_blank_lines_are_ignored():
    P = parse_spec("# header\n\n" + HEADER + "\n# rules\nrule r: x -a-> y |- f(x) -a-> f(y)  # trailing\n")
    assert len(P.rules) == 1


# ----------------------------
# Errors
# ----------------------------

def test_syntax_error_has_position_E002():
    with pytest.raises(ParseError) as excinfo:
        parse_spec(HEADER + "rule r: x -a-> |- f(x) -a-> c\n")
    assert_cli_error(excinfo, "E002")
    assert excinfo.value.line == 4


def test_wrong_arity_E003():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_spec(HEADER + "rule r: |- f(c, c) -a-> c\n")
    assert_cli_error(excinfo, "E003", "f")


def test_unknown_action_E004():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_spec(HEADER + "rule r: x -b-> y |- f(x) -a-> c\n")
    assert_cli_error(excinfo, "E004", "'b'")


def test_unknown_schema_action_E004():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_spec(HEADER + "rule r [l in a z]: |- c -l-> c\n")
    assert_cli_error(excinfo, "E004", "'z'")


def test_duplicate_marking_E005():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_spec(HEADER + "candidate: m\naleph: f/1\naleph:\n")
    assert_cli_error(excinfo, "E005", "aleph")


def test_delta_needs_label():
    with pytest.raises(ParseError):
        parse_spec(HEADER + "delta: f/1\n")


def test_marking_out_of_range_E003():
    with pytest.raises(SoswCLIError) as excinfo:
        parse_spec(HEADER + "lambda: f/2\n")
    assert_cli_error(excinfo, "E003")


def test_unknown_candidate_E016(bpa):
    with pytest.raises(SoswCLIError) as excinfo:
        bpa.marking_set("nope")
    assert_cli_error(excinfo, "E016", "main")
