import random

import pytest
from hypothesis import given, settings, strategies as st

from sosw.equivalence import equivalent, random_lts
from sosw.errors import ParseError, SoswCLIError
from sosw.modal import (
    CLASS_KINDS,
    CLASSES,
    O,
    O_D,
    O_RD,
    O_RW,
    O_W,
    TOP,
    Conj,
    Diamond,
    Eps,
    Neg,
    distinguishing_formula,
    extension,
    in_class,
    normalize,
    parse_class,
    parse_formula,
    satisfies,
)
from sosw.semantics import read_aut
from sosw.tss import TAU


def assert_cli_error(excinfo, code: str, contains: str | None = None):
    err = excinfo.value
    assert isinstance(err, SoswCLIError)
    assert err.code == code
    if contains is not None:
        assert contains in err.msg


# 0 -tau-> 1 -a-> 2 and 3 -a-> 4: tau.a next to a
TAU_A = 'des (0,3,5)\n(0,"tau",1)\n(1,"a",2)\n(3,"a",4)\n'


# ----------------------------
# Syntax
# ----------------------------

def test_parse_structure():
    phi = parse_formula(r"/\[<eps><a>T, ~<b>T]")
    assert phi == Conj((Eps(Diamond("a", TOP)), Neg(Diamond("b", TOP))))


def test_empty_conjunction_is_top():
    assert parse_formula(r"/\[]") == TOP


def test_tau_alias():
    assert parse_formula("<i><a>T", tau_label="i") == Diamond(TAU, Diamond("a", TOP))


def test_printed_formula_parses_back():
    phi = parse_formula(r"~/\[<eps><tau>T, <a>~<eps>T]")
    assert parse_formula(str(phi)) == phi


@pytest.mark.parametrize("text", ["<a>", "~", r"/\[T,", "<a>>T", "F"])
def test_bad_formula_is_E002(text):
    with pytest.raises(ParseError) as excinfo:
        parse_formula(text)
    assert_cli_error(excinfo, "E002")


# ----------------------------
# Satisfaction
# ----------------------------

def test_eps_looks_through_tau():
    L = read_aut(TAU_A)
    assert satisfies(L, 0, parse_formula("<eps><a>T"))
    assert not satisfies(L, 0, parse_formula("<a>T"))
    assert satisfies(L, 3, parse_formula("<a>T"))
    assert extension(L, parse_formula("<eps>T")) == frozenset(L.states)


def test_unknown_state_is_E015():
    L = read_aut(TAU_A)
    with pytest.raises(SoswCLIError) as excinfo:
        satisfies(L, 9, TOP)
    assert_cli_error(excinfo, "E015")


# ----------------------------
# Classes + normal form
# ----------------------------

@pytest.mark.parametrize("text, members", [
    ("T", {O, O_D, O_RD, O_W, O_RW}),
    ("<a>T", {O}),
    ("<eps><a>T", {O, O_D, O_RD}),
    ("<eps><tau>T", {O, O_RD}),
    ("<eps><a><eps>T", {O, O_D, O_RD, O_W, O_RW}),
    ("<eps><tau><eps>T", {O, O_RD, O_RW}),
    ("~<eps><a>~<eps><b>T", {O, O_D, O_RD}),
    ("<eps><a><a>T", {O}),
])
def test_class_membership(text, members):
    phi = parse_formula(text)
    assert {c for c in CLASSES if in_class(phi, c)} == members


def test_class_names_are_case_insensitive():
    assert parse_class("o_rd") == O_RD
    with pytest.raises(SoswCLIError) as excinfo:
        parse_class("O_b")
    assert_cli_error(excinfo, "E014")


@pytest.mark.parametrize("text, normal", [
    ("<eps><eps><a>T", "<eps><a>T"),
    ("~~<a>T", "<a>T"),
    (r"/\[T, <a>T, <a>T]", "<a>T"),
    (r"/\[/\[<a>T], /\[<b>T, T]]", r"/\[<a>T, <b>T]"),
    (r"<eps>~~<eps><eps>T", "<eps>T"),
])
def test_normalize(text, normal):
    assert normalize(parse_formula(text)) == parse_formula(normal)


def test_normalize_keeps_meaning():
    L = read_aut(TAU_A)
    phi = parse_formula(r"~~/\[<eps><eps><a>T, T]")
    assert extension(L, phi) == extension(L, normalize(phi))


# ----------------------------
# Distinguishing formulas
# ----------------------------

def test_tau_prefix_is_seen_only_by_rooted_classes():
    L = read_aut(TAU_A)
    assert distinguishing_formula(L, 0, 3, O_D) is None
    phi = distinguishing_formula(L, 3, 0, O_RD)
    assert phi is not None
    assert in_class(phi, O_RD)
    assert satisfies(L, 3, phi) and not satisfies(L, 0, phi)


def test_equal_states_have_no_formula():
    L = read_aut(TAU_A)
    assert distinguishing_formula(L, 2, 2, O) is None


def _random_pairs():
    return st.tuples(st.integers(0, 2 ** 32 - 1), st.sampled_from(CLASSES))


# State pairs drawn from each seeded system per class
PAIRS_PER_SYSTEM = 3


@pytest.mark.parametrize("c", [O_D, O_RD, O_W, O_RW])
def test_classes_characterise_their_equivalence_on_seeded_systems(c, seeded_systems):
    rng = random.Random(7)
    kind = CLASS_KINDS[c]
    told_apart = 0
    for L in seeded_systems:
        for _ in range(PAIRS_PER_SYSTEM):
            p, q = rng.choice(L.states), rng.choice(L.states)
            phi = distinguishing_formula(L, p, q, c)
            if equivalent(L, p, q, kind):
                assert phi is None, (L.to_dict(), p, q)
                continue
            told_apart += 1
            assert phi is not None
            assert in_class(phi, c), str(phi)
            assert satisfies(L, p, phi), (L.to_dict(), p, q, str(phi))
            assert not satisfies(L, q, phi), (L.to_dict(), p, q, str(phi))
    assert told_apart > 0


@settings(max_examples=60, deadline=None)
@given(_random_pairs())
def test_distinguishing_formula_agrees_with_equivalence(case):
    seed, c = case
    rng = random.Random(seed)
    L = random_lts(rng, max_states=6, actions=("a", "b"), density=0.5)
    p = rng.choice(L.states)
    q = rng.choice(L.states)
    phi = distinguishing_formula(L, p, q, c)
    if equivalent(L, p, q, CLASS_KINDS[c]):
        assert phi is None
    else:
        assert phi is not None
        assert in_class(phi, c)
        assert satisfies(L, p, phi)
        assert not satisfies(L, q, phi)
