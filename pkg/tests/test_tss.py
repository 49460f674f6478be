import pytest

from sosw.dsl import parse_spec
from sosw.terms import App, ArgumentMarking, Var, const
from sosw.tss import (
    TAU,
    Literal,
    Rule,
    alpha_key,
    classify,
    free_variables,
    is_gamma_patient,
    is_patience_rule,
    lookahead_variables,
    neg,
    patience_rule,
    pos,
    ready_simulation_format,
    stable_negatives,
)


x, y, z, w = Var("x"), Var("y"), Var("z"), Var("w")


def f(*args):
    return App("f", tuple(args))


# ----------------------------
# Classification
# ----------------------------

def test_ntyft_rule_is_decent():
    r = Rule((pos(x, "a", y),), pos(f(x), "a", f(y)))
    cls = classify(r)
    assert cls.ntyft and cls.xynft and cls.decent
    assert not cls.ntyxt


def test_variable_source_is_ntyxt():
    r = Rule((pos(x, "a", y),), pos(x, "b", y))
    assert classify(r).ntyxt


def test_lookahead_is_detected():
    r = Rule((pos(x, "a", y), pos(y, "b", z)), pos(f(x), "a", z))
    assert lookahead_variables(r) == {"y"}
    assert classify(r).has_lookahead


def test_free_variables():
    r = Rule((neg(w, "a"),), pos(f(x), "a", x))
    assert free_variables(r) == {"w"}
    assert not classify(r).decent


def test_repeated_source_variable_is_not_ntyft():
    r = Rule((), pos(f(x, x), "a", x))
    assert not classify(r).ntyft


def test_ready_simulation_format_reports_each_problem():
    P = parse_spec(
        "tss t\nactions: a b\nsymbols: f/1 g/2\n"
        "rule look: x -a-> y, y -b-> z |- f(x) -a-> z\n"
        "rule dup: |- g(x, x) -a-> x\n"
    )
    ok, problems = ready_simulation_format(P)
    assert not ok
    assert any(p.startswith("look: lookahead") for p in problems)
    assert any(p.startswith("dup: not ntyft/ntyxt") for p in problems)


def test_bpa_is_in_ready_simulation_format(bpa):
    assert ready_simulation_format(bpa) == (True, [])


# ----------------------------
# Premises
# ----------------------------

def test_premises_are_deduplicated_and_sorted():
    r = Rule((pos(x, "b", y), pos(x, "a", z), pos(x, "b", y)), pos(f(x), "a", f(x)))
    assert [p.label for p in r.premises] == ["a", "b"]


def test_rule_equality_ignores_name():
    r = Rule((), pos(const("c"), "a", const("c")), "one")
    assert r == r.named("two")


def test_stable_negatives_need_tau_blocked():
    prems = (neg(x, "a"), neg(x, TAU), neg(y, "a"))
    assert stable_negatives(prems) == (neg(x, "a"), neg(x, TAU))


def test_literal_printing():
    assert str(neg(x, "a")) == "x -a!->"
    assert str(Literal(f(x), "a", y)) == "f(x) -a-> y"


# ----------------------------
# Patience
# ----------------------------

def test_generated_patience_rule_is_recognised(bpa):
    r = patience_rule(bpa.signature, ".", 1)
    assert is_patience_rule(r, ".", 1)
    assert not is_patience_rule(r, ".", 2)


def test_bpa_is_patient_for_gamma(bpa):
    gamma = bpa.marking_set().gamma
    assert gamma.liquid == {(".", 1)}
    ok, missing = is_gamma_patient(bpa, gamma)
    assert ok and missing == []


def test_missing_patience_rule_is_named(bpa):
    gamma = ArgumentMarking("g", frozenset({(".", 2)}))
    ok, missing = is_gamma_patient(bpa, gamma)
    assert not ok and missing == [(".", 2)]


# ----------------------------
# Alpha equivalence
# ----------------------------

def test_alpha_key_ignores_variable_names():
    r1 = Rule((pos(x, "a", y),), pos(f(x), "a", f(y)))
    r2 = Rule((pos(z, "a", w),), pos(f(z), "a", f(w)))
    assert alpha_key(r1) == alpha_key(r2)


def test_alpha_key_distinguishes_shapes():
    r1 = Rule((pos(x, "a", y),), pos(f(x), "a", f(y)))
    r2 = Rule((pos(x, "a", y),), pos(f(x), "a", y))
    assert alpha_key(r1) != alpha_key(r2)
