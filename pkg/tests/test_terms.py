import pytest
from hypothesis import given, settings, strategies as st

from sosw.errors import ArityError, SoswCLIError
from sosw.terms import (
    App,
    ArgumentMarking,
    Signature,
    Var,
    apply,
    closed_terms,
    compose,
    const,
    fresh_variables,
    frozen_occurrences,
    is_univariate,
    liquid_occurrences,
    match,
    occurrence_liquidity,
    open_terms,
    render_term,
    resolve,
    unify,
    universal_marking,
    variables,
)


SIG = Signature.of([("a", 0), ("b", 0), ("f", 1), ("+", 2), (".", 2)])
x, y, z = Var("x"), Var("y"), Var("z")
a, b = const("a"), const("b")


def plus(l, r):
    return App("+", (l, r))


def seq(l, r):
    return App(".", (l, r))


def f(t):
    return App("f", (t,))


# ----------------------------
# Printing
# ----------------------------

@pytest.mark.parametrize("term, text", [
    (plus(a, seq(b, x)), "a + b . x"),
    (seq(plus(a, b), x), "(a + b) . x"),
    (plus(x, plus(y, z)), "x + (y + z)"),
    (plus(plus(x, y), z), "x + y + z"),
    (f(plus(a, b)), "f(a + b)"),
])
def test_render_term_precedence(term, text):
    assert render_term(term) == text


# ----------------------------
# Signatures + markings
# ----------------------------

def test_signature_rejects_duplicates():
    with pytest.raises(ArityError):
        Signature.of([("f", 1), ("f", 2)])


def test_signature_check_wrong_arity_is_E003():
    with pytest.raises(SoswCLIError) as excinfo:
        SIG.check(App("f", (a, b)))
    assert excinfo.value.code == "E003"


def test_generic_term_has_distinct_fresh_variables():
    t = SIG.generic("+", avoid={"x0"})
    assert t.symbol == "+"
    assert len(variables(t)) == 2
    assert "x0" not in variables(t)


def test_marking_validate_index_out_of_range():
    m = ArgumentMarking("lam", frozenset({("f", 2)}))
    with pytest.raises(ArityError):
        m.validate(SIG)


def test_universal_marking_covers_all_arguments():
    m = universal_marking(SIG)
    assert m.liquid == {("f", 1), ("+", 1), ("+", 2), (".", 1), (".", 2)}


# ----------------------------
# Occurrence calculus
# ----------------------------

def test_liquidity_follows_every_frame():
    lam = ArgumentMarking("lam", frozenset({(".", 1), ("+", 1), ("+", 2)}))
    t = seq(plus(x, y), x)
    assert liquid_occurrences(t, "x", lam) == 1
    assert frozen_occurrences(t, "x", lam) == 1
    assert occurrence_liquidity(t, "y", lam) == [((1, 2), True)]


def test_root_variable_is_liquid_under_any_marking():
    assert liquid_occurrences(x, "x", ArgumentMarking("empty")) == 1


def test_univariate():
    assert is_univariate(plus(x, f(y)))
    assert not is_univariate(plus(x, f(x)))


# ----------------------------
# Substitution, matching, unification
# ----------------------------

def test_compose_is_sequential_application():
    sigma = {"y": a}
    rho = {"x": f(y)}
    t = plus(x, y)
    assert apply(compose(sigma, rho), t) == apply(sigma, apply(rho, t))


def test_match_rejects_inconsistent_binding():
    assert match(plus(x, x), plus(a, b)) is None
    assert match(plus(x, x), plus(a, a)) == {"x": a}


def test_unify_occurs_check():
    assert unify(x, f(x)) is None


def test_unify_respects_rigid_variables():
    assert unify(x, a, rigid={"x"}) is None
    s = unify(plus(x, b), plus(a, y))
    assert resolve(plus(x, y), s) == plus(a, b)


def test_fresh_variables_skip_avoided():
    assert fresh_variables({"z0", "z2"}, 3) == ["z1", "z3", "z4"]


# ----------------------------
# Enumeration
# ----------------------------

def test_closed_terms_depth_zero_is_constants():
    assert closed_terms(SIG, 0) == [a, b]


def test_closed_terms_are_closed_and_bounded():
    terms = closed_terms(SIG, 1)
    assert all(not variables(t) for t in terms)
    assert f(a) in terms and plus(b, a) in terms
    assert f(f(a)) not in terms


def test_open_terms_univariate_numbering():
    terms = open_terms(SIG, 1, univariate=True, max_variables=2)
    assert plus(Var("x1"), Var("x2")) in terms
    assert all(is_univariate(t) for t in terms)


def test_open_terms_may_repeat_variables():
    terms = open_terms(SIG, 1, univariate=False, max_variables=2)
    assert plus(Var("x1"), Var("x1")) in terms


# ----------------------------
# Properties
# ----------------------------

ground = st.recursive(
    st.sampled_from([a, b]),
    lambda kids: st.one_of(
        kids.map(f),
        st.tuples(kids, kids).map(lambda p: plus(*p)),
        st.tuples(kids, kids).map(lambda p: seq(*p)),
    ),
    max_leaves=6,
)


@settings(max_examples=60, deadline=None)
@given(ground, ground)
def test_match_recovers_the_substitution(s, t):
    pattern = plus(x, seq(y, x))
    instance = apply({"x": s, "y": t}, pattern)
    assert match(pattern, instance) == {"x": s, "y": t}


@settings(max_examples=60, deadline=None)
@given(ground, ground)
def test_unifier_makes_terms_equal(s, t):
    left = plus(x, t)
    right = plus(s, y)
    u = unify(left, right)
    assert u is not None
    assert resolve(left, u) == resolve(right, u)
