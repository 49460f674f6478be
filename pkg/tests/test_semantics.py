import pytest

from sosw.dsl import parse_spec
from sosw.errors import IncompleteTSS, ParseError, SoswCLIError
from sosw.harness import load_bundled_spec
from sosw.semantics import (
    LTS,
    PROVED,
    REFUTED,
    UNDEFINED,
    generate_lts,
    ground_model,
    read_aut,
    write_aut,
)
from sosw.terms import App, Var, const
from sosw.tss import TAU, neg, pos


def assert_cli_error(excinfo, code: str, contains: str | None = None):
    err = excinfo.value
    assert isinstance(err, SoswCLIError)
    assert err.code == code
    if contains is not None:
        assert contains in err.msg


def plus(l, r):
    return App("+", (l, r))


def seq(l, r):
    return App(".", (l, r))


a, b, eps, delta, tau = (const(n) for n in ("a", "b", "eps", "delta", "tau"))


# ----------------------------
# Generation
# ----------------------------

def test_bpa_choice(bpa):
    L = generate_lts(bpa, [plus(a, b)])
    assert L.initial == plus(a, b)
    assert set(L.states) == {plus(a, b), eps, delta}
    assert L.transitions == {
        (plus(a, b), "a", eps),
        (plus(a, b), "b", eps),
        (eps, "tick", delta),
    }
    assert not L.partial


def test_bpa_sequencing_goes_through_tick(bpa):
    L = generate_lts(bpa, [seq(tau, a)])
    assert L.post(seq(tau, a), TAU) == {seq(eps, a)}
    # eps . a hands over to a via the tick of eps
    assert L.post(seq(eps, a), "a") == {eps}


def test_negative_premise_is_read_in_the_fixpoint():
    P = load_bundled_spec("negative_counter")
    f = lambda t: App("f", (t,))
    model = ground_model(P, [f(const("p0")), f(const("p1"))])
    assert model.complete
    assert model.verdict(pos(f(const("p1")), "b", const("zero"))).status == PROVED
    assert model.verdict(pos(f(const("p0")), "b", const("zero"))).status == REFUTED
    assert model.verdict(neg(const("p1"), "a")).status == PROVED


def test_self_defeating_rule_is_incomplete_E007():
    P = parse_spec("tss t\nactions: a\nsymbols: c/0\nrule loop: c -a!-> |- c -a-> c\n")
    model = ground_model(P, [const("c")])
    assert not model.complete
    assert model.verdict(pos(const("c"), "a", const("c"))).status == UNDEFINED
    with pytest.raises(IncompleteTSS) as excinfo:
        generate_lts(P, [const("c")])
    assert_cli_error(excinfo, "E007")


GROWING = "tss t\nactions: a\nsymbols: f/1 c/0\nrule grow: |- x -a-> f(x)\n"


def test_growing_universe_is_flagged_partial():
    P = parse_spec(GROWING)
    L = generate_lts(P, [const("c")], depth_bound=2)
    assert L.partial
    assert App("f", (const("c"),)) in L


def test_growing_universe_strict_is_E006():
    P = parse_spec(GROWING)
    with pytest.raises(SoswCLIError) as excinfo:
        generate_lts(P, [const("c")], depth_bound=2, strict=True)
    assert_cli_error(excinfo, "E006")


def test_open_root_is_rejected():
    P = parse_spec(GROWING)
    with pytest.raises(SoswCLIError) as excinfo:
        generate_lts(P, [App("f", (Var("x"),))])
    assert_cli_error(excinfo, "E006")


# ----------------------------
# Derived relations
# ----------------------------

CHAIN = 'des (0,4,4)\n(0,"tau",1)\n(1,"a",2)\n(2,"tau",3)\n(0,"b",3)\n'


def test_eps_closure_and_weak_steps():
    L = read_aut(CHAIN)
    assert L.eps_closure[0] == {0, 1}
    assert L.eps_then(0, "a") == {2}
    assert L.weak_post(0, "a") == {2, 3}
    assert L.weak_post(2, TAU) == {2, 3}
    assert L.actions == ("a", "b")


def test_restrict_keeps_reachable_part():
    L = read_aut(CHAIN).restrict([2])
    assert set(L.states) == {2, 3}
    assert L.initial == 2


def test_disjoint_union_renumbers():
    L = read_aut(CHAIN)
    U, left, right = L.disjoint_union(L)
    assert len(U.states) == 8
    assert left[0] != right[0]
    assert (right[0], "b", right[3]) in U.transitions


# ----------------------------
# .aut
# ----------------------------

def test_aut_tau_alias():
    L = read_aut('des (0,1,2)\n(0,"i",1)\n', tau_label="i")
    assert L.transitions == {(0, TAU, 1)}


def test_write_aut_puts_initial_first():
    L = LTS((5, 7), frozenset({(7, "a", 5)}), initial=7)
    assert write_aut(L) == 'des (0,1,2)\n(0,"a",1)\n'


def test_written_aut_reads_back():
    L = read_aut(CHAIN)
    again = read_aut(write_aut(L))
    assert again.transitions == L.transitions


def test_aut_labels_with_quotes_and_backslashes():
    label = 'say "hi" \\ bye'
    L = LTS((0, 1), frozenset({(0, label, 1)}), initial=0)
    text = write_aut(L)
    assert text.splitlines()[1] == '(0,"say \\"hi\\" \\\\ bye",1)'
    assert read_aut(text).transitions == {(0, label, 1)}


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("des 0,1,2\n", 1),
    ('des (0,2,2)\n(0,"a",1)\n', 1),
    ('des (0,1,2)\n(0,"a",4)\n', 2),
    ('des (0,1,2)\n(0 "a" 1)\n', 2),
    ('des (5,1,2)\n(0,"a",1)\n', 1),
])
def test_bad_aut_is_E002_with_line(text, line):
    with pytest.raises(ParseError) as excinfo:
        read_aut(text)
    assert_cli_error(excinfo, "E002")
    assert excinfo.value.line == line
