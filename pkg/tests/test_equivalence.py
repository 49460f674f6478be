import random

import pytest
from hypothesis import given, settings, strategies as st

from sosw.equivalence import (
    BASES,
    BRANCHING,
    DELAY,
    STRONG,
    WEAK,
    EquivalenceKind,
    Partition,
    bisimilarity,
    deletion_levels,
    equivalent,
    oracle_bisimilarity,
    random_lts,
    rooted_related,
)
from sosw.errors import SoswCLIError
from sosw.semantics import read_aut


def assert_cli_error(excinfo, code: str, contains: str | None = None):
    err = excinfo.value
    assert isinstance(err, SoswCLIError)
    assert err.code == code
    if contains is not None:
        assert contains in err.msg


ALL_KINDS = [EquivalenceKind(b, r) for b in BASES for r in (False, True)]

# States 0 and 1 are the roots being compared:
#   0 = tau.a, 1 = a
TAU_A = 'des (0,3,4)\n(0,"tau",2)\n(2,"a",3)\n(1,"a",3)\n'


def _kind(base, rooted=False):
    return EquivalenceKind(base, rooted)


# ----------------------------
# Kinds
# ----------------------------

def test_kind_parsing_and_printing():
    k = EquivalenceKind.parse("rooted-branching")
    assert k == _kind(BRANCHING, True)
    assert str(k) == "rooted-branching"
    assert k.unrooted == _kind(BRANCHING)


def test_unknown_kind_E014():
    with pytest.raises(SoswCLIError) as excinfo:
        EquivalenceKind.parse("trace")
    assert_cli_error(excinfo, "E014", "trace")


def test_unknown_method_E014():
    L = read_aut(TAU_A)
    with pytest.raises(SoswCLIError) as excinfo:
        bisimilarity(L, "weak", method="magic")
    assert_cli_error(excinfo, "E014")


# ----------------------------
# Small examples
# ----------------------------

def test_tau_prefix():
    L = read_aut(TAU_A)
    assert not equivalent(L, 0, 1, STRONG)
    for base in (BRANCHING, DELAY, WEAK):
        assert equivalent(L, 0, 1, base)
        assert not equivalent(L, 0, 1, _kind(base, True))


def test_deletion_levels_record_rounds():
    L = read_aut(TAU_A)
    levels = deletion_levels(L, STRONG)
    assert levels[(0, 1)] >= 1
    assert (0, 0) not in levels
    assert deletion_levels(L, WEAK).get((0, 1)) is None


def test_rooted_clause_uses_unrooted_classes():
    L = read_aut(TAU_A)
    assert rooted_related(L, 2, 1, _kind(DELAY, True))
    assert not rooted_related(L, 0, 1, _kind(DELAY, True))


def test_partition_helpers():
    p = Partition.from_blocks([[3, 1], [2], []])
    assert p.blocks == ((1, 3), (2,))
    assert p.same(1, 3) and not p.same(1, 2)
    coarse = Partition.from_blocks([[1, 2, 3]])
    assert p.refines(coarse) and not coarse.refines(p)
    assert p.to_dict() == {"blocks": [["1", "3"], ["2"]]}


def test_oracle_cap_E012():
    rng = random.Random(1)
    L = random_lts(rng, max_states=30)
    while len(L.states) <= 4:
        L = random_lts(rng, max_states=30)
    with pytest.raises(SoswCLIError) as excinfo:
        oracle_bisimilarity(L, "strong", cap=4)
    assert_cli_error(excinfo, "E012")


# ----------------------------
# Cross-checks on random systems
# ----------------------------

@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_fixpoint_agrees_with_oracle(kind, seeded_systems):
    assert max(len(L.states) for L in seeded_systems) <= 12
    for L in seeded_systems:
        assert bisimilarity(L, kind) == oracle_bisimilarity(L, kind), L.to_dict()


def test_seeded_systems_use_three_actions_and_tau(seeded_systems):
    used = set().union(*(L.alphabet for L in seeded_systems))
    assert used == {"a", "b", "c", "tau"}
    assert any(len(L.states) > 8 for L in seeded_systems)


def test_inclusion_chain_on_seeded_systems(seeded_systems):
    chain = [_kind(STRONG), _kind(BRANCHING), _kind(DELAY), _kind(WEAK)]
    for L in seeded_systems:
        part = {k: bisimilarity(L, k) for k in chain}
        for finer, coarser in zip(chain, chain[1:]):
            assert part[finer].refines(part[coarser]), L.to_dict()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([STRONG, DELAY, WEAK, BRANCHING]))
def test_saturation_agrees_with_fixpoint(seed, base):
    L = random_lts(random.Random(seed), max_states=9, actions=("a", "b"), density=0.5)
    assert bisimilarity(L, base, method="saturation") == bisimilarity(L, base)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_inclusion_chain(seed):
    L = random_lts(random.Random(seed), max_states=9, actions=("a", "b"), density=0.5)
    part = {k: bisimilarity(L, k) for k in ALL_KINDS}
    chain = [_kind(STRONG), _kind(BRANCHING), _kind(DELAY), _kind(WEAK)]
    for finer, coarser in zip(chain, chain[1:]):
        assert part[finer].refines(part[coarser])
    rooted = [_kind(BRANCHING, True), _kind(DELAY, True), _kind(WEAK, True)]
    for finer, coarser in zip(rooted, rooted[1:]):
        assert part[finer].refines(part[coarser])
    for base in BASES:
        assert part[_kind(base, True)].refines(part[_kind(base)])
    assert part[_kind(STRONG)].refines(part[_kind(BRANCHING, True)])
