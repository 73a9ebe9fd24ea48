import pytest
from hypothesis import given, settings, strategies as st

from spreadlab.setcover import (greedy_cover, milp_min_cover, min_set_cover, reduce_sets,
                                verify_cover)


@st.composite
def instances(draw):
    n = draw(st.integers(1, 14))
    universe = (1 << n) - 1
    sets = draw(st.lists(st.integers(1, universe), min_size=1, max_size=12))
    # make sure a cover exists
    sets.append(draw(st.sampled_from([universe, universe & ~1 or universe])))
    covered = 0
    for s in sets:
        covered |= s
    if covered != universe:
        sets.append(universe ^ covered)
    return universe, sets


@settings(max_examples=150)
@given(instances())
def test_branch_and_bound_matches_milp(inst):
    universe, sets = inst
    res = min_set_cover(universe, sets)
    assert res.exhaustive and verify_cover(universe, sets, res.chosen)
    assert res.size == len(res.chosen) == milp_min_cover(universe, sets)
    g = greedy_cover(universe, sets)
    assert g is not None and len(g) >= res.size


def test_dominated_sets_removed():
    kept = reduce_sets(0b111, [0b001, 0b011, 0b011, 0b100])
    assert sorted(s for s, _ in kept) == [0b011, 0b100]


def test_uncoverable_universe():
    with pytest.raises(ValueError):
        min_set_cover(0b111, [0b001, 0b010])


def test_empty_universe():
    assert min_set_cover(0, [0b1]).size == 0
