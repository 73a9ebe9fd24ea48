from collections import Counter

import numpy as np
import pytest

from spreadlab.conjtab import (NotInUnderlyingSet, NotNormalizing, class_of, coset_classes,
                               conjugacy_classes, format_table)
from spreadlab.grpzoo import atlas_group, zoo_group
from spreadlab.permcore import BudgetExceeded, Perm, PermGroup

S6_NATURAL = PermGroup([Perm.from_cycles("(0 1 2 3 4 5)", 6), Perm.from_cycles("(0 1)", 6)])


def test_s6_has_eleven_classes():
    assert len(conjugacy_classes(S6_NATURAL)) == 11


def test_a5_class_sizes():
    T = conjugacy_classes(atlas_group("A5"))
    assert sorted(T.sizes()) == [1, 12, 12, 15, 20]


@pytest.mark.parametrize("name", ["A5", "A6", "S6", "M10", "PGL29", "PGammaL29"])
def test_partition_and_centralizers(name):
    G = atlas_group(name)
    T = conjugacy_classes(G)
    assert sum(T.sizes()) == G.order()
    labels = T.labels
    assert len(labels) == G.order() and set(np.unique(labels)) == set(range(len(T)))
    for c in T:
        assert c.size * c.centralizer_order == G.order()
    keys = [(c.order, c.size) for c in T]
    assert keys == sorted(keys)


@pytest.mark.parametrize("name", ["A6", "M10", "PGammaL29"])
def test_power_map_consistency(name):
    from spreadlab.ffield import prime_factors

    G = atlas_group(name)
    T = conjugacy_classes(G)
    for cid, c in enumerate(T):
        if c.order == 1:
            continue
        members = [G.index().perm(int(r)) for r in T.members(cid)[:40]]
        for r in prime_factors(c.order):
            images = {class_of(T, x ** (c.order // r)) for x in members}
            assert len(images) == 1


def test_class_of_examples():
    G = atlas_group("A6")
    T = conjugacy_classes(G)
    rng = np.random.default_rng(3)
    for cid, c in enumerate(T):
        assert class_of(T, c.rep) == cid
        g = G.random_element(rng)
        assert class_of(T, c.rep ** g) == cid
    assert T[class_of(T, Perm.identity(G.degree))].size == 1
    with pytest.raises(NotInUnderlyingSet):
        class_of(T, Perm.from_cycles("(0 1)", G.degree))


def test_a6_outer_coset_in_s6():
    # the odd cycle types of S6 are 2, 2^3, 4, 3.2 and 6, and none splits
    A6 = PermGroup([Perm.from_cycles("(0 1 2)", 6), Perm.from_cycles("(1 2 3 4 5)", 6)])
    theta = Perm.from_cycles("(0 1)", 6)
    tab = coset_classes(A6, theta)
    assert len(tab) == 5
    assert sum(tab.sizes()) == 360
    types = Counter(tuple(sorted(Perm(list(c.rep.img)).cycle_type())) for c in tab)
    assert len(types) == 5
    for c in tab:
        assert c.size * c.centralizer_order == 360


def test_inner_theta_gives_ordinary_classes():
    G = atlas_group("A5")
    tab = coset_classes(G, Perm.identity(G.degree))
    assert sorted(tab.sizes()) == sorted(conjugacy_classes(G).sizes())


def test_sp44_phi_coset_has_eleven_classes():
    G = zoo_group("Sp4(4):phi")
    tab = coset_classes(G.inner, G.theta_perm)
    assert len(tab) == 11 and sum(tab.sizes()) == G.inner.order()


def test_theta_must_normalize():
    A5 = PermGroup([Perm.from_cycles("(0 1 2 3 4)", 6), Perm.from_cycles("(0 1 2)", 6)])
    with pytest.raises(NotNormalizing):
        coset_classes(A5, Perm.from_cycles("(4 5)", 6))


def test_budget_enforced():
    with pytest.raises(BudgetExceeded):
        conjugacy_classes(atlas_group("PGammaL29"), budget=100)


def test_table_format_is_stable():
    T = conjugacy_classes(atlas_group("A5"))
    text = format_table(T)
    assert text == format_table(conjugacy_classes(atlas_group("A5")))
    assert text.splitlines()[0].startswith("class 0 order=1 size=1")
