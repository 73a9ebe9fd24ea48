from collections import Counter

import numpy as np
import pytest

from spreadlab.conjtab import conjugacy_classes, coset_classes
from spreadlab.ffield import make_field
from spreadlab.grpzoo import (SemilinearMap, standard_symplectic_form, symplectic_generators,
                              zoo_group)
from spreadlab.linalg import MatF
from spreadlab.shintani import (burnside_total, centralizer_profile, epower_order_profile,
                                fixed_counts, fixed_subspace_profile, norm_identity_samples,
                                norm_square_coherence, similarity_norm_identity,
                                stable_orbit_count, subspaces, sz_fixed_subgroup_check,
                                verify_shintani)

BIG = "Sp4(4):phi"
SMALL = "Sp4(2)"


@pytest.fixture(scope="module")
def report():
    return verify_shintani(zoo_group(BIG), zoo_group(SMALL),
                           subspace_specs=((1, "totally-isotropic"), (2, "totally-isotropic"),
                                           (2, "nondegenerate")))


def test_small_side_census():
    # Sp4(2) is S6: 11 classes, element orders from the cycle types of S6
    tab = conjugacy_classes(zoo_group(SMALL))
    assert sorted(c.order for c in tab) == [1, 2, 2, 2, 3, 3, 4, 4, 5, 6, 6]
    assert sorted(c.centralizer_order for c in tab) == [5, 6, 6, 8, 8, 16, 18, 18, 48, 48, 720]


def test_profiles_match(report):
    for name in report.stats:
        assert report.verdict(name) == "match", name
    assert all(report.extra.values())
    assert report.ok


def test_fixed_subspace_profiles(report):
    big, small = report.stats["fixed_1_totally-isotropic"]
    assert big == small == [0, 0, 0, 1, 1, 1, 3, 3, 3, 7, 15]


def test_orthogonal_totals(report):
    big, small = report.stats["orthogonal_total"]
    assert big == small and min(big) >= 1


def test_pairing_is_reported_not_broken(report):
    keys = set(report.pairing) | set(report.ambiguous)
    assert len(report.pairing) + len(report.ambiguous) == len(keys)
    lines = report.lines()
    assert lines[-1] == "verdict = match"
    assert f"pairing.ambiguous = {len(report.ambiguous)}" in lines


def test_trivial_theta_gives_ordinary_profiles():
    T = zoo_group(SMALL)
    tab = conjugacy_classes(T)
    assert centralizer_profile(T) == sorted(c.centralizer_order for c in tab)
    assert epower_order_profile(T, e=1) == sorted(c.order for c in tab)
    assert centralizer_profile(T, theta=T.gens[0]) == centralizer_profile(T)


def test_burnside_on_small_side():
    T = zoo_group(SMALL)
    tab = conjugacy_classes(T)
    for k, flavor in ((1, "totally-isotropic"), (2, "totally-isotropic"), (2, "nondegenerate")):
        spaces = subspaces(T.action, T.form, k, flavor)
        counts = fixed_counts(tab, spaces)
        assert burnside_total(tab, counts) == T.order() * stable_orbit_count(T.gens, None, spaces)


def test_subspace_counts_sp42():
    T = zoo_group(SMALL)
    assert len(subspaces(T.action, T.form, 1)) == 15
    assert len(subspaces(T.action, T.form, 2, "totally-isotropic")) == 15
    assert len(subspaces(T.action, T.form, 2, "nondegenerate")) == 20
    assert len(subspaces(T.action, T.form, 2, "any")) == 35


def test_norm_identity_on_isometries():
    F = make_field(3, 2)
    form = standard_symplectic_form(2, F)
    for A in symplectic_generators(2, F):
        assert similarity_norm_identity(SemilinearMap(A, 1), form, 2)


def test_norm_identity_samples():
    assert norm_identity_samples(2, make_field(3, 2), 2, samples=200) == 0
    assert norm_identity_samples(1, make_field(5, 2), 2, samples=100) == 0


@pytest.mark.parametrize("p,f,e", [(3, 3, 3), (5, 3, 3), (7, 3, 3), (3, 5, 5)])
def test_norm_square_coherence(p, f, e):
    assert norm_square_coherence(p, f, e)


def test_norm_square_coherence_needs_odd_e():
    with pytest.raises(ValueError):
        norm_square_coherence(3, 2, 2)


def test_sz_fixed_subgroup():
    c = sz_fixed_subgroup_check(zoo_group(SMALL))
    assert c.ok
    assert c.fixed_orders == {20: 36}
    assert c.graph_order == 720
