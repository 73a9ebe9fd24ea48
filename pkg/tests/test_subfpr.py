from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spreadlab.ffield import make_field
from spreadlab.grpzoo import (SemilinearMap, atlas_group, standard_orthogonal_form,
                              standard_symplectic_form, zoo_group)
from spreadlab.linalg import MatF
from spreadlab.permcore import Perm, PermGroup
from spreadlab.spread import class_table, exact_uniform_spread
from spreadlab.subfpr import (BoundFormula, EmptyOvergroupList, HypothesisViolated, NotLinear,
                              NotSelfNormalizing, OddCharacteristic, SubgroupHandle,
                              bound_holds, bound_value, conjugates_containing,
                              curated_sp4_phi_maximals, exact_fpr, fpr_crosscheck,
                              handle_from_group, maximal_subgroups_tiny, nu, overgroup_count,
                              point_image, power_interval, prob_bound_report, quadratic_forms,
                              singular_count, stabilizer_handle)

A5 = atlas_group("A5")


def a4_handle():
    return stabilizer_handle(A5, 4, "A4", act=point_image)


def test_fpr_of_double_transposition_on_points():
    T = class_table(A5)
    x = Perm.from_cycles("(0 1)(2 3)", 5)
    cid = next(i for i, c in enumerate(T) if c.order == 2)
    H = a4_handle()
    assert H.order == 12
    assert exact_fpr(A5, T, cid, H) == Fraction(1, 5)
    assert fpr_crosscheck(A5, T, cid, H) == (Fraction(1, 5), Fraction(1, 5))
    assert overgroup_count(A5, T, cid, H) == 1 == conjugates_containing(A5, x, H)
    assert exact_fpr(A5, T, 0, H) == 1
    assert overgroup_count(A5, T, 0, H) == 5
    five = next(i for i, c in enumerate(T) if c.order == 5)
    assert exact_fpr(A5, T, five, H) == 0


@pytest.mark.parametrize("name", ["A5", "A6", "S6", "M10"])
def test_overgroup_formula_matches_enumeration(name):
    G = atlas_group(name)
    T = class_table(G)
    for H in maximal_subgroups_tiny(G):
        for cid in T.prime_order_ids():
            assert overgroup_count(G, T, cid, H, check=False) == \
                conjugates_containing(G, T[cid].rep, H)


def test_not_self_normalizing():
    T = class_table(A5)
    V4 = PermGroup([Perm.from_cycles("(0 1)(2 3)", 5), Perm.from_cycles("(0 2)(1 3)", 5)])
    with pytest.raises(NotSelfNormalizing):
        overgroup_count(A5, T, 1, handle_from_group(V4, A5, "V4"))


def test_handle_rejects_foreign_generators():
    with pytest.raises(ValueError):
        SubgroupHandle([Perm.from_cycles("(0 1)", 5)], A5, 2)


def test_maximal_subgroups_of_tiny_groups():
    assert [h.order for h in maximal_subgroups_tiny(A5)] == [12, 10, 6]
    s6 = maximal_subgroups_tiny(atlas_group("S6"))
    assert s6[0].order == 360
    C7 = PermGroup([Perm.from_cycles("(0 1 2 3 4 5 6)", 7)])
    assert [h.order for h in maximal_subgroups_tiny(C7)] == [1]


@pytest.mark.parametrize("name", ["A5", "S6", "A6"])
def test_probability_bound_and_verdict(name):
    G = atlas_group(name)
    T = class_table(G)
    M = maximal_subgroups_tiny(G)
    u = exact_uniform_spread(G).value
    for sc in range(1, len(T)):
        r = prob_bound_report(G, T, sc, M)
        assert r.holds
        assert r.verdict <= u


def test_empty_overgroup_list():
    T = class_table(A5)
    with pytest.raises(EmptyOvergroupList):
        prob_bound_report(A5, T, 3, [a4_handle()])


def test_nu_examples():
    F = make_field(3)
    I4 = MatF(F, np.eye(4, dtype=np.int64))
    assert nu(I4) == 0
    J = np.eye(4, dtype=np.int64)
    J[0, 1] = 1
    assert nu(MatF(F, J)) == 1
    F5 = make_field(5)
    D = np.diag([4, 4, 4, 4, 1])
    assert nu(MatF(F5, D)) == 1
    F4 = make_field(2, 2)
    with pytest.raises(NotLinear):
        nu(SemilinearMap(MatF(F4, np.eye(2, dtype=np.int64)), 1))


@given(st.lists(st.integers(1, 8), min_size=4, max_size=4))
def test_nu_of_diagonal_matrix(diag):
    F = make_field(3, 2)
    d = np.array(diag, dtype=np.int64)
    most = max(np.bincount(d))
    assert nu(MatF(F, np.diag(d))) == 4 - most


@pytest.mark.parametrize("q,plus,minus", [(2, 10, 6), (4, 136, 120)])
def test_quadratic_form_census(q, plus, minus):
    F = make_field(2, 1 if q == 2 else 2)
    forms = quadratic_forms(standard_symplectic_form(2, F))
    assert len(forms) == q ** 4
    signs = [s for _, s in forms]
    assert (signs.count(1), signs.count(-1)) == (plus, minus)
    # plus type has q^3 + q^2 - q singular vectors, minus type q^3 - q^2 + q (zero included)
    for Q, s in forms[:: max(1, len(forms) // 20)]:
        expect = q ** 3 + s * (q ** 2 - q)
        assert singular_count(Q) == expect


def test_quadratic_forms_need_even_q():
    with pytest.raises(OddCharacteristic):
        quadratic_forms(standard_symplectic_form(2, make_field(3)))


def test_bound_examples():
    assert bound_value(BoundFormula("sp4-nonsubspace", 2, 4)).rational() == Fraction(1, 3)
    assert bound_value(BoundFormula("quadratic-form", 2, 4, nu=2)).rational() == Fraction(1, 8)
    assert bound_value(BoundFormula("nondegenerate-2space", 3, 4)).rational() == \
        Fraction(2, 4 ** 5)
    with pytest.raises(HypothesisViolated):
        bound_value(BoundFormula("totally-isotropic", 2, 4, k=1))
    with pytest.raises(HypothesisViolated):
        bound_value(BoundFormula("quadratic-form", 2, 3))


def test_irrational_bound_comparison():
    # (2q+2)^(1/2) / q^(m-1) at q = 2, m = 3: sqrt(6)/4 = 0.6123...
    b = bound_value(BoundFormula("nonsubspace-symplectic", 3, 2))
    assert b.rational() is None
    assert bound_holds(b, Fraction(612, 1000), strict=True)
    assert not bound_holds(b, Fraction(613, 1000), strict=True)
    lo, hi = b.interval()
    assert lo < hi and float(lo) == pytest.approx(6 ** 0.5 / 4)


@given(st.fractions(min_value=Fraction(1, 50), max_value=50), st.sampled_from(
    [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(-1, 2), Fraction(5, 4)]))
def test_power_interval_encloses(x, e):
    lo, hi = power_interval(x, e)
    v = float(x) ** float(e)
    assert float(lo) <= v * (1 + 1e-12) and v <= float(hi) * (1 + 1e-12)
    assert hi - lo <= Fraction(1, 10 ** 30) * max(1, hi)


def test_curated_maximals_of_sp44_phi():
    G = zoo_group("Sp4(4):phi")
    M = curated_sp4_phi_maximals(G)
    got = {h.label: (h.order, h.index) for h in M}
    assert got == {"P1": (23040, 85), "P2": (23040, 85), "Sp4(2)x2": (1440, 1360),
                   "O+4(4)": (14400, 136), "O-4(4)": (16320, 120),
                   "Sp2(4)wrS2": (14400, 136), "Sp2(16)": (16320, 120)}


def test_curated_list_needs_the_right_group():
    with pytest.raises(HypothesisViolated):
        curated_sp4_phi_maximals(zoo_group("PSp4(3):delta"))
