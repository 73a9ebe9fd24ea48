from math import lcm

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spreadlab import linalg as la
from spreadlab.ffield import make_field
from spreadlab.grpzoo import (GroupSpec, NotASimilarity, SemilinearMap, UnsupportedCase,
                              atlas_group, classical_group, delta_matrix, element_A, element_B,
                              element_C, element_D, element_order_census, preserves_form,
                              similarity_tau, standard_symplectic_form, witness_element,
                              zoo_group)
from spreadlab.linalg import MatF


def test_symplectic_form_shapes():
    F2 = make_field(2)
    assert standard_symplectic_form(1, F2).gram.tolist() == [[0, 1], [1, 0]]
    F3 = make_field(3)
    J = standard_symplectic_form(2, F3).gram
    assert la.rank(F3, J) == 4
    assert all(J[i, i] == 0 for i in range(4))
    assert np.array_equal((J + J.T) % 3, np.zeros((4, 4), dtype=J.dtype))


@pytest.mark.parametrize("spec,degree,order", [
    (GroupSpec("Sp", 2, make_field(2), domain="vectors"), 15, 720),
    (GroupSpec("Sp", 2, make_field(3)), 40, 25920),
    (GroupSpec("Sp", 1, make_field(5), domain="vectors"), 24, 120),
    (GroupSpec("GSp", 1, make_field(3), domain="vectors"), 8, 48),
    (GroupSpec("SO", 1, make_field(5)), 124, 120),
    (GroupSpec("Omega", 1, make_field(5)), 124, 60),
])
def test_classical_orders(spec, degree, order):
    G = classical_group(spec)
    assert (G.degree, G.order()) == (degree, order)
    for A in G.matrix_gens:
        tau = int(similarity_tau(A.A, G.form)) if spec.family in ("Sp", "GSp") else 1
        assert preserves_form(A.A, G.form, tau)


def test_sp44_and_extensions():
    T = zoo_group("Sp4(4)")
    assert (T.degree, T.order()) == (85, 979200)
    G = zoo_group("Sp4(4):phi")
    assert G.order() == 1958400 and G.inner.order() == 979200
    H = zoo_group("PSp4(3):delta")
    assert (H.degree, H.order()) == (40, 51840)


def test_similarity_factor_examples():
    F = make_field(5)
    form = standard_symplectic_form(2, F)
    A = delta_matrix(2, F)
    assert int(similarity_tau(A, form)) == F.zeta
    lam = 2
    S = MatF(F, np.diag([lam] * 4))
    assert int(similarity_tau(S, form)) == F.mul(lam, lam)
    bad = MatF(F, np.diag([1, 2, 1, 1]))
    with pytest.raises(NotASimilarity):
        similarity_tau(bad, form)


def test_similarity_factor_is_multiplicative():
    F = make_field(3, 2)
    form = standard_symplectic_form(1, F)
    rng = np.random.default_rng(0)
    mats = []
    while len(mats) < 12:
        M = MatF(F, rng.integers(0, F.q, size=(2, 2)))
        if la.det(F, M.a):
            mats.append(M)  # every invertible 2x2 matrix is a similarity of an alternating form
    for a in mats:
        for b in mats[:4]:
            t = similarity_tau(a * b, form)
            assert int(t) == F.mul(int(similarity_tau(a, form)), int(similarity_tau(b, form)))


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_semilinear_composition_is_associative(seed):
    F = make_field(2, 2)
    rng = np.random.default_rng(seed)
    maps = []
    while len(maps) < 3:
        M = MatF(F, rng.integers(0, 4, size=(3, 3)))
        if la.det(F, M.a):
            maps.append(SemilinearMap(M, int(rng.integers(0, 2))))
    a, b, c = maps
    assert (a * b) * c == a * (b * c)
    V = rng.integers(0, 4, size=(5, 3))
    assert np.array_equal((a * b).apply(V), b.apply(a.apply(V)))
    assert (a * a.inverse()) == SemilinearMap(MatF.identity(F, 3), 0)


def test_atlas_orders_and_labels():
    orders = {n: atlas_group(n).order() for n in ["A5", "A6", "S6", "PGL29", "M10", "PGammaL29"]}
    assert orders == {"A5": 60, "A6": 360, "S6": 720, "PGL29": 720, "M10": 720,
                      "PGammaL29": 1440}
    assert 10 in element_order_census(atlas_group("PGL29"))
    assert max(element_order_census(atlas_group("S6"))) == 6
    m10 = element_order_census(atlas_group("M10"))
    assert 10 not in m10 and max(m10) == 8


@pytest.mark.parametrize("d,q0", [(1, 3), (2, 2), (1, 5), (2, 3)])
def test_element_A_orders(d, q0):
    A = element_A(d, make_field(q0))
    assert A.order() == q0 ** d + 1


@pytest.mark.parametrize("d,q0,order", [(2, 3, 8), (3, 2, 7), (2, 2, 3)])
def test_element_B(d, q0, order):
    F = make_field(q0)
    B = element_B(d, F)
    assert B.order() == order
    J = standard_symplectic_form(d, F).gram
    # the odd and even coordinates span totally isotropic spaces
    for idx in (list(range(0, 2 * d, 2)), list(range(1, 2 * d, 2))):
        assert not J[np.ix_(idx, idx)].any()
        rows = B.a[idx]
        assert la.rank(F, np.vstack([rows, np.eye(2 * d, dtype=np.int64)[idx]])) == d


def test_element_C_small_case():
    F = make_field(3)
    C, A = element_C(1, F), element_A(1, F)
    assert C ** 2 == A
    assert int(similarity_tau(C, C.form)) == F.zeta
    assert not preserves_form(C, C.form)
    D = element_D(2, F)
    assert int(similarity_tau(D, D.form)) == F.zeta


def test_element_C_even_characteristic():
    from spreadlab.grpzoo import EvenCharacteristic

    with pytest.raises(EvenCharacteristic):
        element_C(1, make_field(2))


@pytest.mark.parametrize("case,m,q0,order", [("S", 3, 2, 15), ("S", 4, 3, lcm(4, 26)),
                                             ("S4", 2, 2, 5)])
def test_witness_element_orders(case, m, q0, order):
    y = witness_element(case, m, make_field(q0))
    assert y.order() == order == y.predicted_order
    assert preserves_form(y, y.form)


def test_witness_element_rejects_unlisted_cases():
    with pytest.raises(UnsupportedCase):
        witness_element("S", 2, make_field(3))
    with pytest.raises(UnsupportedCase):
        witness_element("O", 3, make_field(2))
