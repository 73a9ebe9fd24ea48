import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spreadlab.grpzoo import atlas_group, zoo_group
from spreadlab.permcore import (DegreeMismatch, ElementNotInGroup, ParseError, Perm, PermGroup,
                                closure_order, compose, conj_orbit_with_stabilizer,
                                derived_subgroup, inverse, is_generating, power, schreier_sims)

A5 = PermGroup([Perm.from_cycles("(0 1 2 3 4)", 5), Perm.from_cycles("(0 1 2)", 5)])
S5 = PermGroup([Perm.from_cycles("(0 1 2 3 4)", 5), Perm.from_cycles("(0 1)", 5)])
S6 = PermGroup([Perm.from_cycles("(0 1 2 3 4 5)", 6), Perm.from_cycles("(0 1)", 6)])

perms5 = st.permutations(range(5)).map(Perm.from_images)


def test_composition_convention():
    # points act on the right: first (0 1), then (1 2)
    a, b = Perm.from_cycles("(0 1)", 3), Perm.from_cycles("(1 2)", 3)
    assert compose(a, b) == Perm.from_cycles("(0 2 1)", 3)
    assert (a * b)[0] == b[a[0]]


def test_inverse_power_identity():
    c = Perm.from_cycles("(0 1 2 3 4)", 5)
    assert compose(c, inverse(c)).is_identity()
    assert power(c, 5).is_identity()
    assert power(c, -1) == inverse(c)


def test_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        compose(Perm.identity(3), Perm.identity(4))


def test_cycle_parse_errors():
    for bad in ["(0 1", "(0 0)", "(0 7)", "(a b)"]:
        with pytest.raises(ParseError):
            Perm.from_cycles(bad, 5)


@given(perms5, perms5, perms5)
def test_group_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a * b).inverse() == b.inverse() * a.inverse()
    assert a ** a.order() == Perm.identity(5)


@given(perms5)
def test_cycle_string_round_trip(a):
    assert Perm.from_cycles(str(a), 5) == a


@pytest.mark.parametrize("G,n", [(A5, 60), (S5, 120), (S6, 720)])
def test_orders(G, n):
    assert G.order() == n == closure_order(G.gens, G.degree)


def test_sp42_on_vectors():
    from spreadlab.ffield import make_field
    from spreadlab.grpzoo import GroupSpec, classical_group

    G = classical_group(GroupSpec("Sp", 2, make_field(2), domain="vectors"))
    assert G.degree == 15 and G.order() == 720


@pytest.mark.parametrize("name", ["A5", "A6", "S6", "PGL29", "M10", "PGammaL29"])
def test_chain_order_equals_closure(name):
    G = atlas_group(name)
    fresh = schreier_sims(G.gens, G.degree)
    assert fresh.order() == closure_order(G.gens, G.degree)


def test_chain_invariants():
    G = atlas_group("PGammaL29")
    ch = G.chain
    assert int(np.prod(ch.orbit_lengths())) == G.order()
    for i, lv in enumerate(ch.levels):
        for g in lv.gens:
            assert all(g[b] == b for b in ch.base[:i])
        for p, u in lv.trans.items():
            assert u[lv.base] == p
    rng = np.random.default_rng(1)
    for _ in range(50):
        g = Perm.identity(G.degree)
        for _ in range(10):
            g = g * G.gens[int(rng.integers(len(G.gens)))]
        assert G.contains(g)


def test_membership():
    assert not A5.contains(Perm.from_cycles("(0 1)", 5))
    assert A5.contains(Perm.identity(5))
    assert A5.contains(Perm.from_cycles("(0 1)(2 3)", 5))
    elements = {Perm.from_images(p) for p in itertools.permutations(range(5))}
    assert sum(A5.contains(x) for x in elements) == 60


def test_random_element_trivial_and_c2():
    rng = np.random.default_rng(0)
    T = PermGroup([Perm.identity(3)], 3)
    assert all(T.random_element(rng).is_identity() for _ in range(20))
    C2 = PermGroup([Perm.from_cycles("(0 1)", 2)])
    counts = Counter(C2.random_element(rng) for _ in range(2000))
    assert len(counts) == 2 and abs(counts[Perm.identity(2)] - 1000) < 5 * 23


def test_random_element_uniform_on_s3():
    rng = np.random.default_rng(7)
    S3 = PermGroup([Perm.from_cycles("(0 1 2)", 3), Perm.from_cycles("(0 1)", 3)])
    counts = Counter(S3.random_element(rng) for _ in range(6000))
    sigma = (6000 * (1 / 6) * (5 / 6)) ** 0.5
    assert len(counts) == 6 and all(abs(c - 1000) < 5 * sigma for c in counts.values())


def test_is_generating_examples():
    S5g = S5
    assert is_generating(S5g, [Perm.from_cycles("(0 1 2 3 4)", 5), Perm.from_cycles("(0 1)", 5)])
    assert not is_generating(S5g, [Perm.from_cycles("(0 1 2)", 5), Perm.from_cycles("(0 1)", 5)])
    assert not is_generating(S5g, [Perm.identity(5)])
    with pytest.raises(ElementNotInGroup):
        is_generating(A5, [Perm.from_cycles("(0 1)", 5)])


@settings(max_examples=60)
@given(st.data())
def test_is_generating_agrees_with_closure(data):
    G = data.draw(st.sampled_from([A5, S5, atlas_group("A6"), atlas_group("M10")]))
    rng = np.random.default_rng(data.draw(st.integers(0, 10 ** 6)))
    x, y = G.random_element(rng), G.random_element(rng)
    assert is_generating(G, [x, y]) == (closure_order([x, y], G.degree) == G.order())


def test_conjugacy_orbit_examples():
    size, C = conj_orbit_with_stabilizer(S6, Perm.from_cycles("(0 1)", 6))
    assert (size, C.order()) == (15, 48)
    size, C = conj_orbit_with_stabilizer(A5, Perm.identity(5))
    assert (size, C.order()) == (1, 60)
    size, C = conj_orbit_with_stabilizer(A5, Perm.from_cycles("(0 1 2 3 4)", 5))
    assert (size, C.order()) == (12, 5)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_orbit_stabilizer_identity(seed):
    G = atlas_group("PGammaL29")
    x = G.random_element(np.random.default_rng(seed))
    size, C = conj_orbit_with_stabilizer(G, x)
    assert size * C.order() == G.order()
    assert all(g * x == x * g for g in C.gens)


def test_derived_subgroups():
    assert derived_subgroup(S6).order() == 360
    assert derived_subgroup(A5).order() == 60
    SO = zoo_group("SO3(5)")
    assert SO.order() // derived_subgroup(SO).order() == 2
