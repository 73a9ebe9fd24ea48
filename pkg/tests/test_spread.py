import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spreadlab.grpzoo import atlas_group, zoo_group
from spreadlab.permcore import BudgetExceeded, Perm, PermGroup, closure_order
from spreadlab.spread import (IdentityInput, auto_s_class, blocker_sets, certify_uniform_spread,
                              class_table, exact_spread, exact_uniform_spread, generates_pair,
                              generating_graph, graph_diameter, nongeneration_probability,
                              parse_certificate, reduce_to_prime_order, replay_certificate,
                              tuple_orbit_reps)

S3 = PermGroup([Perm.from_cycles("(0 1 2)", 3), Perm.from_cycles("(0 1)", 3)])
C5 = PermGroup([Perm.from_cycles("(0 1 2 3 4)", 5)])


def test_reduce_to_prime_order():
    x6 = Perm.from_cycles("(0 1 2 3 4 5)", 6)
    assert reduce_to_prime_order(x6) == x6 ** 3
    x5 = Perm.from_cycles("(0 1 2 3 4)", 5)
    assert reduce_to_prime_order(x5) == x5
    x9 = Perm.from_cycles("(0 1 2 3 4 5 6 7 8)", 9)
    assert reduce_to_prime_order(x9).order() == 3
    with pytest.raises(IdentityInput):
        reduce_to_prime_order(Perm.identity(4))


def test_cyclic_groups_have_infinite_spread():
    assert exact_spread(C5).value == math.inf
    assert exact_uniform_spread(PermGroup([Perm.from_cycles("(0 1)", 2)])).value == math.inf


def test_blockers_match_pair_closure_on_a5():
    G = atlas_group("A5")
    idx = G.index()
    for b in blocker_sets(G):
        for r in range(1, G.order(), 3):
            z = idx.perm(r)
            generates = closure_order([b.anchor, z], G.degree) == 60
            assert (r in b) == (not generates)


@pytest.mark.parametrize("name,s,u", [("A5", 2, 2), ("A6", 2, 2), ("S6", 2, 0)])
def test_exact_values(name, s, u):
    G = atlas_group(name)
    rs, ru = exact_spread(G), exact_uniform_spread(G)
    assert (rs.value, ru.value) == (s, u)
    assert ru.value <= rs.value


def test_cover_is_a_witness():
    G = atlas_group("S6")
    res = exact_spread(G)
    assert len(res.cover) == res.value + 1
    idx = G.index()
    # no element generates together with every anchor of the cover
    for r in range(1, G.order()):
        z = idx.perm(r)
        assert any(not generates_pair(G, x, z) for x in res.cover)


@pytest.mark.parametrize("name", ["A5", "S6", "PGL29"])
def test_reduction_does_not_change_values(name):
    G = atlas_group(name)
    for fn in (exact_spread, exact_uniform_spread):
        assert fn(G, reduce=True).value == fn(G, reduce=False).value


def test_exact_budget():
    with pytest.raises(BudgetExceeded):
        exact_spread(zoo_group("PSp4(3):delta"))


def test_tuple_orbit_reps_s3():
    tab = class_table(S3)
    tcls = next(i for i, c in enumerate(tab) if c.order == 2)
    reps = tuple_orbit_reps(S3, [tcls, tcls], tab)
    assert len(reps) == 2
    assert tuple_orbit_reps(S3, [tcls], tab)[0][0] == (tab[tcls].rep,)


@pytest.mark.parametrize("name", ["A5", "S6"])
def test_tuple_orbit_reps_burnside(name):
    G = atlas_group(name)
    tab = class_table(G)
    ids = tab.prime_order_ids()[:2]
    for a in ids:
        for b in ids:
            reps = tuple_orbit_reps(G, [a, b], tab)
            assert sum(n for _, n in reps) == tab[a].size * tab[b].size


def test_nongeneration_probability_by_enumeration():
    G = atlas_group("A5")
    tab = class_table(G)
    idx = G.index()
    for sc in (3, 4):
        members = [idx.perm(int(r)) for r in tab.members(sc)]
        for xc in tab.prime_order_ids():
            x = tab[xc].rep
            bad = sum(closure_order([x, z], 5) != 60 for z in members)
            assert nongeneration_probability(G, tab, xc, sc) == Fraction(bad, len(members))


def test_certificate_round_trip_and_replay():
    G = atlas_group("A6")
    tab = class_table(G)
    cert = certify_uniform_spread(G, 5, 2, N=20, seed=3, table=tab, group_id="atlas:A6")
    text = cert.to_text()
    again = parse_certificate(text, G.degree)
    assert again.to_text() == text
    assert replay_certificate(G, again, tab) == []
    good_class = exact_uniform_spread(G).class_id
    ok = certify_uniform_spread(G, good_class, 2, N=20, seed=0, table=tab)
    assert ok.success
    # monotonicity in k
    assert certify_uniform_spread(G, good_class, 1, N=20, seed=0, table=tab).success


def test_certifier_fails_above_the_uniform_spread():
    G = atlas_group("S6")
    tab = class_table(G)
    for sc in range(1, len(tab)):
        assert not certify_uniform_spread(G, sc, 1, N=10, seed=0, table=tab).success


def test_tampered_certificate_is_rejected():
    G = atlas_group("A6")
    tab = class_table(G)
    cert = certify_uniform_spread(G, 5, 2, N=20, seed=3, table=tab)
    rec = next(r for r in cert.records if r.witness is not None)
    rec.witness = Perm.identity(G.degree)
    assert replay_certificate(G, cert, tab)


def test_auto_class_prefers_small_probabilities():
    G = atlas_group("PGL29")
    tab = class_table(G)
    sc, probs = auto_s_class(G, tab)
    assert max(probs.values()) < 1


@pytest.mark.parametrize("name", ["A5", "A6"])
def test_generating_graph_diameter(name):
    assert graph_diameter(generating_graph(atlas_group(name))) == 2


def test_s6_graph_has_no_isolated_vertices():
    g = generating_graph(atlas_group("S6"))
    assert g.adjacency.any(axis=1).all()


def test_lazy_blocker_lookup_matches_full_masks():
    from spreadlab.spread import _Blockers, class_table

    G = atlas_group("A6")
    T = class_table(G)
    blk = _Blockers(G, T, 5)
    rng = np.random.default_rng(1)
    for cid in T.prime_order_ids():
        for r in rng.choice(T.members(cid), size=3).tolist():
            full = blk.mask(cid, r)
            again = blk.mask(cid, r)  # served from the packed cache
            pos = rng.choice(blk.size, size=40)
            assert np.array_equal(full, again)
            assert np.array_equal(blk.bad_at(cid, r, pos), full[pos])
