"""Finite checks of the statistics preserved by Shintani descent.

The descent map itself is never computed.  Instead each side's
conjugation-invariant data (centralizer orders, orders of e-th powers,
fixed subspace counts, quadratic-form overgroup counts) is computed
independently and compared as multisets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .conjtab import coset_classes, conjugacy_classes
from .ffield import is_square, make_field
from .grpzoo import (NotASimilarity, SemilinearMap, delta_matrix, similarity_tau,
                     standard_symplectic_form, symplectic_generators)
from .linalg import MatF
from .permcore import PermGroup, set_image
from .spread import table_group
from .subfpr import OddCharacteristic, quadratic_forms, singular_points


class SearchExhausted(RuntimeError):
    pass


# -- profiles -----------------------------------------------------------------

def _classes(T, theta):
    if theta is None or T.contains(theta):
        return conjugacy_classes(T) if theta is None else coset_classes(T, theta)
    return coset_classes(T, theta)


def centralizer_profile(T, theta=None, table=None):
    """Sorted ``|C_T(t theta)|`` over the ``T``-classes of ``T theta``."""
    table = table or _classes(T, theta)
    return sorted(c.centralizer_order for c in table)


def epower_order_profile(T, theta=None, e=1, table=None):
    """Sorted orders of ``(t theta)^e`` over class representatives."""
    table = table or _classes(T, theta)
    return sorted((c.rep ** e).order() for c in table)


def subspaces(action, form, k, flavor="totally-isotropic"):
    """All ``k``-subspaces of the given flavor as frozensets of projective
    point indices.  ``flavor`` is "totally-isotropic", "nondegenerate" or
    "any"."""
    if not action.projective:
        raise ValueError("subspaces are enumerated on the projective action")
    F = action.F
    layer = {frozenset([p]): (p,) for p in range(action.degree)}
    for _ in range(k - 1):
        nxt = {}
        for pts, basis in layer.items():
            for p in range(basis[-1] + 1, action.degree):
                if p in pts:
                    continue
                nb = basis + (p,)
                span = _span_points(action, action.vectors[list(nb)])
                nxt.setdefault(span, nb)
        layer = nxt
    out = []
    for pts, basis in layer.items():
        B = action.vectors[list(basis)]
        gram = la.fmatmul(F, la.fmatmul(F, B, form.gram), B.T)
        if flavor == "totally-isotropic" and gram.any():
            continue
        if flavor == "nondegenerate" and la.rank(F, gram) < k:
            continue
        out.append(pts)
    return sorted(out, key=sorted)


def _span_points(action, B):
    F = action.F
    q = F.q
    k = len(B)
    add, mul, _, _ = F.tables()
    codes = np.arange(1, q ** k)
    C = np.stack([(codes // q ** i) % q for i in range(k)], axis=1)
    W = np.zeros((len(C), action.n), dtype=np.int64)
    for i in range(k):
        W = add[W, mul[C[:, i][:, None], B[i][None, :]]]
    return frozenset(action.index_of(W).tolist())


def fixed_subspace_profile(T, theta=None, k=1, flavor="totally-isotropic", action=None,
                           form=None, table=None):
    """Sorted counts of fixed ``k``-spaces of the flavor per class rep."""
    table = table or _classes(T, theta)
    action = action or T.action
    form = form or T.form
    spaces = subspaces(action, form, k, flavor)
    return sorted(fixed_counts(table, spaces))


def burnside_total(table, counts_by_class):
    """``sum |class| * fix`` over classes, in class order."""
    return sum(c.size * f for c, f in zip(table, counts_by_class))


def stable_orbit_count(gens, theta, spaces):
    """Number of ``<gens>``-orbits on ``spaces`` mapped to themselves by
    ``theta``.  Summing fixed points over the coset ``T theta`` gives
    ``|T|`` times this number."""
    pos = {s: i for i, s in enumerate(spaces)}
    orbit_id = [-1] * len(spaces)
    k = 0
    for i, s in enumerate(spaces):
        if orbit_id[i] >= 0:
            continue
        orbit_id[i] = k
        stack = [s]
        while stack:
            x = stack.pop()
            for g in gens:
                y = set_image(x, g)
                if orbit_id[pos[y]] < 0:
                    orbit_id[pos[y]] = k
                    stack.append(y)
        k += 1
    if theta is None:
        return k
    stable = set()
    for i, s in enumerate(spaces):
        if orbit_id[pos[set_image(s, theta)]] == orbit_id[i]:
            stable.add(orbit_id[i])
    return len(stable)


def fixed_counts(table, spaces):
    out = []
    for c in table:
        out.append(sum(1 for s in spaces if set_image(s, c.rep) == s))
    return out


# -- similarity norms ------------------------------------------------------------

def similarity_norm_identity(gs, form, e):
    """``tau((A sigma)^e) == N(tau(A))`` for ``gs = (A, i)`` with sigma of
    order ``e`` on the field; ``N`` is the norm to the fixed field of
    sigma.  Raises NotASimilarity if ``A`` does not rescale the form."""
    F = gs.F
    if (gs.i * e) % F.f:
        raise ValueError("sigma^e is not trivial")
    power = gs ** e
    if power.i:
        raise ValueError("the e-th power is not linear")
    lhs = similarity_tau(power.A, form)
    tau = similarity_tau(gs.A, form)
    f0 = F.f // e
    q0 = F.p ** f0
    rhs = F.pow(tau.v, (F.q - 1) // (q0 - 1))
    return lhs.v == rhs


def random_similarity(m, F, rng, length=40):
    """Random word in the symplectic generators and the diagonal similarity."""
    gens = symplectic_generators(m, F) + [delta_matrix(m, F)]
    A = MatF.identity(F, 2 * m)
    for _ in range(length):
        A = A * gens[int(rng.integers(len(gens)))]
    return A


def norm_identity_samples(m, F, e, samples=500, seed=0):
    """Run :func:`similarity_norm_identity` on random ``(A, f/e)`` pairs;
    returns the number of failures."""
    rng = np.random.default_rng(seed)
    form = standard_symplectic_form(m, F)
    i = F.f // e
    bad = 0
    for _ in range(samples):
        A = random_similarity(m, F, rng)
        if not similarity_norm_identity(SemilinearMap(A, i), form, e):
            bad += 1
    return bad


def norm_square_coherence(p, f, e):
    """For odd ``e``: the norm to the subfield of index ``e`` maps squares
    to squares and non-squares to non-squares (checked on every element)."""
    if e % 2 == 0 or f % e:
        raise ValueError("need odd e dividing f")
    F = make_field(p, f)
    F0 = make_field(p, f // e)
    q0 = F0.q
    exp = (F.q - 1) // (q0 - 1)
    from .ffield import restrict
    for v in range(1, F.q):
        n = restrict(F.elem(F.pow(v, exp)), F0)
        if is_square(F.elem(v)) != is_square(n):
            return False
    return True


# -- quadratic-form overgroups ------------------------------------------------------

def orthogonal_counts(table, form, action):
    """Per class: (forms of plus type fixed, minus type fixed)."""
    if form.F.p != 2:
        raise OddCharacteristic("quadratic forms polarizing to B need even q")
    sets = {1: [], -1: []}
    for Q, sign in quadratic_forms(form):
        sets[sign].append(singular_points(Q, action))
    out = []
    for c in table:
        x = c.rep
        out.append(tuple(sum(1 for s in sets[t] if set_image(s, x) == s) for t in (1, -1)))
    return out


def orthogonal_count_correspondence(big, small, theta=None, big_table=None,
                                    small_table=None):
    """Multisets of O+/O- overgroup counts on both sides; a subgroup of
    quadratic type is the stabilizer of its form, so counting fixed forms
    counts the overgroups."""
    big_table = big_table or coset_classes(big.inner, theta or big.theta_perm)
    small_table = small_table or conjugacy_classes(small)
    b = orthogonal_counts(big_table, big.form, big.action)
    s = orthogonal_counts(small_table, small.form, small.action)
    return b, s


# -- a graph automorphism of Sp4(2) ------------------------------------------------------

@dataclass
class SzCheck:
    outer_involutions: int
    fixed_orders: dict  # order of fixed subgroup -> number of outer involutions
    order20_structure: dict
    graph_order: int

    @property
    def ok(self):
        s = self.order20_structure
        return (20 in self.fixed_orders and s.get("nonabelian") and s.get("normal_sylow5")
                and set(s.get("orders", ())) <= {1, 2, 4, 5})


def _extend(tg, a, b, ia, ib):
    """Extend ``a -> ia, b -> ib`` to a map on ranks, or None if the
    assignment is not a well-defined bijective homomorphism."""
    N = tg.N
    phi = np.full(N, -1, dtype=np.int64)
    phi[0] = 0
    stack = [0]
    while stack:
        x = stack.pop()
        for g, ig in ((a, ia), (b, ib)):
            y = tg.mult[x, g]
            iy = tg.mult[phi[x], ig]
            if phi[y] < 0:
                phi[y] = iy
                stack.append(y)
            elif phi[y] != iy:
                return None
    if (phi < 0).any() or len(np.unique(phi)) != N:
        return None
    return phi


def _is_hom(tg, phi):
    """Full check ``phi(xy) = phi(x)phi(y)``."""
    return np.array_equal(phi[tg.mult], tg.mult[phi[:, None], phi[None, :]])


def outer_automorphism(T, seed=0):
    """An automorphism of ``T`` (as a rank map) that moves some class.

    Fixes a generating pair ``(a, b)``, pins the image of ``a`` to class
    representatives of matching order and size, and scans images of ``b``.
    """
    tg = table_group(T)
    rng = np.random.default_rng(seed)
    labels = tg.labels
    table = tg.table
    N = tg.N
    for _ in range(1000):
        a, b = (int(v) for v in rng.integers(1, N, size=2))
        if tg.generates(a, b):
            break
    else:
        raise SearchExhausted("no generating pair found")
    ca, cb = table[int(labels[a])], table[int(labels[b])]

    def like(c):
        return [i for i, d in enumerate(table) if d.order == c.order and d.size == c.size]

    for ia_cls in like(ca):
        ia = table[ia_cls].rank
        for ib_cls in like(cb):
            for ib in np.flatnonzero(labels == ib_cls).tolist():
                phi = _extend(tg, a, b, ia, ib)
                if phi is None:
                    continue
                if (labels[phi] != labels).any() and _is_hom(tg, phi):
                    return phi, (a, b, ia, ib)
    raise SearchExhausted("no class-moving automorphism found")


def graph_subgroup_order(T, a, b, ia, ib):
    """Order of ``<(a, ia), (b, ib)>`` acting on two copies of the points."""
    n = T.degree
    tg = table_group(T)
    pa, pb, qa, qb = (tg.perm(r) for r in (a, b, ia, ib))
    from .permcore import Perm
    g1 = Perm(list(pa.img) + [n + int(i) for i in qa.img])
    g2 = Perm(list(pb.img) + [n + int(i) for i in qb.img])
    return PermGroup([g1, g2], 2 * n).order()


def sz_fixed_subgroup_check(T, seed=0):
    """Fixed subgroups of the outer involutory automorphisms of ``T``.

    ``beta`` is a class-moving automorphism; the outer automorphisms are
    ``x -> beta(x)^g``.  The report counts the involutions among them by
    the order of their fixed subgroup and describes one of order 20.
    """
    tg = table_group(T)
    beta, (a, b, ia, ib) = outer_automorphism(T, seed)
    gorder = graph_subgroup_order(T, a, b, ia, ib)
    N = tg.N
    ident = np.arange(N)
    counts = Counter()
    found = None
    invol = 0
    for g in range(N):
        alpha = tg.conj_map(g)[beta]
        if np.array_equal(alpha[alpha], ident):
            invol += 1
            fixed = np.flatnonzero(alpha == ident)
            counts[len(fixed)] += 1
            if len(fixed) == 20 and found is None:
                found = fixed
    structure = {}
    if found is not None:
        sub = tg.mult[np.ix_(found, found)]
        orders = sorted(set(int(tg.orders[r]) for r in found))
        fives = [int(r) for r in found if tg.orders[r] == 5]
        structure = {
            "orders": orders,
            "nonabelian": not np.array_equal(sub, sub.T),
            # a unique subgroup of order 5 is normal: exactly four elements of order 5
            "normal_sylow5": len(fives) == 4,
        }
    return SzCheck(invol, dict(sorted(counts.items())), structure, gorder)


# -- the report ---------------------------------------------------------------------------

@dataclass
class CorrespondenceReport:
    big: str
    small: str
    e: int
    stats: dict = field(default_factory=dict)  # name -> (big, small)
    pairing: list = field(default_factory=list)
    ambiguous: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)  # name -> bool
    info: dict = field(default_factory=dict)  # name -> (big, small), not part of the verdict

    def verdict(self, name):
        a, b = self.stats[name]
        return "match" if Counter(a) == Counter(b) else "mismatch"

    @property
    def ok(self):
        return all(self.verdict(n) == "match" for n in self.stats) and all(self.extra.values())

    def lines(self):
        out = [f"big = {self.big}", f"small = {self.small}", f"e = {self.e}"]
        for name, (a, b) in self.stats.items():
            out.append(f"stat.{name}.big = {_fmt(a)}")
            out.append(f"stat.{name}.small = {_fmt(b)}")
            out.append(f"stat.{name}.verdict = {self.verdict(name)}")
        for name, (a, b) in self.info.items():
            out.append(f"info.{name}.big = {_fmt(a)}")
            out.append(f"info.{name}.small = {_fmt(b)}")
        for name, v in self.extra.items():
            out.append(f"check.{name} = {'pass' if v else 'FAIL'}")
        out.append(f"pairing.matched = {len(self.pairing)}")
        out.append(f"pairing.ambiguous = {len(self.ambiguous)}")
        out.append(f"verdict = {'match' if self.ok else 'mismatch'}")
        return out


def _fmt(v):
    if isinstance(v, list):
        return ",".join(str(x) for x in v)
    return str(v)


def _pair_classes(big_table, small_table, e):
    def bkey(c):
        return ((c.rep ** e).order(), c.centralizer_order, c.power_signature)

    def skey(c):
        sig = tuple(t for t in c.power_signature if e % t[0])
        return (c.order, c.centralizer_order, sig)

    bk = Counter(bkey(c) for c in big_table)
    sk = Counter(skey(c) for c in small_table)
    matched = [k for k in bk if bk[k] == 1 and sk.get(k) == 1]
    ambiguous = [k for k in set(bk) | set(sk) if bk.get(k, 0) != 1 or sk.get(k, 0) != 1]
    return sorted(matched), sorted(ambiguous)


def verify_shintani(big, small, e=None, subspace_specs=((1, "totally-isotropic"),),
                    orthogonal=True, theta=None):
    """Compare the descent statistics of ``big`` (with outer automorphism
    ``theta``, default its own) against ``small``."""
    T = big.inner
    theta = theta or big.theta_perm
    if e is None:
        from .conjtab import theta_order_mod
        e = theta_order_mod(T, theta)
    bt = coset_classes(T, theta, e=e)
    st = conjugacy_classes(small)
    rep = CorrespondenceReport(big.name or "big", small.name or "small", e)
    rep.stats["class_count"] = ([len(bt)], [len(st)])
    rep.stats["centralizer"] = (centralizer_profile(T, table=bt), centralizer_profile(small, table=st))
    rep.stats["epower_order"] = (epower_order_profile(T, e=e, table=bt),
                                 sorted(c.order for c in st))
    for k, flavor in subspace_specs:
        bs = subspaces(T.action, T.form, k, flavor)
        ss = subspaces(small.action, small.form, k, flavor)
        bf, sf_ = fixed_counts(bt, bs), fixed_counts(st, ss)
        rep.stats[f"fixed_{k}_{flavor}"] = (sorted(bf), sorted(sf_))
        rep.extra[f"burnside_{k}_{flavor}"] = (
            burnside_total(bt, bf) == T.order() * stable_orbit_count(T.gens, theta, bs)
            and burnside_total(st, sf_) == small.order() * stable_orbit_count(small.gens, None, ss))
    if orthogonal:
        b, s = orthogonal_count_correspondence(big, small, theta, bt, st)
        # only the total is preserved; the split by type is reported for reference
        rep.info["orthogonal_plus"] = (sorted(x[0] for x in b), sorted(x[0] for x in s))
        rep.info["orthogonal_minus"] = (sorted(x[1] for x in b), sorted(x[1] for x in s))
        rep.stats["orthogonal_total"] = (sorted(sum(x) for x in b), sorted(sum(x) for x in s))
        rep.extra["orthogonal_min_ge_1"] = min(sum(x) for x in b) >= 1 and min(sum(x) for x in s) >= 1
    rep.pairing, rep.ambiguous = _pair_classes(bt, st, e)
    return rep
