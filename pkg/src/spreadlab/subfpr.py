"""Fixed point ratios, overgroup counts, nongeneration probabilities and the
closed-form bounds they are compared against.

Subgroups are carried as :class:`SubgroupHandle` objects.  Exact values are
``fractions.Fraction``; bounds with square roots are compared through exact
integer inequalities (see :func:`bound_exceeds`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels as _k
from . import linalg as la
from .conjtab import class_of
from .ffield import prime_factors
from .grpzoo import FormSpec, SemilinearMap
from .linalg import MatF
from .permcore import (BudgetExceeded, Perm, PermGroup, orbit_stabilizer, schreier_sims,
                       set_image)
from .spread import class_table, nongeneration_probability, table_group

INDEX_CROSSCHECK = 10 ** 5
LATTICE_BUDGET = 10 ** 4
SUBGROUP_COUNT_BUDGET = 200_000


class NotLinear(ValueError):
    pass


class NotSelfNormalizing(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


class OddCharacteristic(ValueError):
    pass


class EmptyOvergroupList(ValueError):
    pass


@dataclass
class SubgroupHandle:
    gens: list
    parent: PermGroup
    order: int
    label: str = ""
    orbit: list | None = None  # G-orbit of the defining object, when known
    index_object: object = None
    act: object = None

    def __post_init__(self):
        for g in self.gens:
            if not self.parent.contains(g):
                raise ValueError(f"generator of {self.label or 'subgroup'} not in parent")

    @property
    def group(self):
        if not hasattr(self, "_group"):
            self._group = PermGroup(self.gens, self.parent.degree, order=self.order,
                                    name=self.label)
        return self._group

    @property
    def index(self):
        return self.parent.order() // self.order

    def contains(self, x):
        return self.group.contains(x)


def handle_from_group(H, parent, label=""):
    h = SubgroupHandle(list(H.gens), parent, H.order(), label)
    h._group = H
    return h


def stabilizer_handle(G, obj, label, act=set_image, seed=0):
    """Stabilizer of ``obj`` (points, point sets, ...) as a handle whose
    ``orbit`` realises the coset action ``G/H``."""
    orbit, S = orbit_stabilizer(G, obj, act, seed)
    h = SubgroupHandle(list(S.gens), G, S.order(), label, orbit, obj, act)
    h._group = S
    return h


def point_image(p, g):
    return g.img[p]


# -- nu -----------------------------------------------------------------------

def _poly_at_matrix(F, poly, A):
    n = A.shape[0]
    add, mul, _, _ = F.tables()
    R = np.zeros((n, n), dtype=np.int64)
    for c in reversed(poly):
        R = la.fmatmul(F, R, A)
        R[np.arange(n), np.arange(n)] = add[R[np.arange(n), np.arange(n)], c]
    return R


def _xpow_mod(F, e, mod):
    return la.ppowmod(F, [0, 1], e, mod)


def _equal_degree_split(F, h, d, seed=0):
    """Irreducible factors (monic) of a squarefree ``h`` whose factors all
    have degree ``d`` (Cantor-Zassenhaus, seeded)."""
    h = la.ptrim(h)
    deg = len(h) - 1
    if deg == d:
        return [h]
    rng = np.random.default_rng(seed)
    q = F.q
    while True:
        a = la.ptrim([int(c) for c in rng.integers(0, q, size=deg)])
        if len(a) <= 1:
            continue
        if F.p == 2:
            # trace map a + a^2 + ... + a^(2^(f d - 1))
            t, cur = a, a
            for _ in range(F.f * d - 1):
                cur = la.pmod(F, la.pmul(F, cur, cur), h)
                t = la.padd(F, t, cur)
            cand = t
        else:
            cand = la.psub(F, la.ppowmod(F, a, (q ** d - 1) // 2, h), [1])
        g = _monic(F, la.pgcd(F, h, cand))
        if 0 < len(g) - 1 < deg:
            other = la.pdivmod(F, h, g)[0]
            return (_equal_degree_split(F, g, d, seed + 1)
                    + _equal_degree_split(F, _monic(F, other), d, seed + 2))


def _monic(F, f):
    f = la.ptrim(f)
    lead = f[-1]
    if lead == 1:
        return f
    il = F.inv(lead)
    return [F.mul(c, il) for c in f]


def distinct_irreducible_factors(F, f):
    """Distinct monic irreducible factors of ``f`` over ``F``."""
    f = _monic(F, f)
    n = len(f) - 1
    out = []
    g = {}
    for d in range(1, n + 1):
        xq = _xpow_mod(F, F.q ** d, f)
        g[d] = _monic(F, la.pgcd(F, f, la.psub(F, xq, [0, 1])))
        h = g[d]
        for e in range(1, d):
            if d % e == 0 and len(g[e]) > 1:
                common = _monic(F, la.pgcd(F, h, g[e]))
                if len(common) > 1:
                    h = _monic(F, la.pdivmod(F, h, common)[0])
        if len(h) > 1:
            out.extend(_equal_degree_split(F, h, d))
    return out


def nu(x):
    """Codimension of the largest eigenspace of ``x`` over the algebraic
    closure.  ``x`` is a :class:`MatF` or a linear :class:`SemilinearMap`.

    For an irreducible factor ``f`` of degree ``d`` of the characteristic
    polynomial, each root has an eigenspace of dimension ``nullity(f(x))/d``.
    """
    if isinstance(x, SemilinearMap):
        if x.i:
            raise NotLinear("x has a nontrivial field-automorphism part")
        x = x.A
    F, A = x.F, x.a
    n = A.shape[0]
    best = 0
    for f in distinct_irreducible_factors(F, la.charpoly(F, A)):
        nul = n - la.rank(F, _poly_at_matrix(F, f, A))
        best = max(best, nul // (len(f) - 1))
    return n - best


# -- exact fpr and overgroups ---------------------------------------------------

def _class_counts_in(G, table, H, budget=2_000_000):
    """Histogram of ``G``-class ids over the elements of ``H``."""
    Hg = H.group if isinstance(H, SubgroupHandle) else H
    if Hg.order() > budget:
        raise BudgetExceeded(f"|H| = {Hg.order()} exceeds budget")
    hidx = Hg.index(budget)
    gidx = G.index()
    counts = np.zeros(len(table), dtype=np.int64)
    step = 1 << 15
    for lo in range(0, hidx.order, step):
        rows = hidx.unrank(np.arange(lo, min(lo + step, hidx.order)))
        ranks = gidx.rank(rows)
        if (ranks < 0).any():
            raise ValueError("subgroup element outside the parent group")
        counts += np.bincount(table.labels[ranks], minlength=len(table))
    return counts


def class_counts(G, table, H):
    cache = getattr(H, "_class_counts", None)
    if cache is None:
        cache = _class_counts_in(G, table, H)
        H._class_counts = cache
    return cache


def exact_fpr(G, table, x_class, H):
    """``|x^G cap H| / |x^G|`` by classifying every element of ``H``."""
    return Fraction(int(class_counts(G, table, H)[x_class]), table[x_class].size)


def fixed_cosets(G, x, H):
    """Number of cosets of ``H`` fixed by ``x`` (cross-check route).

    Uses the stored orbit of the defining object when available; otherwise
    counts ``g`` with ``g x g^-1`` in ``H`` over all of ``G``.
    """
    if isinstance(H, SubgroupHandle) and H.orbit is not None:
        act = H.act or set_image
        return sum(1 for o in H.orbit if act(o, x) == o)
    Hg = H.group if isinstance(H, SubgroupHandle) else H
    gidx = G.index()
    hidx = Hg.index()
    N = gidx.order
    xi = np.asarray(x.img)
    hits = 0
    step = 1 << 14
    for lo in range(0, N, step):
        P = gidx.unrank(np.arange(lo, min(lo + step, N)))
        Pinv = np.argsort(P, axis=1)
        # (g x g^-1)[p] = ginv[x[g[p]]]
        C = np.take_along_axis(Pinv, xi[P], axis=1)
        hits += int((hidx.rank(C) >= 0).sum())
    return hits // Hg.order()


def fpr_crosscheck(G, table, x_class, H):
    """Both routes of the fixed point ratio; raises if they disagree."""
    a = exact_fpr(G, table, x_class, H)
    idx = H.index if isinstance(H, SubgroupHandle) else G.order() // H.order()
    if idx > INDEX_CROSSCHECK:
        return a, None
    b = Fraction(fixed_cosets(G, table[x_class].rep, H), idx)
    if a != b:
        raise AssertionError(f"fpr mismatch: {a} vs {b}")
    return a, b


def is_self_normalizing(G, H, budget=INDEX_CROSSCHECK):
    """Brute-force ``N_G(H) = H`` over all of ``G`` (``|G| <= budget``)."""
    if G.order() > budget:
        raise BudgetExceeded("normalizer check needs |G| within budget")
    Hg = H.group if isinstance(H, SubgroupHandle) else H
    count = 0
    for g in G.elements():
        if all(Hg.contains(h ** g) for h in Hg.gens):
            count += 1
    return count == Hg.order()


def overgroup_count(G, table, x_class, H, check=True):
    """Number of conjugates of the self-normalizing ``H`` containing ``x``."""
    Hg = H.group if isinstance(H, SubgroupHandle) else H
    if check and G.order() <= INDEX_CROSSCHECK and not is_self_normalizing(G, Hg):
        raise NotSelfNormalizing(getattr(H, "label", "") or "subgroup")
    index = G.order() // Hg.order()
    val = index * exact_fpr(G, table, x_class, H)
    if val.denominator != 1:
        raise AssertionError("non-integral overgroup count")
    return int(val)


def conjugates_containing(G, x, H):
    """Direct count of conjugates ``H^g`` containing ``x`` (``H`` self-normalizing)."""
    return fixed_cosets(G, x, H)


def exact_P(G, table, x_class, s_class):
    return nongeneration_probability(G, table, x_class, s_class)


@dataclass
class ProbBoundReport:
    s_class: int
    rows: list = field(default_factory=list)  # (x class, P, sum fpr)
    overgroups: list = field(default_factory=list)  # (label, count containing s)

    @property
    def verdict(self):
        """Largest ``k`` with every ``k``-multiset of bound sums below 1."""
        worst = max((b for _, _, b in self.rows), default=Fraction(0))
        if worst == 0:
            return math.inf
        k = int(1 / worst)
        while k * worst >= 1:
            k -= 1
        return k

    @property
    def holds(self):
        return all(p <= b for _, p, b in self.rows)

    def lines(self):
        out = [f"s_class = {self.s_class}"]
        for lab, c in self.overgroups:
            out.append(f"overgroup label={lab} containing_s={c}")
        for cid, p, b in self.rows:
            out.append(f"x_class={cid} P={p} bound={b} ok={'yes' if p <= b else 'NO'}")
        v = self.verdict
        out.append(f"verdict_k = {'infinity' if v == math.inf else v}")
        return out


def prob_bound_report(G, table, s_class, maximal):
    """``P(x, s)`` against the sum of fixed point ratios over ``M(G, s)``.

    ``maximal`` lists one representative per conjugacy class of maximal
    subgroups; each contributes once per conjugate containing ``s``.
    """
    counts = []
    for H in maximal:
        c = overgroup_count(G, table, s_class, H, check=False)
        counts.append(c)
    if sum(counts) == 0:
        raise EmptyOvergroupList("s lies in no listed maximal subgroup")
    rep = ProbBoundReport(s_class)
    rep.overgroups = [(getattr(H, "label", ""), c) for H, c in zip(maximal, counts)]
    for cid in table.prime_order_ids():
        bound = sum((c * exact_fpr(G, table, cid, H) for H, c in zip(maximal, counts) if c),
                    Fraction(0))
        rep.rows.append((cid, exact_P(G, table, cid, s_class), bound))
    return rep


# -- maximal subgroups of tiny groups -------------------------------------------

def maximal_subgroups_tiny(G, budget=LATTICE_BUDGET):
    """Maximal subgroups up to conjugacy, from the full subgroup lattice.

    Subgroups are grown by cyclic extension: starting from the trivial
    group, each class representative ``H`` is joined with every element
    outside it.  Each subgroup is stored with all its conjugates, so the
    lattice is complete; maximal ones are those with no proper overgroup.
    """
    N = G.order()
    if N > budget:
        raise BudgetExceeded(f"|G| = {N} exceeds the lattice budget {budget}")
    tg = table_group(G, budget)
    if N == 1:
        return []
    mult = tg.mult
    conj = np.stack([tg.conj_map(g) for g in range(N)])
    known = {}
    reps = []

    def add(mask, gens):
        key = np.packbits(mask).tobytes()
        if key in known:
            return
        members = np.flatnonzero(mask)
        first = None
        for g in range(N):
            m2 = np.zeros(N, dtype=bool)
            m2[conj[g][members]] = True
            k2 = np.packbits(m2).tobytes()
            if k2 not in known:
                known[k2] = m2
                if first is None:
                    first = k2
        reps.append((mask, list(gens)))
        if len(known) > SUBGROUP_COUNT_BUDGET:
            raise BudgetExceeded("too many subgroups")

    triv = np.zeros(N, dtype=bool)
    triv[0] = True
    add(triv, [])
    i = 0
    while i < len(reps):
        mask, gens = reps[i]
        i += 1
        for g in np.flatnonzero(~mask).tolist():
            new = _k.closure(mult, np.array(gens + [g], dtype=np.int64))
            if new.all():
                continue
            add(new, gens + [g])
    allm = list(known.values())
    sizes = [int(m.sum()) for m in allm]
    out = []
    for mask, gens in reps:
        n = int(mask.sum())
        if n == N:
            continue
        if any(s > n and s < N and (m | mask).sum() == s for m, s in zip(allm, sizes)):
            continue
        perms = [tg.perm(r) for r in gens] or [Perm.identity(G.degree)]
        H = PermGroup(perms, G.degree, order=n)
        out.append(handle_from_group(H, G, f"M{n}"))
    out.sort(key=lambda h: (-h.order, h.label))
    return out


@dataclass
class MaximalityCheck:
    label: str
    trials: int
    skipped: int  # samples that fell inside H
    intermediate: int  # samples whose join with H was proper

    @property
    def ok(self):
        return self.intermediate == 0


def falsify_maximality(G, H, trials=10 ** 4, seed=0):
    """Join ``H`` with random elements of ``G`` and check each join is ``G``.

    A falsification harness, not a proof: a proper join would exhibit an
    intermediate subgroup.  Randomised Schreier-Sims certifies each join
    by reaching ``|G|``; joins that stall are decided deterministically.
    """
    rng = np.random.default_rng(seed)
    Hg = H.group if isinstance(H, SubgroupHandle) else H
    target = G.order()
    if Hg.order() == target:
        raise ValueError("H is not proper")
    skipped = bad = 0
    for t in range(trials):
        g = G.random_element(rng)
        if Hg.contains(g):
            skipped += 1
            continue
        gens = list(Hg.gens) + [g]
        try:
            order = schreier_sims(gens, G.degree, target_order=target, seed=t,
                                  max_random=60).order()
        except ValueError:
            order = -1
        if order != target:
            bad += 1
    return MaximalityCheck(getattr(H, "label", ""), trials, skipped, bad)


# -- quadratic forms in characteristic two --------------------------------------

def _abs_trace(F, a):
    t, cur = 0, a
    for _ in range(F.f):
        t = F.add(t, cur)
        cur = F.mul(cur, cur)
    return t


def arf_invariant(F, diag, m):
    """Arf invariant of ``Q = sum a_i x_i^2 + sum x_{2i} x_{2i+1}`` over the
    standard symplectic basis."""
    acc = 0
    for i in range(m):
        acc = F.add(acc, F.mul(diag[2 * i], diag[2 * i + 1]))
    return acc


def quadratic_forms(form):
    """All quadratic forms polarizing to the standard symplectic ``form``
    (even ``q``), as (FormSpec, sign) with sign +1 or -1."""
    F = form.F
    if F.p != 2:
        raise OddCharacteristic("quadratic forms polarizing to B need even q")
    n = form.dim
    m = n // 2
    out = []
    for code in range(F.q ** n):
        diag = [(code // F.q ** i) % F.q for i in range(n)]
        Qm = np.zeros((n, n), dtype=np.int64)
        for i in range(m):
            Qm[2 * i, 2 * i + 1] = 1
        Qm[np.arange(n), np.arange(n)] = diag
        Q = FormSpec("quadratic", F, n, form.gram.copy(), Qm)
        sign = 1 if _abs_trace(F, arf_invariant(F, diag, m)) == 0 else -1
        out.append((Q, sign))
    return out


def singular_count(Q):
    F = Q.F
    codes = np.arange(F.q ** Q.dim)
    V = np.stack([(codes // F.q ** k) % F.q for k in range(Q.dim)], axis=1)
    return int((Q.Q_rows(V) == 0).sum())


def singular_points(Q, action):
    """Indices of the projective points on which ``Q`` vanishes."""
    return frozenset(np.flatnonzero(Q.Q_rows(action.vectors) == 0).tolist())


def quadratic_type_subgroups(G, form=None, action=None):
    """Stabilizers of one plus-type and one minus-type quadratic form.

    Every form polarizing to the symplectic form is enumerated and typed by
    its Arf invariant; the singular point sets give the action of ``G``
    on forms, whose orbits must be exactly the two types.
    Returns ``(handles, census)`` with ``census = {+1: count, -1: count}``.
    """
    form = form or G.form
    action = action or G.action
    forms = quadratic_forms(form)
    census = {1: 0, -1: 0}
    by_type = {1: [], -1: []}
    for Q, sign in forms:
        census[sign] += 1
        by_type[sign].append(singular_points(Q, action))
    handles = []
    for sign, label in ((1, "O+"), (-1, "O-")):
        obj = by_type[sign][0]
        h = stabilizer_handle(G, obj, f"{label}{form.dim}({form.F.q})")
        if sorted(h.orbit, key=sorted) != sorted(set(by_type[sign]), key=sorted):
            raise AssertionError(f"{label} forms do not form a single orbit")
        handles.append(h)
    return handles, census


def forms_fixed_by(x, point_sets):
    """How many of the given singular point sets are mapped to themselves."""
    return sum(1 for s in point_sets if set_image(s, x) == s)


# -- curated maximal subgroups of Sp4(q):phi --------------------------------------

def _points_of_span(action, vecs):
    F = action.F
    q = F.q
    vecs = np.asarray(vecs, dtype=np.int64)
    k = len(vecs)
    pts = set()
    add, mul, _, _ = F.tables()
    for code in range(1, q ** k):
        coeffs = [(code // q ** i) % q for i in range(k)]
        v = np.zeros(action.n, dtype=np.int64)
        for c, w in zip(coeffs, vecs):
            if c:
                v = add[v, mul[c, w]]
        if v.any():
            pts.add(int(action.index_of(v)[0]))
    return frozenset(pts)


def curated_sp4_phi_maximals(G):
    """Representatives of the maximal subgroups of ``Sp4(q):phi``, q = 4.

    Each is the stabilizer of a geometric object: a point, a totally
    isotropic line, the subfield point set, a quadratic form of each type,
    a decomposition into two perpendicular nondegenerate lines, and a
    field-extension spread of totally isotropic lines.
    """
    spec = G.spec
    if spec.family != "Sp" or spec.m != 2 or spec.F.q != 4 or spec.auto != "phi":
        raise HypothesisViolated("curated list is for Sp4(4):phi only")
    act, F = G.action, spec.F
    e = np.eye(4, dtype=np.int64)
    out = []
    out.append(stabilizer_handle(G, int(act.index_of(e[0])[0]), "P1", act=point_image))
    out.append(stabilizer_handle(G, _points_of_span(act, [e[0], e[2]]), "P2"))
    sub = frozenset(int(i) for i in np.flatnonzero((act.vectors <= 1).all(axis=1)))
    out.append(stabilizer_handle(G, sub, "Sp4(2)x2"))
    quad, _ = quadratic_type_subgroups(G)
    out.extend(quad)
    # the pair {<e0, f0>, <e1, f1>} of perpendicular nondegenerate lines
    pair = frozenset([_points_of_span(act, [e[0], e[1]]), _points_of_span(act, [e[2], e[3]])])
    out.append(stabilizer_handle(G, pair, "Sp2(4)wrS2"))
    out.append(stabilizer_handle(G, _field_extension_spread(G), "Sp2(16)"))
    return out


def _field_extension_spread(G):
    """Lines of ``F_16^2`` that are ``F_16``-subspaces, viewed in ``F_4^4``
    with the trace of the ``F_16``-symplectic form and transported to the
    standard symplectic basis."""
    from .grpzoo import _ExtensionModel, symplectic_basis

    F = G.spec.F
    M = _ExtensionModel(1, F)
    K = M.K

    def coords(a, b):
        return np.array(M.coords[a] + M.coords[b], dtype=np.int64)

    basis = [(M.basis[0], 0), (M.basis[1], 0), (0, M.basis[0]), (0, M.basis[1])]
    gram = np.zeros((4, 4), dtype=np.int64)
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            gram[i, j] = M.trace(K.sub(K.mul(u[0], v[1]), K.mul(u[1], v[0])))
    Pinv = la.inverse(F, symplectic_basis(F, gram))
    act = G.action
    lines = set()
    for a in range(K.q):
        for b in range(K.q):
            if a == 0 and b == 0:
                continue
            old = np.stack([coords(K.mul(lam, a), K.mul(lam, b)) for lam in range(1, K.q)])
            new = la.fmatmul(F, old, Pinv)
            lines.add(frozenset(act.index_of(new).tolist()))
    if len(lines) != K.q + 1:
        raise AssertionError("spread has the wrong number of lines")
    return frozenset(lines)


# -- involution types in even characteristic ---------------------------------------

def _unit_involution(A):
    """Rescale a projective involution's lift so that it squares to 1."""
    F = A.F
    sq = (A * A).a
    mu = int(sq[0, 0])
    for c in range(1, F.q):
        if F.mul(F.mul(c, c), mu) == 1:
            return MatF(F, F.tables()[1][c, A.a])
    raise ValueError("not a projective involution")


def involution_type(A, form):
    """``"b"`` for ``nu = 1``; else ``"a"`` when ``B(v, v(A - 1)) = 0`` for
    all ``v`` and ``"c"`` otherwise.  Returns ``(letter, nu)``."""
    F = form.F
    n = form.dim
    add, mul, neg, _ = F.tables()
    A = _unit_involution(A)
    M = A.a.copy()
    M[np.arange(n), np.arange(n)] = add[M[np.arange(n), np.arange(n)], neg[1]]
    s = la.rank(F, M)
    codes = np.arange(F.q ** n)
    V = np.stack([(codes // F.q ** k) % F.q for k in range(n)], axis=1)
    W = la.fmatmul(F, V, M)
    VB = la.fmatmul(F, V, form.gram)
    vals = np.zeros(len(V), dtype=np.int64)
    for k in range(n):
        vals = add[vals, mul[VB[:, k], W[:, k]]]
    if s == 1:
        return "b", s
    return ("a" if not vals.any() else "c"), s


# -- closed-form bounds ----------------------------------------------------------------

BOUND_FAMILIES = (
    "nonsubspace-orthogonal",  # (4q+4)^(1/2) / q^(m-l+eps)
    "nonsubspace-symplectic",  # (2q+2)^(1/2) / q^(m-l)
    "nonsubspace-refined",  # by nu(x), with the l of the subgroup type
    "subfield-nu1",  # 2 q^-m
    "totally-isotropic",
    "nondegenerate-orthogonal",
    "nondegenerate-symplectic",
    "quadratic-form",  # q^-beta + q^-m
    "nondegenerate-2space",
    "sp4-nonsubspace",  # 4 / (q(q-1))
    "sp4-exception",  # q / (q^2-1)
    "sp4-suzuki",  # q^-2
    "sp4-o2minus",  # 8 / (q^2 (q-1))
)


@dataclass(frozen=True)
class BoundFormula:
    """A closed-form fixed-point-ratio bound and its parameters.

    ``family`` is one of the keys of :data:`BOUND_FAMILIES`.
    ``nu`` is ``None`` for elements outside PGL(V).
    """

    family: str
    m: int
    q: int
    k: int = 0
    ell: Fraction = Fraction(1)
    witt: int = 0
    nu: int | None = None
    m_check: bool = True


def _check(cond, msg):
    if not cond:
        raise HypothesisViolated(msg)


def _iroot(n, k):
    """Largest integer ``r`` with ``r**k <= n`` (Newton from above)."""
    if n < 2:
        return n
    r = 1 << -(-n.bit_length() // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            return r
        r = s


def power_interval(x, e, digits=40):
    """Rational ``(lo, hi)`` with ``lo <= x**e <= hi`` for rational ``x > 0``
    and rational ``e``; exact when the power is rational."""
    x, e = Fraction(x), Fraction(e)
    y = x ** e.numerator
    d = e.denominator
    if d == 1:
        return y, y
    S = 10 ** digits
    scaled = y * S ** d
    lo_int = _iroot(scaled.numerator // scaled.denominator, d)
    lo = Fraction(lo_int, S)
    if lo ** d == y:
        return lo, lo
    return lo, Fraction(lo_int + 1, S)


@dataclass(frozen=True)
class Bound:
    """``(sum of coeff * q**(-exp)) * base**power``, held exactly.

    ``terms`` is a tuple of ``(coeff, exponent)`` Fractions and ``radicand``
    an optional ``(base, power)``.  Irrational values are handled through
    rational enclosures from :func:`power_interval`.
    """

    terms: tuple
    radicand: tuple | None = None
    q: int = 1

    def interval(self, digits=40):
        lo = hi = Fraction(0)
        for c, e in self.terms:
            a, b = power_interval(self.q, -Fraction(e), digits)
            lo += Fraction(c) * a
            hi += Fraction(c) * b
        if self.radicand is not None:
            a, b = power_interval(self.radicand[0], self.radicand[1], digits)
            lo, hi = lo * a, hi * b
        return lo, hi

    def rational(self):
        lo, hi = self.interval()
        return lo if lo == hi else None

    def value(self):
        """Float value (display only)."""
        lo, hi = self.interval(20)
        return float((lo + hi) / 2)

    def __str__(self):
        r = self.rational()
        return str(r) if r is not None else f"{self.value():.6g}"


_NEEDS_M3 = ("nonsubspace-orthogonal", "nonsubspace-symplectic", "nonsubspace-refined",
             "subfield-nu1", "totally-isotropic", "nondegenerate-orthogonal",
             "nondegenerate-symplectic", "nondegenerate-2space")


def bound_value(f):
    """Right-hand side of the closed-form bound described by ``f``, as a
    :class:`Bound`.  ``m_check=False`` evaluates a formula outside its
    stated range of ``m`` (used for desk-scale comparisons at m = 2)."""
    q, m = f.q, f.m
    F = Fraction
    p = prime_factors(q)
    _check(len(p) == 1, "q must be a prime power")
    even = p[0] == 2
    if f.family in _NEEDS_M3 and f.m_check:
        _check(m >= 3, "this bound assumes m >= 3")
    if f.family == "nonsubspace-orthogonal":
        eps = F(0) if (f.nu == 1) else F(1, 2)
        return Bound(((F(1), m - f.ell + eps),), (4 * q + 4, F(1, 2)), q)
    if f.family == "nonsubspace-symplectic":
        return Bound(((F(1), m - f.ell),), (2 * q + 2, F(1, 2)), q)
    if f.family == "nonsubspace-refined":
        if f.nu is None:
            return Bound(((F(2), F(m)),), None, q)
        pw = F(1, 2) - f.ell / (2 * m)
        if f.nu == 1:
            return Bound(((F(1), m - f.ell),), (2 * q + 2, pw), q)
        return Bound(((F(1), 2 * (m - f.ell) - F(3, 2) + F(3, 2 * m)),), (2 * q + 2, pw), q)
    if f.family == "subfield-nu1":
        _check(f.nu == 1, "the subfield bound needs nu(x) = 1")
        return Bound(((F(2), F(m)),), None, q)
    if f.family == "totally-isotropic":
        _check(1 <= f.k <= m, "need 1 <= k <= m")
        return Bound(((F(2), F(m - 1)), (F(1), F(m)), (F(1), F(f.k))), None, q)
    if f.family == "nondegenerate-orthogonal":
        _check(not even, "orthogonal case needs odd q")
        _check(1 <= f.k <= 2 * m, "need 1 <= k <= 2m")
        return Bound(((F(2), F(m - 1)), (F(1), F(m)), (F(1), F(f.witt)),
                      (F(1), F(2 * m + 1 - f.k))), None, q)
    if f.family == "nondegenerate-symplectic":
        _check(1 <= f.k <= 2 * m - 1, "need 1 <= k <= 2m-1")
        alpha = 1 if even else 2
        return Bound(((F(2), F(m - alpha)), (F(1), F(m)), (F(1), F(f.k, 2)),
                      (F(1), F(2 * m - f.k))), None, q)
    if f.family == "quadratic-form":
        _check(even, "quadratic-form subgroups need even q")
        beta = 1 if f.nu == 1 else 2
        return Bound(((F(1), F(beta)), (F(1), F(m))), None, q)
    if f.family == "nondegenerate-2space":
        if f.nu is None:
            return Bound(((F(2), F(2 * m - 1)),), None, q)
        s = f.nu
        return Bound(((F(1), F(2 * s)), (F(1), F(2 * s + 2)), (F(1), F(2 * m - 2)),
                      (F(1), F(2 * m - 1))), None, q)
    if f.family in ("sp4-nonsubspace", "sp4-exception", "sp4-suzuki", "sp4-o2minus"):
        _check(m == 2, "the four-dimensional bound needs m = 2")
        _check(len(p) == 1 and q > p[0], "q must be a proper prime power")
        if f.family == "sp4-nonsubspace":
            return Bound(((F(4, q - 1), F(1)),), None, q)
        if f.family == "sp4-exception":
            return Bound(((F(q * q, q * q - 1), F(1)),), None, q)
        if f.family == "sp4-suzuki":
            _check(even, "Sz bound needs even q")
            return Bound(((F(1), F(2)),), None, q)
        _check(even, "O-_2(q^2) bound needs even q")
        return Bound(((F(8, q - 1), F(2)),), None, q)
    raise HypothesisViolated(f"unknown bound family {f.family!r}")


def bound_exceeds(bound, value, max_digits=400):
    """Exact test of ``value < bound`` for rational ``value``.

    The enclosure is refined until it separates from ``value``; a bound
    that equals ``value`` exactly gives False.
    """
    value = Fraction(value)
    digits = 40
    while digits <= max_digits:
        lo, hi = bound.interval(digits)
        if value < lo:
            return True
        if value >= hi:
            return False
        digits *= 2
    raise ArithmeticError("could not separate value from the bound")


# families bounded with a strict inequality; the rest allow equality
STRICT_FAMILIES = frozenset(BOUND_FAMILIES[:8])


def bound_holds(bound, value, strict=False):
    """``value < bound`` if ``strict`` else ``value <= bound``."""
    r = bound.rational()
    if r is not None:
        return Fraction(value) < r if strict else Fraction(value) <= r
    return bound_exceeds(bound, value)


# -- desk-scale bound verification --------------------------------------------------

@dataclass
class FprRecord:
    x_class: int
    label: str
    fpr: Fraction
    bounds: list  # (family, Bound, holds)

    @property
    def ok(self):
        return all(h for _, _, h in self.bounds)


def element_nu(G, x):
    """``nu`` of a permutation of ``G`` lifted to its semilinear map, or
    ``None`` when the lift involves a field automorphism."""
    g = G.action.lift(x)
    if g.i:
        return None
    return nu(g)


def sp4_phi_bound_records(G, table=None, maximal=None, crosscheck=True):
    """Exact fpr of every prime-order class on every curated maximal
    subgroup of ``Sp4(4):phi`` with the applicable closed-form bounds."""
    table = table or class_table(G)
    maximal = maximal or curated_sp4_phi_maximals(G)
    q, m = G.spec.F.q, G.spec.m
    recs = []
    for cid in table.prime_order_ids():
        x = table[cid].rep
        g = G.action.lift(x)
        xnu = None if g.i else nu(g)
        itype = None
        if not g.i and x.order() == 2:
            itype = involution_type(g.A, G.form)[0]
        for H in maximal:
            fpr = exact_fpr(G, table, cid, H)
            if crosscheck and H.orbit is not None:
                fc = fixed_cosets(G, x, H)
                if Fraction(fc, H.index) != fpr:
                    raise AssertionError(f"fpr routes disagree on {H.label}")
            bounds = []
            lab = H.label
            if lab.startswith("P"):
                pass  # subspace subgroups: the closed-form bounds assume m >= 3
            else:
                fam = "sp4-nonsubspace"
                if lab in ("Sp2(4)wrS2", "Sp2(16)") and itype == "a":
                    fam = "sp4-exception"
                b = bound_value(BoundFormula(fam, m, q))
                bounds.append((fam, b, bound_holds(b, fpr, fam in STRICT_FAMILIES)))
                if lab.startswith("O"):
                    b = bound_value(BoundFormula("quadratic-form", m, q, nu=xnu))
                    bounds.append(("quadratic-form", b, bound_holds(b, fpr, True)))
            recs.append(FprRecord(cid, lab, fpr, bounds))
    return recs
