"""Spread and uniform spread: exact covers for small groups, a randomized
certifier for larger ones, and generating-graph diagnostics.

Notation: for an anchor ``x`` the blocker set ``B(x)`` holds the ``z`` with
``<x, z> != G``.  A family of ``k`` anchors defeats spread ``k`` exactly when
their blocker sets cover the candidate universe, so ``s(G)`` and ``u(G)`` are
minimum cover sizes minus one.  If ``z`` generates ``G`` together with a power
of ``x`` it does so with ``x`` too, so anchors of prime order suffice.
"""

from __future__ import annotations

import gzip
import math
import multiprocessing as mp
from collections import Counter, OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from . import _kernels as _k
from .conjtab import class_of, conjugacy_classes, orbit_labels
from .ffield import prime_factors
from .permcore import (BudgetExceeded, Perm, PermGroup, conj_orbit_with_stabilizer,
                       is_generating, random_element)
from .setcover import bits, greedy_cover, min_set_cover, popcount, reduce_sets

EXACT_BUDGET = 2000
SWEEP_LIMIT = 10 ** 5
SWEEP_CHUNK = 4096
MASK_CACHE_BYTES = 256 << 20
TUPLE_BUDGET = 10 ** 6
INFINITE = math.inf


class IdentityInput(ValueError):
    pass


def reduce_to_prime_order(x):
    """``x ** (n/r)`` for ``n = order(x)`` and ``r`` its least prime divisor."""
    n = x.order()
    if n == 1:
        raise IdentityInput("the identity has no prime-order power")
    r = prime_factors(n)[0]
    return x ** (n // r)


def _mask(row):
    """Python int bitset from a boolean array (bit i <-> index i)."""
    return int.from_bytes(np.packbits(np.asarray(row, dtype=bool), bitorder="little").tobytes(),
                          "little")


def is_cyclic(G):
    N = G.order()
    if N == 1:
        return True
    if N <= EXACT_BUDGET:
        return bool((table_group(G).orders == N).any())
    # a nonabelian group is never cyclic
    for a in G.gens:
        for b in G.gens:
            if a * b != b * a:
                return False
    return any(c.order == N for c in class_table(G))


def class_table(G):
    """Cached :func:`~spreadlab.conjtab.conjugacy_classes` of ``G``."""
    tab = getattr(G, "_class_table", None)
    if tab is None:
        tab = conjugacy_classes(G)
        G._class_table = tab
    return tab


# -- exact mode ---------------------------------------------------------------

class TableGroup:
    """Multiplication-table view of a small group, indexed by element rank.

    ``mult[a, b]`` is the rank of ``a*b``.  Blocker rows are computed for
    class representatives with a compiled closure and transported to the
    rest of each class by conjugation.
    """

    def __init__(self, G, budget=EXACT_BUDGET):
        N = G.order()
        if N > budget:
            raise BudgetExceeded(f"|G| = {N} exceeds the exact-mode budget {budget}")
        self.G = G
        self.N = N
        self.idx = G.index()
        allr = np.arange(N, dtype=np.int64)
        self.mult = self.idx.product(np.repeat(allr, N), np.tile(allr, N)) \
            .reshape(N, N).astype(np.int64)
        self.inv = np.argmax(self.mult == 0, axis=1)
        orders = np.zeros(N, dtype=np.int64)
        cur = allr.copy()
        for k in range(1, N + 1):
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            if (orders > 0).all():
                break
            cur = self.mult[cur, allr]
        self.orders = orders
        self.table = class_table(G)
        self.labels = np.asarray(self.table.labels, dtype=np.int64)
        self._rows = {}
        self._transport = {}

    def perm(self, r):
        return self.idx.perm(int(r))

    def rank(self, x):
        return self.idx.rank_perm(x)

    def conj_map(self, h):
        """``z -> z^h`` on ranks."""
        return self.mult[self.mult[self.inv[h]], h]

    def generates(self, a, b):
        return bool(_k.pair_generates(self.mult, int(a), int(b)))

    def transporters(self, cid):
        """For each member ``x`` of class ``cid``, some ``g`` with ``rep^g = x``."""
        if cid not in self._transport:
            r = self.table[cid].rank
            xs = self.mult[self.mult[self.inv, r], np.arange(self.N)]
            members, first = np.unique(xs, return_index=True)
            self._transport[cid] = dict(zip(members.tolist(), first.tolist()))
        return self._transport[cid]

    def blocker_row(self, a):
        """Boolean array over ranks: ``z`` with ``<a, z> != G``."""
        a = int(a)
        if a in self._rows:
            return self._rows[a]
        cid = int(self.labels[a])
        rep = self.table[cid].rank
        if rep not in self._rows:
            self._rows[rep] = _k.nongenerating_row(self.mult, rep, np.arange(self.N))
        if a != rep:
            g = self.transporters(cid)[a]
            # z in B(rep^g) iff z^(g^-1) in B(rep)
            self._rows[a] = self._rows[rep][self.conj_map(self.inv[g])]
        return self._rows[a]

    def class_mask(self, cid):
        return _mask(self.labels == cid)

    def nonidentity_mask(self):
        return ((1 << self.N) - 1) ^ 1

    def prime_order_ranks(self):
        o = self.orders
        return [r for r in range(1, self.N) if len(prime_factors(int(o[r]))) == 1
                and prime_factors(int(o[r]))[0] == o[r]]

    def centralizer_ranks(self, e):
        return np.flatnonzero(self.mult[e] == self.mult[:, e])


def table_group(G, budget=EXACT_BUDGET):
    tg = getattr(G, "_table_group", None)
    if tg is None:
        tg = TableGroup(G, budget)
        G._table_group = tg
    return tg


@dataclass
class BlockerSet:
    anchor: Perm
    anchor_rank: int
    members: int
    universe: int

    def __contains__(self, r):
        return bool((self.members >> int(r)) & 1)

    def size(self):
        return popcount(self.members)


def blocker_sets(G, universe="ALL", budget=EXACT_BUDGET):
    """Blocker sets of the prime-order class representatives.

    ``universe`` is a class id or ``"ALL"`` (all nonidentity elements).  Sets
    of other anchors follow by conjugation (see :meth:`TableGroup.blocker_row`).
    """
    tg = table_group(G, budget)
    U = tg.nonidentity_mask() if universe == "ALL" else tg.class_mask(int(universe))
    out = []
    for cid in tg.table.prime_order_ids():
        r = tg.table[cid].rank
        out.append(BlockerSet(tg.perm(r), r, _mask(tg.blocker_row(r)) & U, U))
    return out


@dataclass
class SpreadResult:
    value: float
    cover: list
    exhaustive: bool = True
    class_id: int | None = None
    nodes: int = 0
    per_class: dict = field(default_factory=dict)

    def __str__(self):
        v = "infinity" if self.value == INFINITE else str(self.value)
        return v


def _symmetry_breaker(tg, anchors, U):
    """Root-level pruning: candidates covering element ``e`` are replaced by
    orbit representatives of ``C_G(e)``, which preserves the universe."""
    pos = {a: i for i, a in enumerate(anchors)}

    def first_choices(e, cands, rsets, orig):
        value_to_j = {s: j for j, s in enumerate(rsets)}
        cent = tg.centralizer_ranks(e)
        maps = [tg.conj_map(g) for g in cent]
        seen = set()
        reps = []
        for j in sorted(cands):
            if j in seen:
                continue
            reps.append(j)
            a = anchors[orig[j]]
            for m in maps:
                img = pos.get(int(m[a]))
                if img is None:
                    continue
                jj = value_to_j.get(_mask(tg.blocker_row(anchors[img])) & U)
                if jj is not None:
                    seen.add(jj)
        return reps

    return first_choices


def _anchors(tg, reduce):
    if reduce:
        return tg.prime_order_ranks()
    return list(range(1, tg.N))


def _cover(tg, U, anchors, node_limit=None, symmetry=True):
    sets = [_mask(tg.blocker_row(a)) & U for a in anchors]
    fc = _symmetry_breaker(tg, anchors, U) if symmetry else None
    return min_set_cover(U, sets, node_limit=node_limit, first_choices=fc)


def exact_spread(G, reduce=True, budget=EXACT_BUDGET, node_limit=None):
    """``s(G)`` with a minimum cover of the nonidentity elements as witness."""
    if is_cyclic(G):
        return SpreadResult(INFINITE, [])
    tg = table_group(G, budget)
    anchors = _anchors(tg, reduce)
    res = _cover(tg, tg.nonidentity_mask(), anchors, node_limit)
    cover = [tg.perm(anchors[i]) for i in res.chosen]
    return SpreadResult(res.size - 1, cover, res.exhaustive, nodes=res.nodes)


def exact_uniform_spread(G, reduce=True, budget=EXACT_BUDGET, node_limit=None):
    """``u(G)``: the largest over classes of (minimum cover of the class) - 1.

    Classes whose greedy cover is no larger than the best exact value so far
    cannot improve it and are skipped.
    """
    if is_cyclic(G):
        return SpreadResult(INFINITE, [])
    tg = table_group(G, budget)
    anchors = _anchors(tg, reduce)
    rows = [_mask(tg.blocker_row(a)) for a in anchors]
    cands = []
    for cid in range(1, len(tg.table)):
        U = tg.class_mask(cid)
        kept = reduce_sets(U, rows)
        g = greedy_cover(U, [s for s, _ in kept])
        cands.append((len(g), cid))
    cands.sort(key=lambda t: (-t[0], t[1]))
    best = None
    exhaustive = True
    nodes = 0
    per_class = {}
    for ub, cid in cands:
        if best is not None and ub <= best.size:
            per_class[cid] = None
            continue
        U = tg.class_mask(cid)
        res = _cover(tg, U, anchors, node_limit)
        nodes += res.nodes
        exhaustive &= res.exhaustive
        per_class[cid] = res.size - 1
        if best is None or res.size > best.size or (res.size == best.size and cid < best_cid):
            best, best_cid = res, cid
    cover = [tg.perm(anchors[i]) for i in best.chosen]
    return SpreadResult(best.size - 1, cover, exhaustive, class_id=best_cid, nodes=nodes,
                        per_class=per_class)


# -- generating graph ---------------------------------------------------------

@dataclass
class GeneratingGraph:
    ranks: np.ndarray
    adjacency: np.ndarray  # bool, indexed by position in ranks
    class_of_vertex: np.ndarray

    def degree(self):
        return self.adjacency.sum(axis=1)

    def isolated(self):
        return self.ranks[self.degree() == 0]


def generating_graph(G, budget=EXACT_BUDGET):
    tg = table_group(G, budget)
    verts = np.arange(1, tg.N)
    adj = np.empty((len(verts), len(verts)), dtype=bool)
    for i, a in enumerate(verts):
        adj[i] = ~tg.blocker_row(a)[1:]
    return GeneratingGraph(verts, adj, tg.labels[verts])


def _eccentricity(adj, start):
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = seen.copy()
    d = 0
    while True:
        nxt = adj[frontier].any(axis=0) & ~seen
        if not nxt.any():
            break
        seen |= nxt
        frontier = nxt
        d += 1
    return d if seen.all() else None


def graph_diameter(graph):
    """Diameter of the generating graph, or ``None`` when disconnected.

    Conjugation acts on the graph by automorphisms, so one breadth-first
    search per class suffices.
    """
    if len(graph.ranks) == 0:
        return 0
    starts = {}
    for i, c in enumerate(graph.class_of_vertex.tolist()):
        starts.setdefault(c, i)
    diam = 0
    for i in starts.values():
        e = _eccentricity(graph.adjacency, i)
        if e is None:
            return None
        diam = max(diam, e)
    return diam


# -- generation tests for general groups --------------------------------------

def generates_pair(G, x, z):
    N = G.order()
    if N <= EXACT_BUDGET:
        tg = table_group(G)
        return tg.generates(tg.rank(x), tg.rank(z))
    return is_generating(G, [x, z], check_membership=False)


def centralizer(G, x):
    cache = getattr(G, "_centralizers", None)
    if cache is None:
        cache = G._centralizers = {}
    key = x.img
    if key not in cache:
        cache[key] = conj_orbit_with_stabilizer(G, x, check_membership=False)[1]
    return cache[key]


def _orbits_on_members(G, members, acting_gens):
    """Orbits of conjugation by ``acting_gens`` on sorted rank array ``members``."""
    idx = G.index()
    maps = []
    for g in acting_gens:
        if g.is_identity():
            continue
        img = idx.conjugate_ranks(members, g)
        maps.append(np.searchsorted(members, img))
    return orbit_labels(len(members), maps)


def nongeneration_count(G, table, x_class, s_class):
    """Number of ``z`` in the class of ``s`` with ``<x, z> != G``, for ``x``
    the representative of ``x_class``.

    Generation is constant on orbits of ``C_G(x)`` on ``s^G``; equivalently
    one may count over ``x^G`` under ``C_G(s)``.  The smaller class is the
    one enumerated, and the count is rescaled when it is ``x^G``.
    """
    cx, cs = table[x_class], table[s_class]
    if cx.size <= cs.size:
        fixed, moving, enum_cls = cs.rep, cx.rep, x_class
    else:
        fixed, moving, enum_cls = cx.rep, cs.rep, s_class
    members = table.members(enum_cls)
    C = centralizer(G, fixed)
    k, labels = _orbits_on_members(G, members, C.gens)
    first = np.full(k, -1, dtype=np.int64)
    order = np.argsort(labels, kind="stable")
    lab_sorted = labels[order]
    starts = np.flatnonzero(np.r_[True, lab_sorted[1:] != lab_sorted[:-1]])
    first[lab_sorted[starts]] = members[order[starts]]
    sizes = np.bincount(labels, minlength=k)
    idx = G.index()
    bad = 0
    for c in range(k):
        z = idx.perm(int(first[c]))
        if not generates_pair(G, fixed, z):
            bad += int(sizes[c])
    if enum_cls == x_class:
        # bad pairs counted over x^G; convert to a count over s^G
        return Fraction(bad * cs.size, cx.size)
    return Fraction(bad)


def nongeneration_probability(G, table, x_class, s_class):
    """Exact ``P(x, s)``: chance that ``x`` and a random conjugate of ``s``
    fail to generate."""
    return nongeneration_count(G, table, x_class, s_class) / table[s_class].size


# -- tuple orbit representatives ----------------------------------------------

def tuple_orbit_reps(G, classes, table=None, budget=TUPLE_BUDGET):
    """One representative per orbit of ``G`` on ``C_1 x ... x C_k`` (diagonal
    conjugation), built one coordinate at a time with shrinking stabilizers.

    Returns a list of ``(tuple_of_perms, orbit_size)``.
    """
    if not classes:
        raise ValueError("need at least one class")
    if table is None:
        table = class_table(G)
    idx = G.index()
    N = G.order()
    first = table[classes[0]].rep
    level = [((first,), centralizer(G, first))]
    for cid in classes[1:]:
        members = table.members(cid)
        nxt = []
        for tup, S in level:
            k, labels = _orbits_on_members(G, members, S.gens)
            reps = np.full(k, -1, dtype=np.int64)
            # first member of each orbit in rank order
            seen = np.zeros(k, dtype=bool)
            for pos, lab in enumerate(labels.tolist()):
                if not seen[lab]:
                    seen[lab] = True
                    reps[lab] = members[pos]
            for r in reps.tolist():
                y = idx.perm(r)
                if S.order() == 1:
                    stab = S
                else:
                    stab = conj_orbit_with_stabilizer(S, y, check_membership=False)[1]
                nxt.append((tup + (y,), stab))
            if len(nxt) > budget:
                raise BudgetExceeded(f"more than {budget} tuple representatives")
        level = nxt
    return [(tup, N // S.order()) for tup, S in level]


# -- randomized certifier -----------------------------------------------------

class _ClassTransport:
    """Schreier tree of a conjugacy class over element ranks: for each member
    a word in the generators conjugating the class representative to it."""

    def __init__(self, G, table, cid):
        self.G = G
        idx = G.index()
        self.members = table.members(cid)
        gens = [g for g in G.gens if not g.is_identity()]
        self.gens = gens
        maps = [np.searchsorted(self.members, idx.conjugate_ranks(self.members, g)).tolist()
                for g in gens]
        n = len(self.members)
        start = int(np.searchsorted(self.members, table[cid].rank))
        parent = [-1] * n
        via = [-1] * n
        parent[start] = start
        queue = [start]
        for q in queue:
            for gi, m in enumerate(maps):
                p = m[q]
                if parent[p] < 0:
                    parent[p] = q
                    via[p] = gi
                    queue.append(p)
        self.parent, self.via, self.start = parent, via, start

    def transporter(self, rank):
        p = int(np.searchsorted(self.members, rank))
        word = []
        while p != self.start:
            word.append(self.via[p])
            p = self.parent[p]
        g = Perm.identity(self.G.degree)
        for gi in reversed(word):
            g = g * self.gens[gi]
        return g


class _Blockers:
    """Blocker sets restricted to the class ``s^G``, as boolean masks over
    its sorted member ranks."""

    def __init__(self, G, table, s_class):
        self.G, self.table = G, table
        self.idx = G.index()
        self.members = table.members(s_class)
        self.size = len(self.members)
        self._rep = {}
        self._transport = {}
        # packed masks of class members met at inner search nodes, LRU
        self._cache = OrderedDict()
        self._cache_cap = max(16, MASK_CACHE_BYTES // max(1, (self.size + 7) // 8))

    def rep_mask(self, cid):
        if cid not in self._rep:
            x = self.table[cid].rep
            C = centralizer(self.G, x)
            k, labels = _orbits_on_members(self.G, self.members, C.gens)
            firsts = np.full(k, -1, dtype=np.int64)
            order = np.argsort(labels, kind="stable")
            ls = labels[order]
            starts = np.flatnonzero(np.r_[True, ls[1:] != ls[:-1]])
            firsts[ls[starts]] = self.members[order[starts]]
            bad = np.array([not generates_pair(self.G, x, self.idx.perm(int(r)))
                            for r in firsts.tolist()], dtype=bool)
            self._rep[cid] = bad[labels]
        return self._rep[cid]

    def bad_count(self, cid):
        return int(self.rep_mask(cid).sum())

    def _transporter(self, cid, rank):
        if cid not in self._transport:
            self._transport[cid] = _ClassTransport(self.G, self.table, cid)
        return self._transport[cid].transporter(rank)

    def mask(self, cid, rank):
        """Mask of ``B(y)`` for the class member ``y`` of given rank."""
        base = self.rep_mask(cid)
        if rank == self.table[cid].rank:
            return base
        key = (cid, rank)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return np.unpackbits(hit, count=self.size).astype(bool)
        g = self._transporter(cid, rank)
        # z in B(rep^g) iff z^(g^-1) in B(rep)
        pre = self.idx.conjugate_ranks(self.members, g.inverse())
        out = base[np.searchsorted(self.members, pre)]
        self._cache[key] = np.packbits(out)
        if len(self._cache) > self._cache_cap:
            self._cache.popitem(last=False)
        return out

    def bad_at(self, cid, rank, positions):
        """``mask(cid, rank)[positions]`` without building the whole mask."""
        base = self.rep_mask(cid)
        positions = np.asarray(positions, dtype=np.int64)
        if rank == self.table[cid].rank:
            return base[positions]
        g = self._transporter(cid, rank)
        pre = self.idx.conjugate_ranks(self.members[positions], g.inverse())
        return base[np.searchsorted(self.members, pre)]


def _orbit_reps(G, S, members):
    """First member (in rank order) of each orbit of ``S`` on ``members``."""
    k, labels = _orbits_on_members(G, members, S.gens)
    reps = np.full(k, -1, dtype=np.int64)
    order = np.argsort(labels, kind="stable")
    ls = labels[order]
    starts = np.flatnonzero(np.r_[True, ls[1:] != ls[:-1]])
    reps[ls[starts]] = members[order[starts]]
    return np.sort(reps)


@dataclass
class TupleRecord:
    classes: tuple
    tuple_rep: tuple
    witness: Perm | None
    status: str  # "random", "sweep", "bound" or "fail"
    slack: int = 0  # "bound" records: survivors minus the remaining blocker counts


@dataclass
class SpreadCertificate:
    group: str
    s_class: int
    s_rep: Perm
    k: int
    N: int
    seed: int
    stage1: list = field(default_factory=list)  # (class id, rep, P)
    stage1_ok: bool = False
    records: list = field(default_factory=list)

    @property
    def failing(self):
        return [r for r in self.records if r.status == "fail"]

    @property
    def success(self):
        return self.stage1_ok or not self.failing

    def to_text(self):
        lines = ["spread-certificate",
                 f"group = {self.group}",
                 f"s_class = {self.s_class}",
                 f"s_rep = {self.s_rep}",
                 f"k = {self.k}",
                 f"N = {self.N}",
                 f"seed = {self.seed}",
                 f"stage1 = {'pass' if self.stage1_ok else 'open'}"]
        for cid, rep, p in self.stage1:
            lines.append(f"prob class={cid} P={p} rep={rep}")
        for r in self.records:
            cls = ",".join(map(str, r.classes))
            xs = " ; ".join(str(x) for x in r.tuple_rep)
            w = str(r.witness) if r.witness is not None else "-"
            lines.append(f"tuple classes={cls} status={r.status} slack={r.slack} "
                         f"witness={w} rep={xs}")
        lines.append(f"result = {'success' if self.success else 'failure'}")
        return "\n".join(lines) + "\n"


def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def _open_multisets(prime_classes, probs, k):
    """Multisets of prime-order classes not settled by the union bound.

    Classes with ``P(x, s) = 0`` impose no condition and are dropped; a
    multiset contained in another open one needs no separate check.
    """
    found = set()
    for ms in combinations_with_replacement(prime_classes, k):
        core = tuple(sorted((c for c in ms if probs[c] > 0), key=lambda c: (-probs[c], c)))
        if core and sum(probs[c] for c in core) >= 1:
            found.add(core)

    def sub(a, b):
        ca, cb = Counter(a), Counter(b)
        return all(cb[c] >= n for c, n in ca.items())

    keep = [m for m in found if not any(m != o and sub(m, o) for o in found)]
    return sorted(keep, key=lambda m: (len(m), [-probs[c] for c in m], m))


def _search_multiset(G, table, blk, ms, N, seed, ms_index):
    """Depth-first search over tuple representatives of ``ms`` with pruning.

    A partial tuple is settled when the survivors ``W`` in ``s^G`` outnumber
    the blocker counts of the classes still to be chosen.  Complete tuples
    draw up to ``N`` random conjugates of ``s``, then sweep ``W``.
    """
    records = []
    idx = G.index()
    bad = [blk.bad_count(c) for c in ms]
    rem = [sum(bad[j:]) for j in range(len(ms) + 1)]
    leaf = 0
    stack = [((), G, np.ones(blk.size, dtype=bool), None)]
    while stack:
        tup, S, W, last = stack.pop()
        j = len(tup)
        if j == len(ms):
            # survivors are W minus B(last tuple entry), tested lazily
            rng = _stream(seed, ms_index, leaf)
            leaf += 1
            hit = None
            for _ in range(N):
                pos = int(rng.integers(blk.size))
                if W[pos] and not blk.bad_at(*last, [pos])[0]:
                    hit, status = pos, "random"
                    break
            if hit is None:
                cand = np.flatnonzero(W)
                for lo in range(0, len(cand), SWEEP_CHUNK):
                    part = cand[lo:lo + SWEEP_CHUNK]
                    good = np.flatnonzero(~blk.bad_at(*last, part))
                    if len(good):
                        hit, status = int(part[good[0]]), "sweep"
                        break
            if hit is None:
                records.append(TupleRecord(ms, tup, None, "fail"))
            else:
                records.append(TupleRecord(ms, tup, idx.perm(int(blk.members[hit])), status))
            continue
        alive = int(W.sum())
        if alive > rem[j]:
            records.append(TupleRecord(ms, tup, None, "bound", alive - rem[j]))
            continue
        cid = ms[j]
        children = []
        for r in _orbit_reps(G, S, table.members(cid)).tolist():
            y = idx.perm(r)
            if j + 1 == len(ms):
                children.append((tup + (y,), None, W, (cid, r)))
                continue
            W2 = W & ~blk.mask(cid, r)
            # the stabilizer is only needed if this child is expanded further
            if int(W2.sum()) <= rem[j + 1]:
                S2 = S if S.order() == 1 else conj_orbit_with_stabilizer(
                    S, y, check_membership=False)[1]
            else:
                S2 = None
            children.append((tup + (y,), S2, W2, None))
        stack.extend(reversed(children))
    return records


_WORK = {}


def _worker(job):
    G, table, s_class, N, seed = _WORK["ctx"]
    i, ms = job
    blk = _WORK.setdefault("blk", _Blockers(G, table, s_class))
    return i, _search_multiset(G, table, blk, ms, N, seed, i)


def certify_uniform_spread(G, s_class, k, N=100, seed=0, table=None, jobs=1,
                           group_id=None, prime_classes=None):
    """Certify ``u(G) >= k`` with respect to the class ``s_class``.

    Stage 1 computes the exact ``P(x, s)`` for every prime-order class ``x``
    and settles each multiset of classes whose probabilities sum below 1.
    Stage 2 searches tuple representatives of the remaining multisets (see
    :func:`_search_multiset`), keyed streams making the result independent
    of ``jobs``.
    """
    if k < 1 or N < 1:
        raise ValueError("k and N must be positive")
    if table is None:
        table = class_table(G)
    s_rep = table[s_class].rep
    cert = SpreadCertificate(group_id or (G.name or "group"), s_class, s_rep, k, N, seed)
    if prime_classes is None:
        prime_classes = table.prime_order_ids()
    probs = {}
    for cid in prime_classes:
        probs[cid] = nongeneration_probability(G, table, cid, s_class)
        cert.stage1.append((cid, table[cid].rep, probs[cid]))
    todo = _open_multisets(prime_classes, probs, k)
    cert.stage1_ok = not todo
    if cert.stage1_ok:
        return cert
    jobs_list = list(enumerate(todo))
    if jobs > 1 and len(jobs_list) > 1:
        _WORK.clear()
        _WORK["ctx"] = (G, table, s_class, N, seed)
        with ProcessPoolExecutor(jobs, mp_context=mp.get_context("fork")) as ex:
            results = dict(ex.map(_worker, jobs_list))
        _WORK.clear()
    else:
        blk = _Blockers(G, table, s_class)
        results = {i: _search_multiset(G, table, blk, ms, N, seed, i) for i, ms in jobs_list}
    for i, _ in jobs_list:
        cert.records.extend(results[i])
    return cert


def replay_certificate(G, cert, table=None):
    """Re-check a certificate without randomness; returns a list of problems.

    Witnesses are re-tested by direct generation.  Stage-1 probabilities and
    the survivor counts behind "bound" records are recomputed exactly.
    """
    if table is None:
        table = class_table(G)
    problems = []
    if class_of(table, cert.s_rep) != cert.s_class:
        problems.append("s_rep is not in the stated class")
    probs = {}
    for cid, rep, p in cert.stage1:
        if class_of(table, rep) != cid:
            problems.append(f"stage-1 rep of class {cid} misplaced")
        probs[cid] = nongeneration_probability(G, table, cid, cert.s_class)
        if probs[cid] != p:
            problems.append(f"P for class {cid}: stored {p}, recomputed {probs[cid]}")
    todo = _open_multisets(sorted(probs), probs, cert.k)
    if cert.stage1_ok and todo:
        problems.append("stage 1 does not settle every multiset")
    blk = None
    for r in cert.records:
        for x, cid in zip(r.tuple_rep, r.classes):
            if class_of(table, x) != cid:
                problems.append(f"tuple entry {x} not in class {cid}")
        if r.status == "fail":
            continue
        if r.status == "bound":
            if blk is None:
                blk = _Blockers(G, table, cert.s_class)
            idx = G.index()
            W = np.ones(blk.size, dtype=bool)
            for x, cid in zip(r.tuple_rep, r.classes):
                W &= ~blk.mask(cid, idx.rank_perm(x))
            rest = r.classes[len(r.tuple_rep):]
            slack = int(W.sum()) - sum(blk.bad_count(c) for c in rest)
            if slack != r.slack or slack <= 0:
                problems.append(f"bound record {r.classes} does not hold")
            continue
        if class_of(table, r.witness) != cert.s_class:
            problems.append(f"witness {r.witness} not in class {cert.s_class}")
            continue
        for x in r.tuple_rep:
            if not generates_pair(G, x, r.witness):
                problems.append(f"witness {r.witness} fails with {x}")
    if not cert.stage1_ok:
        covered = {r.classes for r in cert.records}
        for m in todo:
            if m not in covered:
                problems.append(f"multiset {m} has no records")
    return problems


def read_certificate_text(path):
    """Certificate text from ``path``; ``.gz`` files are decompressed."""
    if path.endswith(".gz"):
        with gzip.open(path, "rt") as fh:
            return fh.read()
    with open(path) as fh:
        return fh.read()


def parse_certificate(text, degree):
    """Inverse of :meth:`SpreadCertificate.to_text`."""
    from .permcore import ParseError

    head = {}
    stage1, records = [], []
    lines = text.splitlines()
    if not lines or lines[0].strip() != "spread-certificate":
        raise ParseError("line 1: missing spread-certificate header")
    for no, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        try:
            if line.startswith("prob "):
                a, rest = line[5:].split(" P=", 1)
                p, rep = rest.split(" rep=", 1)
                stage1.append((int(a.split("=")[1]), Perm.from_cycles(rep, degree), Fraction(p)))
            elif line.startswith("tuple "):
                body = line[6:]
                cls, body = body.split(" status=", 1)
                status, body = body.split(" slack=", 1)
                slack, body = body.split(" witness=", 1)
                w, reps = body.split(" rep=", 1)
                cls = cls.split("=", 1)[1]
                classes = tuple(int(c) for c in cls.split(",")) if cls else ()
                tup = tuple(Perm.from_cycles(t.strip(), degree) for t in reps.split(";")
                            if t.strip())
                wit = None if w == "-" else Perm.from_cycles(w, degree)
                records.append(TupleRecord(classes, tup, wit, status, int(slack)))
            else:
                key, val = (t.strip() for t in line.split("=", 1))
                head[key] = val
        except (ValueError, IndexError) as exc:
            raise ParseError(f"line {no}: {exc}") from None
    try:
        cert = SpreadCertificate(head["group"], int(head["s_class"]),
                                 Perm.from_cycles(head["s_rep"], degree), int(head["k"]),
                                 int(head["N"]), int(head["seed"]))
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    cert.stage1 = stage1
    cert.stage1_ok = head.get("stage1") == "pass"
    cert.records = records
    return cert


def outer_class_ids(G, table):
    """Classes of ``G`` outside its inner group ``G.inner`` (all classes if
    ``G`` carries no inner group)."""
    inner = getattr(G, "inner", None)
    if inner is None or inner is G:
        return [i for i, c in enumerate(table) if c.order > 1]
    return [i for i, c in enumerate(table) if not inner.contains(c.rep)]


def auto_s_class(G, table=None, candidates=None):
    """Candidate class for ``s`` minimising the largest ``P(x, s)`` over
    prime-order ``x``; ties go to the lowest class id.

    Returns ``(class id, {x class: P})``.
    """
    table = table or class_table(G)
    if candidates is None:
        candidates = outer_class_ids(G, table)
    best = None
    for sc in candidates:
        probs = {c: nongeneration_probability(G, table, c, sc) for c in table.prime_order_ids()}
        worst = max(probs.values(), default=Fraction(0))
        if best is None or worst < best[0]:
            best = (worst, sc, probs)
    if best is None:
        raise ValueError("no candidate classes")
    return best[1], best[2]
