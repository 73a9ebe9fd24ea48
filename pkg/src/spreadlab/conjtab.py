"""Conjugacy classes of a permutation group and T-classes in a coset T*theta.

Classes are found as connected components of the conjugation action of the
generators on element ranks (see :class:`~spreadlab.permcore.ElementIndex`),
so every element is touched a constant number of times with numpy doing the
work.  Representatives are the members with the smallest image array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .ffield import prime_factors
from . import _kernels as _k
from .permcore import (DEFAULT_ENUM_BUDGET, BudgetExceeded, ElementNotInGroup,
                       Perm, PermGroup)

CHUNK = 1 << 16


class NotInUnderlyingSet(ValueError):
    pass


class NotNormalizing(ValueError):
    pass


@dataclass
class ConjClass:
    rep: Perm
    size: int
    centralizer_order: int
    order: int
    power_signature: tuple = ()
    rank: int = -1

    def sort_key(self):
        return (self.order, self.size, self.rep.key())


@dataclass
class ClassTable:
    """Classes of ``group`` (``theta is None``) or of the coset ``group*theta``
    under conjugation by ``group``."""

    group: PermGroup
    classes: list
    labels: np.ndarray | None = None
    theta: Perm | None = None
    ambient: PermGroup | None = None
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i):
        return self.classes[i]

    @property
    def acting_order(self):
        return self.group.order()

    def members(self, cid):
        """Ranks (in ``group``'s index) of the class; for coset tables the
        coset element is ``perm(rank) * theta``."""
        return np.flatnonzero(self.labels == cid)

    def member_perms(self, cid):
        idx = self.group.index()
        rows = idx.unrank(self.members(cid))
        if self.theta is not None:
            rows = np.asarray(self.theta.img)[rows]
        return rows

    def sizes(self):
        return [c.size for c in self.classes]

    def prime_order_ids(self):
        return [i for i, c in enumerate(self.classes)
                if c.order > 1 and len(prime_factors(c.order)) == 1 and prime_factors(c.order)[0] == c.order]


def conjugation_map(index, g, ranks=None, theta=None):
    """Ranks of ``x ** g`` for the given ranks (all by default).

    With ``theta`` the elements are ``t*theta`` and the returned rank is that
    of ``t'`` with ``(t*theta) ** g = t'*theta``.
    """
    if ranks is None:
        ranks = np.arange(index.order, dtype=np.int64)
    if theta is None:
        return index.transform(ranks, g.inverse(), g)
    # (t theta)^g = g^-1 t (theta g theta^-1) theta
    return index.transform(ranks, g.inverse(), theta * g * theta.inverse())


def orbit_labels(n, maps):
    """Connected components of the graph on ``range(n)`` with edges i -> m[i]."""
    if n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    rows = np.concatenate([np.arange(n)] * len(maps)) if maps else np.arange(0)
    cols = np.concatenate(maps) if maps else np.arange(0)
    A = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    k, labels = connected_components(A, directed=True, connection="weak")
    return k, labels


def _min_rows(index, ranks, labels, k, theta=None):
    """Per component, the rank whose (possibly theta-shifted) image array is
    lexicographically smallest."""
    n = index.degree
    th = np.arange(n, dtype=np.int32) if theta is None else np.asarray(theta.img, dtype=np.int32)
    ranks = np.ascontiguousarray(ranks, dtype=np.int64)
    best, col0 = _k.first_column_min(ranks, np.ascontiguousarray(labels, dtype=np.int64), k,
                                     index.U, index.sizes, index.radix, n, th)
    keep = np.flatnonzero(col0 == best[labels])
    R = th[index.unrank(ranks[keep])]
    lab = labels[keep]
    order = np.lexsort(tuple(R[:, c] for c in range(n - 1, -1, -1)) + (lab,))
    first = np.ones(len(order), dtype=bool)
    first[1:] = lab[order][1:] != lab[order][:-1]
    chosen = order[first]
    reps = np.empty(k, dtype=np.int64)
    reps[lab[chosen]] = ranks[keep][chosen]
    return reps


def _check_budget(G, budget):
    if G.order() > budget:
        raise BudgetExceeded(f"|G| = {G.order()} exceeds the enumeration budget {budget}")


def _power_signature(perm, centralizer_of, skip=()):
    n = perm.order()
    sig = []
    for r in prime_factors(n) if n > 1 else []:
        if r in skip:
            continue
        sig.append((r, centralizer_of(perm ** r)))
    return tuple(sig)


def conjugacy_classes(G, budget=DEFAULT_ENUM_BUDGET):
    """All conjugacy classes of ``G``, sorted by (order, size, representative)."""
    _check_budget(G, budget)
    idx = G.index(budget)
    N = idx.order
    maps = [conjugation_map(idx, g) for g in G.gens if not g.is_identity()]
    k, labels = orbit_labels(N, maps)
    reps = _min_rows(idx, np.arange(N), labels, k)
    sizes = np.bincount(labels, minlength=k)
    classes = []
    for c in range(k):
        rep = idx.perm(int(reps[c]))
        classes.append(ConjClass(rep, int(sizes[c]), N // int(sizes[c]), rep.order(),
                                 rank=int(reps[c])))
    order = sorted(range(k), key=lambda c: classes[c].sort_key())
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    classes = [classes[c] for c in order]
    labels = remap[labels].astype(np.int32)
    table = ClassTable(G, classes, labels)

    def cent(y):
        return N // int(sizes[order][labels[idx.rank_perm(y)]])

    for c in classes:
        c.power_signature = _power_signature(c.rep, cent)
    return table


def coset_classes(T, theta, budget=DEFAULT_ENUM_BUDGET, e=None):
    """Orbits of ``T`` acting by conjugation on the coset ``T*theta``.

    ``ConjClass.centralizer_order`` is ``|C_T(t*theta)|``.  The power
    signature records ``|C_T((t*theta)^r)|`` for primes ``r`` of the order of
    ``(t*theta)^e`` that are coprime to ``e`` (those powers stay in the coset
    when ``r = 1 mod e``, and are reported only then).
    """
    _check_budget(T, budget)
    for g in T.gens:
        if not T.contains(g ** theta):
            raise NotNormalizing("theta does not normalize T")
    idx = T.index(budget)
    N = idx.order
    maps = [conjugation_map(idx, g, theta=theta) for g in T.gens if not g.is_identity()]
    k, labels = orbit_labels(N, maps)
    reps = _min_rows(idx, np.arange(N), labels, k, theta=theta)
    sizes = np.bincount(labels, minlength=k)
    classes = []
    for c in range(k):
        rep = idx.perm(int(reps[c])) * theta
        classes.append(ConjClass(rep, int(sizes[c]), N // int(sizes[c]), rep.order(),
                                 rank=int(reps[c])))
    order = sorted(range(k), key=lambda c: classes[c].sort_key())
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    classes = [classes[c] for c in order]
    labels = remap[labels].astype(np.int32)
    table = ClassTable(T, classes, labels, theta=theta)
    if e is None:
        e = theta_order_mod(T, theta)
    sizes_sorted = np.array([c.size for c in classes])
    tinv = theta.inverse()

    def cent(y):
        r = idx.rank_perm(y * tinv)
        return N // int(sizes_sorted[labels[r]])

    for c in classes:
        y = c.rep ** e
        n = y.order()
        sig = []
        for r in prime_factors(n) if n > 1 else []:
            if r % e == 1 % e:
                sig.append((r, cent(c.rep ** r)))
        c.power_signature = tuple(sig)
    return table


def theta_order_mod(T, theta):
    k, x = 1, theta
    while not T.contains(x):
        x = x * theta
        k += 1
    return k


def class_of(table, x):
    """Class id of ``x`` (for coset tables ``x`` must lie in ``T*theta``)."""
    idx = table.group.index()
    y = x if table.theta is None else x * table.theta.inverse()
    r = idx.rank_perm(y)
    if r < 0:
        raise NotInUnderlyingSet(str(x))
    return int(table.labels[r])


def class_of_ranks(table, ranks):
    return table.labels[ranks]


def format_table(table):
    """Stable text rendering, one line per class."""
    lines = []
    for i, c in enumerate(table.classes):
        sig = ",".join(f"{r}:{v}" for r, v in c.power_signature) or "-"
        lines.append(f"class {i} order={c.order} size={c.size} "
                     f"centralizer={c.centralizer_order} powers={sig} rep={c.rep}")
    return "\n".join(lines)
