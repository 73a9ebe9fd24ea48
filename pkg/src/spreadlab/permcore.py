"""Permutations, stabilizer chains and permutation groups.

Convention: points are acted on from the right and products are read left
to right, so ``(a * b)[i] == b[a[i]]`` ("apply a, then b").  Conjugation is
``x ** g == g**-1 * x * g``.  Points are 0-based.

Besides the usual Schreier-Sims machinery this module provides
:class:`ElementIndex`, a bijection between ``range(|G|)`` and the elements of
``G`` built from the stabilizer chain.  It works on numpy arrays so that whole
classes or whole groups can be pushed through conjugation and multiplication
at once.
"""

from __future__ import annotations

import random
import re
from collections import deque
from functools import reduce
from math import gcd

import numpy as np

from . import _kernels as _k


class DegreeMismatch(ValueError):
    pass


class ElementNotInGroup(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class ParseError(ValueError):
    pass


DEFAULT_ENUM_BUDGET = 2_000_000


def _lcm(a, b):
    return a * b // gcd(a, b)


class Perm:
    """Immutable permutation of ``{0, ..., n-1}`` stored as an image tuple."""

    __slots__ = ("img", "_hash")

    def __init__(self, img):
        self.img = tuple(img)
        self._hash = None

    @classmethod
    def identity(cls, n):
        return cls(range(n))

    @classmethod
    def from_cycles(cls, text, n):
        """Parse disjoint-cycle notation such as ``"(0 1 2)(3 4)"``."""
        img = list(range(n))
        text = text.strip()
        if text in ("", "()"):
            return cls(img)
        if not re.fullmatch(r"(\(\s*\d+(?:[\s,]+\d+)*\s*\)\s*)+", text):
            raise ParseError(f"bad cycle notation: {text!r}")
        seen = set()
        for cyc in re.findall(r"\(([^)]*)\)", text):
            pts = [int(t) for t in re.split(r"[\s,]+", cyc.strip()) if t]
            for p in pts:
                if p >= n:
                    raise ParseError(f"point {p} out of range for degree {n}")
                if p in seen:
                    raise ParseError(f"point {p} repeated in {text!r}")
                seen.add(p)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
        return cls(img)

    @classmethod
    def from_images(cls, images):
        img = [int(v) for v in images]
        if sorted(img) != list(range(len(img))):
            raise ParseError("image list is not a permutation")
        return cls(img)

    @property
    def degree(self):
        return len(self.img)

    def __len__(self):
        return len(self.img)

    def __getitem__(self, i):
        return self.img[i]

    def __mul__(self, other):
        if len(other.img) != len(self.img):
            raise DegreeMismatch("degrees differ")
        return Perm(map(other.img.__getitem__, self.img))

    def __invert__(self):
        return self.inverse()

    def inverse(self):
        inv = [0] * len(self.img)
        for i, v in enumerate(self.img):
            inv[v] = i
        return Perm(inv)

    def __pow__(self, k):
        if isinstance(k, Perm):
            return k.inverse() * self * k
        return power(self, k)

    def __eq__(self, other):
        return isinstance(other, Perm) and self.img == other.img

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.img)
        return self._hash

    def __lt__(self, other):
        return self.img < other.img

    def key(self):
        """Canonical byte string of the image array."""
        if len(self.img) <= 256:
            return bytes(self.img)
        return np.asarray(self.img, dtype="<u2").tobytes()

    def is_identity(self):
        return all(i == v for i, v in enumerate(self.img))

    def support(self):
        return [i for i, v in enumerate(self.img) if i != v]

    def cycles(self):
        seen = [False] * len(self.img)
        out = []
        for i in range(len(self.img)):
            if seen[i]:
                continue
            cyc = [i]
            seen[i] = True
            j = self.img[i]
            while j != i:
                cyc.append(j)
                seen[j] = True
                j = self.img[j]
            out.append(cyc)
        return out

    def cycle_type(self):
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def order(self):
        return reduce(_lcm, (len(c) for c in self.cycles()), 1)

    def sign(self):
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def __str__(self):
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self):
        return f"Perm({self})"


def compose(a, b):
    """Left-to-right product: first ``a`` then ``b``."""
    return a * b


def inverse(a):
    return a.inverse()


def power(a, k):
    """Binary exponentiation; negative exponents allowed."""
    if k < 0:
        a, k = a.inverse(), -k
    result = Perm.identity(len(a.img))
    base = a
    while k:
        if k & 1:
            result = result * base
        base = base * base
        k >>= 1
    return result


def commutator(a, b):
    return a.inverse() * b.inverse() * a * b


# -- stabilizer chains ------------------------------------------------------

class _Level:
    __slots__ = ("base", "gens", "trans", "inv")

    def __init__(self, base):
        self.base = base
        self.gens = []
        self.trans = {}
        self.inv = {}

    def uinv(self, p):
        v = self.inv.get(p)
        if v is None:
            v = self.inv[p] = self.trans[p].inverse()
        return v


class StabChain:
    """Base and strong generating set with explicit transversals.

    ``levels[i].trans`` maps each point ``p`` of the i-th basic orbit to a
    coset representative ``u`` with ``u[base_i] == p``.
    """

    def __init__(self, degree):
        self.degree = degree
        self.levels = []
        self._ident = Perm.identity(degree)

    @property
    def base(self):
        return [lv.base for lv in self.levels]

    def orbit_lengths(self):
        return [len(lv.trans) for lv in self.levels]

    def order(self):
        o = 1
        for lv in self.levels:
            o *= len(lv.trans)
        return o

    def strong_generators(self):
        seen = {}
        for lv in self.levels:
            for g in lv.gens:
                seen.setdefault(g, None)
        return list(seen)

    def sift(self, g, start=0):
        """Return (residue, level where sifting stopped)."""
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            p = g.img[lv.base]
            if p not in lv.trans:
                return g, i
            g = g * lv.uinv(p)
        return g, len(self.levels)

    def contains(self, g):
        if len(g.img) != self.degree:
            raise DegreeMismatch("degrees differ")
        r, _ = self.sift(g)
        return r.is_identity()

    def _rebuild_orbit(self, i):
        lv = self.levels[i]
        trans = lv.trans
        if not trans:
            trans[lv.base] = self._ident
        queue = deque(trans)
        # new generators may reach old points' images
        while queue:
            p = queue.popleft()
            u = trans[p]
            for s in lv.gens:
                q = s.img[p]
                if q not in trans:
                    trans[q] = u * s
                    queue.append(q)

    def _add_strong(self, h, upto):
        """Add ``h`` as strong generator to levels ``0..upto`` (inclusive)."""
        if upto == len(self.levels):
            fixed = set(self.base)
            b = next(p for p, v in enumerate(h.img) if p != v and p not in fixed)
            self.levels.append(_Level(b))
        for j in range(upto + 1):
            self.levels[j].gens.append(h)
            self._rebuild_orbit(j)

    def add_element(self, g):
        """Sift ``g`` and extend the chain with the residue if nontrivial."""
        r, drop = self.sift(g)
        if r.is_identity():
            return False
        self._add_strong(r, drop)
        return True

    def verify(self):
        """Deterministic Schreier-generator check; extends the chain as needed."""
        i = len(self.levels) - 1
        while i >= 0:
            lv = self.levels[i]
            restart = None
            for p, u in list(lv.trans.items()):
                for s in lv.gens:
                    q = s.img[p]
                    h = u * s * lv.uinv(q)
                    r, drop = self.sift(h, i + 1)
                    if not r.is_identity():
                        self._add_strong(r, drop)
                        restart = drop
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = min(restart, len(self.levels) - 1)
            else:
                i -= 1
        return self


def _product_replacement(gens, rng, warmup=20):
    pool = list(gens)
    while len(pool) < 10:
        pool.append(pool[len(pool) % len(gens)])
    acc = pool[0]
    state = [pool, acc]

    def step():
        pool = state[0]
        i, j = rng.sample(range(len(pool)), 2)
        if rng.random() < 0.5:
            pool[i] = pool[i] * pool[j]
        else:
            pool[i] = pool[j] * pool[i]
        state[1] = state[1] * pool[i]
        return state[1]

    for _ in range(warmup):
        step()
    return step


def schreier_sims(gens, degree=None, target_order=None, seed=0, max_random=None):
    """Build a stabilizer chain for ``<gens>``.

    With ``target_order`` a randomized phase runs first; reaching the target
    certifies the chain, because the product of basic orbit lengths of a
    partial chain never exceeds the group order.  If the target is not reached
    (or none was given) the deterministic Schreier-generator verification runs.
    """
    gens = list(gens)
    if degree is None:
        if not gens:
            raise ValueError("need generators or a degree")
        degree = len(gens[0].img)
    for g in gens:
        if len(g.img) != degree:
            raise DegreeMismatch("generators of different degrees")
    chain = StabChain(degree)
    gens = [g for g in gens if not g.is_identity()]
    for g in gens:
        chain.add_element(g)
    if not gens:
        return chain
    if target_order is not None:
        if chain.order() == target_order:
            return chain
        rng = random.Random(seed)
        step = _product_replacement(gens, rng)
        limit = max_random if max_random is not None else 200 + 40 * degree
        fails = 0
        while fails < limit:
            if chain.add_element(step()):
                fails = 0
                if chain.order() == target_order:
                    return chain
                if chain.order() > target_order:
                    raise ValueError("group is larger than the stated order")
            else:
                fails += 1
    chain.verify()
    return chain


# -- orbits and blocks ------------------------------------------------------

def orbits(gens, degree):
    """Orbit partition of ``<gens>`` as a list of sorted point lists."""
    seen = [-1] * degree
    out = []
    for start in range(degree):
        if seen[start] >= 0:
            continue
        idx = len(out)
        seen[start] = idx
        orb = [start]
        k = 0
        while k < len(orb):
            p = orb[k]
            k += 1
            for g in gens:
                q = g.img[p]
                if seen[q] < 0:
                    seen[q] = idx
                    orb.append(q)
        out.append(sorted(orb))
    return out


def orbit_of(gens, point):
    orb = [point]
    seen = {point}
    k = 0
    while k < len(orb):
        p = orb[k]
        k += 1
        for g in gens:
            q = g.img[p]
            if q not in seen:
                seen.add(q)
                orb.append(q)
    return orb


def minimal_block(gens, degree, a, b):
    """Finest block system (union-find) in which ``a`` and ``b`` share a block.

    Returns the block label array; the system is trivial iff it has one block.
    """
    parent = list(range(degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for g in gens:
            u, v = find(g.img[x]), find(g.img[y])
            if u != v:
                parent[v] = u
                queue.append((u, v))
    return [find(x) for x in range(degree)]


def is_primitive(gens, degree):
    if len(orbits(gens, degree)) != 1:
        return False
    for b in range(1, degree):
        labels = minimal_block(gens, degree, 0, b)
        if len(set(labels)) > 1:
            return False
    return True


def _imprimitive(gens, degree):
    """True if ``<gens>`` (assumed transitive) preserves a nontrivial block system."""
    for b in range(1, degree):
        if len(set(minimal_block(gens, degree, 0, b))) > 1:
            return True
    return False


# -- groups -----------------------------------------------------------------

class PermGroup:
    """Permutation group given by generators, with lazily built chain.

    ``order`` may be supplied when known in advance; it is then used as the
    target of the randomized chain construction and is checked, not trusted.
    """

    def __init__(self, gens, degree=None, order=None, name=None, seed=0):
        gens = list(gens)
        if degree is None:
            if not gens:
                raise ValueError("need generators or a degree")
            degree = len(gens[0].img)
        for g in gens:
            if len(g.img) != degree:
                raise DegreeMismatch("generators of different degrees")
        self.degree = degree
        self.gens = gens
        self.name = name
        self._target = order
        self._seed = seed
        self._chain = None
        self._index = None
        self._primitive = None
        self._orbits = None

    def __repr__(self):
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} ngens={len(self.gens)}>"

    @property
    def chain(self):
        if self._chain is None:
            self._chain = schreier_sims(self.gens, self.degree, self._target, self._seed)
            if self._target is not None and self._chain.order() != self._target:
                raise ValueError(
                    f"order {self._chain.order()} differs from stated {self._target}")
        return self._chain

    def order(self):
        return self.chain.order()

    def __len__(self):
        return self.order()

    @property
    def identity(self):
        return Perm.identity(self.degree)

    def contains(self, x):
        return self.chain.contains(x)

    def __contains__(self, x):
        return self.contains(x)

    def orbits(self):
        if self._orbits is None:
            self._orbits = orbits(self.gens, self.degree)
        return self._orbits

    def is_transitive(self):
        return len(self.orbits()) == 1

    def is_primitive(self):
        if self._primitive is None:
            self._primitive = is_primitive(self.gens, self.degree)
        return self._primitive

    def random_element(self, rng):
        return random_element(self, rng)

    def index(self, budget=DEFAULT_ENUM_BUDGET):
        """The :class:`ElementIndex` of this group (built once)."""
        if self._index is None:
            if self.order() > budget:
                raise BudgetExceeded(f"|G| = {self.order()} exceeds budget {budget}")
            self._index = ElementIndex(self.chain)
        return self._index

    def elements(self, budget=DEFAULT_ENUM_BUDGET):
        idx = self.index(budget)
        return [Perm(row) for row in idx.unrank(np.arange(idx.order)).tolist()]

    def subgroup(self, gens, order=None, name=None):
        return PermGroup(gens, self.degree, order=order, name=name)

    def is_subgroup_of(self, other):
        return all(other.contains(g) for g in self.gens)


def random_element(G, rng):
    """Uniform random element: one uniform transversal element per level."""
    chain = G.chain
    g = chain._ident
    for lv in reversed(chain.levels):
        pts = list(lv.trans)
        u = lv.trans[pts[int(rng.integers(len(pts)))]] if hasattr(rng, "integers") \
            else lv.trans[rng.choice(pts)]
        g = g * u
    return g


def closure_order(gens, degree, limit=None):
    """Order of ``<gens>`` by brute-force closure (test oracle)."""
    ident = Perm.identity(degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if limit is not None and len(seen) > limit:
                        raise BudgetExceeded("closure exceeded limit")
        frontier = nxt
    return len(seen)


def is_generating(G, elems, check_membership=True, seed=0):
    """True iff ``<elems> = G``.

    Cheap certificates of non-generation come first: a different orbit
    partition, or a block system when ``G`` is primitive.  Generation is
    certified by a randomized chain reaching ``|G|``; otherwise a deterministic
    chain decides.
    """
    elems = list(elems)
    for e in elems:
        if len(e.img) != G.degree:
            raise DegreeMismatch("degrees differ")
    if check_membership:
        for e in elems:
            if not G.contains(e):
                raise ElementNotInGroup(str(e))
    order = G.order()
    elems = [e for e in elems if not e.is_identity()]
    if not elems:
        return order == 1
    if orbits(elems, G.degree) != G.orbits():
        return False
    for N in _normal_filters(G):
        if all(N.contains(e) for e in elems):
            return False
    chain = StabChain(G.degree)
    for e in elems:
        chain.add_element(e)
    if chain.order() == order:
        return True
    rng = random.Random(seed)
    step = _product_replacement(elems, rng)
    fails = 0
    budget = 12
    while fails < budget:
        if chain.add_element(step()):
            fails = 0
            if chain.order() == order:
                return True
        else:
            fails += 1
    if G.is_transitive() and G.is_primitive() and _imprimitive(elems, G.degree):
        return False
    if G._index is not None:
        # a proper subgroup has at most |G|/2 elements
        return G._index.closure_size(elems, order // 2) > order // 2
    chain.verify()
    return chain.order() == order


def _normal_filters(G):
    """Proper normal subgroups used as quick non-generation certificates:
    the attached inner group of an extension, else the derived subgroup."""
    filt = getattr(G, "_filters", None)
    if filt is None:
        inner = getattr(G, "inner", None)
        if inner is not None and inner.order() < G.order():
            filt = [inner]
        elif G.order() <= 10 ** 5:
            D = derived_subgroup(G)
            filt = [D] if D.order() < G.order() else []
        else:
            filt = []
        G._filters = filt
    return filt


def subgroup_order(gens, degree, seed=0):
    return schreier_sims(gens, degree, seed=seed).order()


def conj_orbit_with_stabilizer(G, x, check_membership=True, seed=0):
    """Conjugacy orbit size of ``x`` and its centralizer as a :class:`PermGroup`.

    The orbit is explored with a Schreier vector; centralizer generators are
    Schreier generators, added until ``|orbit| * |C| = |G|``.
    """
    if check_membership and not G.contains(x):
        raise ElementNotInGroup(str(x))
    gens = G.gens
    ginv = [g.inverse() for g in gens]
    keys = {x.img: 0}
    elems = [x]
    parent = [-1]
    via = [-1]
    k = 0
    while k < len(elems):
        y = elems[k]
        for gi, g in enumerate(gens):
            z = Perm(map(g.img.__getitem__, map(y.img.__getitem__, ginv[gi].img)))
            if z.img not in keys:
                keys[z.img] = len(elems)
                elems.append(z)
                parent.append(k)
                via.append(gi)
        k += 1
    size = len(elems)
    target = G.order() // size
    ident = Perm.identity(G.degree)

    def word(i):
        t = ident
        chainw = []
        while i > 0:
            chainw.append(via[i])
            i = parent[i]
        for gi in reversed(chainw):
            t = t * gens[gi]
        return t

    chain = StabChain(G.degree)
    cgens = []
    if target > 1:
        rng = random.Random(seed)
        order_list = [(i, gi) for i in range(size) for gi in range(len(gens))]
        if len(order_list) > 4096:
            picks = (order_list[rng.randrange(len(order_list))] for _ in iter(int, 1))
        else:
            rng.shuffle(order_list)
            picks = iter(order_list)
        # x centralizes itself; a useful first generator when it lies in G
        if not x.is_identity() and (check_membership or G.contains(x)):
            chain.add_element(x)
            cgens.append(x)
        for attempt, (i, gi) in enumerate(picks):
            if chain.order() == target:
                break
            if attempt > 50000:
                break
            t = word(i)
            j = keys[elems[i].__pow__(gens[gi]).img]
            h = t * gens[gi] * word(j).inverse()
            if chain.add_element(h):
                cgens.append(h)
        if chain.order() < target:
            # the sampled Schreier generators may not yet form a strong set
            chain.verify()
        if chain.order() != target:
            raise RuntimeError("centralizer construction did not reach the expected order")
    return size, PermGroup(cgens, G.degree, order=target)


def set_image(points, g):
    """Image of a point set (or a set of point sets) under ``g``."""
    out = []
    for p in points:
        out.append(g.img[p] if isinstance(p, int) else set_image(p, g))
    return frozenset(out)


def orbit_stabilizer(G, obj, act=set_image, seed=0, limit=10 ** 6):
    """Orbit of ``obj`` under ``act`` and its stabilizer in ``G``.

    ``act(obj, g)`` must be a right action on hashable objects.  The
    stabilizer is built from random Schreier generators, checked against
    ``|G| / |orbit|``.  Returns ``(orbit_list, stabilizer)``.
    """
    gens = G.gens
    pos = {obj: 0}
    orbit = [obj]
    parent, via = [-1], [-1]
    k = 0
    while k < len(orbit):
        for gi, g in enumerate(gens):
            y = act(orbit[k], g)
            if y not in pos:
                pos[y] = len(orbit)
                orbit.append(y)
                parent.append(k)
                via.append(gi)
                if len(orbit) > limit:
                    raise BudgetExceeded(f"orbit exceeds {limit}")
        k += 1
    ident = Perm.identity(G.degree)
    words = [ident] * len(orbit)
    for i in range(1, len(orbit)):
        words[i] = words[parent[i]] * gens[via[i]]
    target = G.order() // len(orbit)
    chain = StabChain(G.degree)
    sgens = []
    rng = random.Random(seed)
    fails = 0
    while chain.order() < target:
        i = rng.randrange(len(orbit))
        gi = rng.randrange(len(gens))
        j = pos[act(orbit[i], gens[gi])]
        h = words[i] * gens[gi] * words[j].inverse()
        # mixing in a random stabilizer element speeds up convergence
        if sgens:
            h = h * sgens[rng.randrange(len(sgens))]
        if chain.add_element(h):
            sgens.append(h)
            fails = 0
        else:
            fails += 1
            if fails > 200:
                chain.verify()
                fails = 0
    if chain.order() != target:
        raise RuntimeError("stabilizer order mismatch")
    S = PermGroup(sgens or [ident], G.degree, order=target)
    return orbit, S


def derived_subgroup(G):
    """Normal closure of the generator commutators."""
    n = G.degree
    gens = []
    chain = StabChain(n)
    for a in G.gens:
        for b in G.gens:
            c = commutator(a, b)
            if chain.add_element(c):
                gens.append(c)
    chain.verify()
    changed = True
    while changed:
        changed = False
        for h in list(gens):
            for g in G.gens:
                c = h ** g
                if not chain.contains(c):
                    chain.add_element(c)
                    chain.verify()
                    gens.append(c)
                    changed = True
    D = PermGroup(gens, n, order=chain.order())
    D._chain = chain
    return D


def normal_closure(G, elems):
    n = G.degree
    gens = []
    chain = StabChain(n)
    for e in elems:
        if chain.add_element(e):
            gens.append(e)
    chain.verify()
    changed = True
    while changed:
        changed = False
        for h in list(gens):
            for g in G.gens:
                c = h ** g
                if not chain.contains(c):
                    chain.add_element(c)
                    chain.verify()
                    gens.append(c)
                    changed = True
    N = PermGroup(gens, n, order=chain.order())
    N._chain = chain
    return N


# -- vectorized element index -----------------------------------------------

class ElementIndex:
    """Bijection ``range(|G|) <-> G`` driven by a stabilizer chain.

    An element is ``u_{k-1} * ... * u_1 * u_0`` with ``u_i`` the transversal
    element of level ``i`` at orbit position ``j_i``; its rank is
    ``sum(j_i * M_i)`` in mixed radix.  Rank 0 is the identity.
    """

    def __init__(self, chain):
        n = self.degree = chain.degree
        self.dtype = np.uint8 if n <= 256 else np.uint16
        self.base = np.array(chain.base, dtype=np.int64)
        sizes = [len(lv.trans) for lv in chain.levels]
        self.sizes = np.array(sizes, dtype=np.int64)
        k = len(sizes)
        width = max(sizes) if sizes else 1
        self.U = np.zeros((k, width, n), dtype=np.int32)
        self.Uinv = np.zeros((k, width, n), dtype=np.int32)
        self.pos = np.full((k, n), -1, dtype=np.int64)
        for i, lv in enumerate(chain.levels):
            pts = list(lv.trans)  # base point first (insertion order)
            U = np.array([lv.trans[p].img for p in pts], dtype=np.int32)
            self.U[i, :len(pts)] = U
            self.Uinv[i, :len(pts)] = np.argsort(U, axis=1)
            self.pos[i, pts] = np.arange(len(pts))
        radix = [1] * k
        for i in range(k - 2, -1, -1):
            radix[i] = radix[i + 1] * sizes[i + 1]
        self.radix = np.array(radix, dtype=np.int64)
        self.order = 1
        for s in sizes:
            self.order *= s

    def unrank(self, ranks):
        ranks = np.ascontiguousarray(ranks, dtype=np.int64)
        return _k.unrank_many(ranks, self.U, self.sizes, self.radix, self.degree)

    def rank(self, P, check=True):
        """Ranks of the rows of ``P``; -1 marks rows not in the group."""
        P = np.ascontiguousarray(P, dtype=np.int32)
        if P.ndim == 1:
            P = P[None, :]
        if len(self.sizes) == 0:
            ok = (P == np.arange(self.degree)).all(axis=1)
            return np.where(ok, 0, -1)
        return _k.rank_many(P, self.Uinv, self.pos, self.base, self.radix, check)

    def rank_perm(self, x):
        return int(self.rank(np.asarray(x.img)[None, :])[0])

    def perm(self, r):
        return Perm(self.unrank(np.array([r]))[0].tolist())

    def transform(self, ranks, left=None, right=None):
        """Ranks of ``left * x * right`` for ranks ``x`` (both in the group)."""
        n = self.degree
        L = np.arange(n, dtype=np.int32) if left is None else np.asarray(left.img, dtype=np.int32)
        R = np.arange(n, dtype=np.int32) if right is None else np.asarray(right.img, dtype=np.int32)
        ranks = np.ascontiguousarray(ranks, dtype=np.int64)
        if len(self.sizes) == 0:
            return np.zeros(len(ranks), dtype=np.int64)
        return _k.transform_ranks(ranks, L, R, self.U, self.Uinv, self.pos, self.base,
                                  self.sizes, self.radix)

    def conjugate_ranks(self, ranks, g):
        """Ranks of ``x ** g`` for the given ranks ``x``."""
        return self.transform(ranks, g.inverse(), g)

    def multiply_ranks(self, ranks, g, left=False):
        """Ranks of ``x * g`` (or ``g * x`` when ``left``)."""
        return self.transform(ranks, g, None) if left else self.transform(ranks, None, g)

    def closure_size(self, gens, limit=None):
        """Order of ``<gens>`` by compiled enumeration, capped past ``limit``."""
        Gm = np.array([g.img for g in gens], dtype=np.int32).reshape(len(gens), self.degree)
        if len(self.sizes) == 0:
            return 1
        lim = self.order if limit is None else limit
        return int(_k.closure_size(Gm, self.U, self.Uinv, self.pos, self.base, self.sizes,
                                   self.radix, self.order, lim))

    def product(self, ra, rb):
        """Ranks of ``a * b`` for paired rank arrays."""
        ra = np.ascontiguousarray(ra, dtype=np.int64)
        rb = np.ascontiguousarray(rb, dtype=np.int64)
        if len(self.sizes) == 0:
            return np.zeros(len(ra), dtype=np.int64)
        return _k.product_ranks(ra, rb, self.U, self.Uinv, self.pos, self.base,
                                self.sizes, self.radix, self.degree)
