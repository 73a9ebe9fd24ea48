"""Constructors for classical groups, their semilinear extensions, the small
atlas groups around A6, and the special elements A, B, C, D used to pick a
good conjugacy class in an outer coset.

Matrix conventions: row vectors, ``v -> v @ A``.  The standard symplectic
basis is ordered ``e1, f1, e2, f2, ...`` with ``(e_i, f_i) = 1``.  A
semilinear map ``(A, i)`` acts as ``v -> (v @ A)^(p^i)`` (entrywise Frobenius
after the linear part), so ``(A, i)(B, j) = (A @ B^(p^-i), i + j)``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd, lcm

import numpy as np

from . import linalg as la
from .ffield import (FieldError, make_field, prime_factors, ppd, restrict,
                     subfield_embedding)
from .linalg import MatF
from .permcore import (BudgetExceeded, ElementNotInGroup, Perm, PermGroup,
                       derived_subgroup, is_generating)


class FormMismatch(ValueError):
    pass


class NotASimilarity(ValueError):
    pass


class DomainNotStable(ValueError):
    pass


class NotNormalizing(ValueError):
    pass


class EvenCharacteristic(ValueError):
    pass


class UnsupportedCase(ValueError):
    pass


# -- forms --------------------------------------------------------------------

@dataclass
class FormSpec:
    """A formed space: ``kind`` is symplectic, symmetric-bilinear or quadratic.

    ``gram`` is the bilinear form (the polarization for quadratic forms) and
    ``quad`` the upper-triangular coefficient table with
    ``Q(v) = sum_{i <= j} quad[i, j] v_i v_j``.
    """

    kind: str
    F: object
    dim: int
    gram: np.ndarray
    quad: np.ndarray | None = None

    def bilinear(self, u, v):
        return la.fdot(self.F, la.fmatmul(self.F, np.asarray(u)[None, :], self.gram)[0], v)

    def Q(self, v):
        if self.quad is None:
            raise FormMismatch("form has no quadratic part")
        F = self.F
        acc = 0
        for i in range(self.dim):
            if not v[i]:
                continue
            for j in range(i, self.dim):
                c = int(self.quad[i, j])
                if c and v[j]:
                    acc = F.add(acc, F.mul(c, F.mul(int(v[i]), int(v[j]))))
        return acc

    def Q_rows(self, V):
        """Vectorized ``Q`` on the rows of ``V``."""
        add, mul, _, _ = self.F.tables()
        V = np.asarray(V, dtype=np.int64)
        acc = np.zeros(len(V), dtype=np.int64)
        for i in range(self.dim):
            for j in range(i, self.dim):
                c = int(self.quad[i, j])
                if c:
                    acc = add[acc, mul[c, mul[V[:, i], V[:, j]]]]
        return acc

    def polarization(self):
        """Gram matrix of ``B(u, v) = Q(u+v) - Q(u) - Q(v)``."""
        add = self.F.tables()[0]
        Qm = self.quad
        return add[Qm, Qm.T]


def standard_symplectic_form(m, F):
    if m < 1:
        raise ValueError("m must be positive")
    n = 2 * m
    J = np.zeros((n, n), dtype=np.int64)
    minus_one = F.neg(1)
    for i in range(m):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = minus_one
    return FormSpec("symplectic", F, n, J)


def standard_orthogonal_form(m, F):
    """Q = sum x_{e_i} x_{f_i} + x_0^2 on F^(2m+1) (last coordinate x_0), q odd."""
    if F.p == 2:
        raise FormMismatch("odd-dimensional orthogonal groups need odd q here")
    n = 2 * m + 1
    Qm = np.zeros((n, n), dtype=np.int64)
    for i in range(m):
        Qm[2 * i, 2 * i + 1] = 1
    Qm[n - 1, n - 1] = 1
    form = FormSpec("quadratic", F, n, None, Qm)
    form.gram = form.polarization()
    return form


def preserves_form(A, form, tau=1):
    F = form.F
    lhs = la.fmatmul(F, la.fmatmul(F, A.a, form.gram), A.a.T)
    rhs = F.tables()[1][tau][form.gram]
    if not np.array_equal(lhs, rhs):
        return False
    if form.kind == "quadratic":
        I = np.eye(form.dim, dtype=np.int64)
        images = la.fmatmul(F, I, A.a)
        # Q is determined by its values on basis vectors and the polarization
        if not np.array_equal(form.Q_rows(images), F.tables()[1][tau][form.Q_rows(I)]):
            return False
    return True


def similarity_tau(g, form):
    """The scalar ``tau`` with ``(ug, vg) = tau (u, v)``; raises if none."""
    F = form.F
    lhs = la.fmatmul(F, la.fmatmul(F, g.a, form.gram), g.a.T)
    nz = np.argwhere(form.gram != 0)
    if len(nz) == 0:
        raise FormMismatch("zero form")
    i, j = nz[0]
    tau = F.mul(int(lhs[i, j]), F.inv(int(form.gram[i, j])))
    if tau == 0 or not np.array_equal(lhs, F.tables()[1][tau][form.gram]):
        raise NotASimilarity("matrix does not rescale the form")
    return F.elem(tau)


# -- semilinear maps ---------------------------------------------------------

class SemilinearMap:
    """``(A, i)``: ``v -> (v @ A)^(p^i)``."""

    __slots__ = ("A", "i")

    def __init__(self, A, i=0):
        self.A = A
        self.i = i % A.F.f

    @property
    def F(self):
        return self.A.F

    def __mul__(self, other):
        B = other.A.frob(-self.i)
        return SemilinearMap(self.A * B, self.i + other.i)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = SemilinearMap(MatF.identity(self.F, self.A.n), 0)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self):
        # (A, i)^-1 = ((A^-1)^(p^i), -i)
        return SemilinearMap(self.A.inverse().frob(self.i), -self.i)

    def apply(self, V):
        W = la.fmatmul(self.F, V, self.A.a)
        if self.i:
            W = la.frob_table(self.F, self.i)[W]
        return W

    def __eq__(self, other):
        return isinstance(other, SemilinearMap) and self.i == other.i and self.A == other.A

    def __hash__(self):
        return hash((self.A, self.i))

    def __repr__(self):
        return f"SemilinearMap({self.A.a.tolist()}, {self.i})"


# -- permutation action --------------------------------------------------------

class MatrixAction:
    """Action of (semi)linear maps on nonzero vectors or projective points.

    Projective points are represented by the vector whose first nonzero
    coordinate is 1.  Domain order is by integer encoding of the vector.
    """

    def __init__(self, F, n, projective):
        self.F = F
        self.n = n
        self.projective = projective
        q = F.q
        codes = np.arange(1, q ** n)
        V = np.stack([(codes // q ** k) % q for k in range(n)], axis=1)
        if projective:
            first = V[np.arange(len(V)), (V != 0).argmax(axis=1)]
            V = V[first == 1]
        self.vectors = V.astype(np.int64)
        self.weights = q ** np.arange(n)
        self.lookup = np.full(q ** n, -1, dtype=np.int64)
        self.lookup[self.vectors @ self.weights] = np.arange(len(self.vectors))
        self.degree = len(self.vectors)

    def normalize(self, W):
        if not self.projective:
            return W
        inv = self.F.tables()[3]
        mul = self.F.tables()[1]
        lead = W[np.arange(len(W)), (W != 0).argmax(axis=1)]
        return mul[inv[lead][:, None], W]

    def index_of(self, W):
        W = self.normalize(np.asarray(W, dtype=np.int64).reshape(-1, self.n))
        idx = self.lookup[W @ self.weights]
        if (idx < 0).any():
            raise DomainNotStable("image left the domain")
        return idx

    def perm_of(self, g):
        """Permutation induced by a MatF or SemilinearMap."""
        if isinstance(g, MatF):
            g = SemilinearMap(g, 0)
        W = g.apply(self.vectors)
        if (W == 0).all(axis=1).any():
            raise DomainNotStable("map is singular")
        return Perm(self.index_of(W).tolist())

    def lift(self, perm):
        """Recover a semilinear map inducing ``perm`` (up to scalars when
        projective).  Raises ValueError if none exists."""
        F, n = self.F, self.n
        E = np.eye(n, dtype=np.int64)
        rows = self.vectors[[perm[int(j)] for j in self.index_of(E)]]
        allone = self.vectors[perm[int(self.index_of(np.ones(n, dtype=np.int64))[0])]]
        for i in range(F.f):
            unf = la.frob_table(F, -i)
            Wp = unf[rows]
            try:
                if self.projective:
                    d = la.solve_left(F, Wp, unf[allone])
                    if (d == 0).any():
                        continue
                    A = F.tables()[1][d[:, None], Wp]
                else:
                    A = Wp
                    la.inverse(F, A)
            except la.SingularMatrix:
                continue
            cand = SemilinearMap(MatF(F, A), i)
            if self.perm_of(cand) == perm:
                return cand
        raise ValueError("permutation is not induced by a semilinear map")


# -- group specs -----------------------------------------------------------------

def sp_order(m, q):
    o = q ** (m * m)
    for i in range(1, m + 1):
        o *= q ** (2 * i) - 1
    return o


def so_odd_order(m, q):
    return sp_order(m, q)


@dataclass
class GroupSpec:
    """Which classical group to build.

    ``family`` is one of Sp, GSp, SO, Omega (the projective image is taken
    automatically on the projective domain); ``auto`` is "", "phi",
    "delta" or "deltaphi", optionally with a Frobenius power ``frob``.
    """

    family: str
    m: int
    F: object
    auto: str = ""
    frob: int = 1
    domain: str = "auto"

    @property
    def dim(self):
        return 2 * self.m if self.family in ("Sp", "GSp") else 2 * self.m + 1

    def projective(self):
        if self.domain == "auto":
            # symplectic groups act faithfully on points; orthogonal groups in
            # odd dimension have trivial centre and use vectors
            return self.family in ("Sp", "GSp")
        return self.domain in ("points", "projective")

    def image_order(self):
        q = self.F.q
        m = self.m
        base = sp_order(m, q)
        if self.family == "Sp":
            return base // gcd(2, q - 1) if self.projective() else base
        if self.family == "GSp":
            return base if self.projective() else base * (q - 1)
        if self.family == "SO":
            return base
        if self.family == "Omega":
            return base // 2
        raise ValueError(f"unknown family {self.family}")


def _transvection(F, J, v, lam):
    n = len(v)
    add, mul, _, _ = F.tables()
    Jv = la.fmatmul(F, J, np.asarray(v)[:, None])[:, 0]
    A = np.eye(n, dtype=np.int64)
    for j in range(n):
        c = mul[lam, Jv[j]]
        if c:
            A[j] = add[A[j], mul[c, v]]
    return MatF(F, A)


def symplectic_generators(m, F):
    """Transvections along e_i, f_i, e_i+e_{i+1}, e_i+f_{i+1} with lambda in {1, zeta}."""
    form = standard_symplectic_form(m, F)
    n = 2 * m
    lams = [1] if F.q == 2 else [1, F.zeta]
    vecs = []
    for i in range(m):
        e = np.zeros(n, dtype=np.int64)
        e[2 * i] = 1
        f = np.zeros(n, dtype=np.int64)
        f[2 * i + 1] = 1
        vecs += [e, f]
        if i + 1 < m:
            ee = e.copy()
            ee[2 * i + 2] = 1
            ef = e.copy()
            ef[2 * i + 3] = 1
            vecs += [ee, ef]
    return [_transvection(F, form.gram, v, lam) for v in vecs for lam in lams]


def delta_matrix(m, F):
    """diag(zeta, 1, zeta, 1, ...): similarity with tau = zeta."""
    d = np.zeros(2 * m, dtype=np.int64)
    d[0::2] = F.zeta
    d[1::2] = 1
    return MatF(F, np.diag(d))


def reflection(form, v):
    F = form.F
    add, mul, neg, inv = F.tables()
    Qv = form.Q(v)
    if Qv == 0:
        raise FormMismatch("reflection in a singular vector")
    Bv = la.fmatmul(F, form.gram, np.asarray(v)[:, None])[:, 0]
    A = np.eye(form.dim, dtype=np.int64)
    c = inv[Qv]
    for j in range(form.dim):
        s = mul[c, Bv[j]]
        if s:
            A[j] = add[A[j], mul[neg[s], v]]
    return MatF(F, A)


def orthogonal_generators(m, F, action, target):
    """Pairs of reflections r_{x0} r_w generating SO_{2m+1}(q)."""
    form = standard_orthogonal_form(m, F)
    n = form.dim
    x0 = np.zeros(n, dtype=np.int64)
    x0[-1] = 1
    r0 = reflection(form, x0)
    V = action.vectors
    Qs = form.Q_rows(V)
    cands = [V[k] for k in np.flatnonzero(Qs)]
    rng = random.Random(1)
    rng.shuffle(cands)
    gens, perms = [], []
    for w in cands:
        g = r0 * reflection(form, w)
        if g.is_identity():
            continue
        gens.append(g)
        perms.append(action.perm_of(g))
        if len(gens) >= 2 and PermGroup(perms, action.degree).order() == target:
            return gens, perms
        if len(gens) > 12:
            gens.pop(0)
            perms.pop(0)
    raise RuntimeError("failed to generate SO")


def _compact(G, seed=0, tries=200):
    """A two-element generating set for ``G`` if one turns up quickly."""
    if len(G.gens) <= 2:
        return G.gens
    rng = random.Random(seed)
    npr = np.random.default_rng(seed)
    for _ in range(tries):
        a = G.random_element(npr)
        b = G.random_element(npr)
        if is_generating(G, [a, b], check_membership=False, seed=rng.randrange(1 << 30)):
            return [a, b]
    return G.gens


def _finish(perms, degree, order, name, compact=True):
    G = PermGroup(perms, degree, order=order, name=name)
    G.order()
    if compact and order > 1000:
        small = _compact(G)
        if small is not G.gens:
            H = PermGroup(small, degree, order=order, name=name)
            H.order()
            return H
    return G


def classical_group(spec, budget=None):
    """Permutation image of ``spec`` (including its outer automorphism part)."""
    F = spec.F
    if spec.F.q > 512:
        raise BudgetExceeded("matrix groups need q <= 512")
    action = MatrixAction(F, spec.dim, spec.projective())
    if budget is not None and action.degree > budget:
        raise BudgetExceeded(f"degree {action.degree} exceeds budget")
    target = spec.image_order()
    if spec.family in ("Sp", "GSp"):
        form = standard_symplectic_form(spec.m, F)
        mats = symplectic_generators(spec.m, F)
        if spec.family == "GSp":
            mats.append(delta_matrix(spec.m, F))
        for A in mats:
            if not preserves_form(A, form, int(similarity_tau(A, form))):
                raise FormMismatch("generator does not preserve the form")
        perms = [action.perm_of(A) for A in mats]
        base = PermGroup(perms, action.degree)
        if base.order() != target:
            raise RuntimeError(f"generated order {base.order()} != {target}")
        smats = [SemilinearMap(A) for A in mats]
    else:
        if F.p == 2:
            raise FormMismatch("SO in odd dimension needs odd q")
        form = standard_orthogonal_form(spec.m, F)
        so_target = so_odd_order(spec.m, F.q)
        mats, perms = orthogonal_generators(spec.m, F, action, so_target)
        for A in mats:
            if not preserves_form(A, form) or A.det() != 1:
                raise FormMismatch("generator is not in SO")
        smats = [SemilinearMap(A) for A in mats]
        base = PermGroup(perms, action.degree, order=so_target)
        if spec.family == "Omega":
            D = derived_subgroup(base)
            if so_target // D.order() != 2:
                raise RuntimeError("derived subgroup of SO does not have index 2")
            perms = D.gens
            smats = [action.lift(p) for p in perms]
            base = D
    name = _spec_name(spec)
    theta = None
    if spec.auto:
        theta = automorphism(spec, form)
        T = base
        ext = semilinear_extension(T, theta, action)
        perms = list(T.gens) + [action.perm_of(theta)]
        smats = smats + [theta]
        target = ext.order()
    G = _finish(perms, action.degree, target, name)
    G.spec = spec
    G.action = action
    G.form = form
    G.matrix_gens = smats
    G.theta = theta
    if theta is not None:
        inner = GroupSpec(spec.family, spec.m, spec.F, "", 1, spec.domain)
        G.inner = _finish(base.gens, action.degree, base.order(), _spec_name(inner))
        G.inner.action = action
        G.inner.form = form
        G.theta_perm = action.perm_of(theta)
    else:
        G.inner = G
        G.theta_perm = None
    return G


def automorphism(spec, form):
    """The semilinear map named by ``spec.auto``."""
    F = spec.F
    n = spec.dim
    kind = spec.auto
    i = spec.frob if "phi" in kind else 0
    if "phi" in kind and F.f == 1:
        raise UnsupportedCase("field automorphism is trivial over a prime field")
    A = MatF.identity(F, n)
    if "delta" in kind:
        if spec.family in ("Sp", "GSp"):
            A = delta_matrix(spec.m, F)
        else:
            A = so_minus_omega_element(spec.m, F)
    return SemilinearMap(A, i)


def so_minus_omega_element(m, F, seed=0):
    """An element of SO_{2m+1}(q) outside Omega (found by seeded search)."""
    spec = GroupSpec("Omega", m, F)
    action = MatrixAction(F, spec.dim, spec.projective())
    form = standard_orthogonal_form(m, F)
    om = _omega_cache(m, F)
    rng = random.Random(seed)
    V = action.vectors
    Qs = form.Q_rows(V)
    nons = [V[k] for k in np.flatnonzero(Qs)]
    for _ in range(1000):
        v, w = rng.choice(nons), rng.choice(nons)
        g = reflection(form, v) * reflection(form, w)
        if not om.contains(action.perm_of(g)):
            return g
    raise RuntimeError("no element of SO outside Omega found")


@lru_cache(maxsize=None)
def _omega_cache(m, F):
    return classical_group(GroupSpec("Omega", m, F))


def semilinear_extension(T, theta, action=None):
    """``<T, theta>`` as a permutation group on ``T``'s domain."""
    action = action or T.action
    t = action.perm_of(theta)
    for g in T.gens:
        if not T.contains(g ** t):
            raise NotNormalizing("theta does not normalize T")
    k = 1
    x = t
    while not T.contains(x):
        x = x * t
        k += 1
    G = PermGroup(list(T.gens) + [t], T.degree, order=T.order() * k)
    G.order()
    return G


_SPEC_RE = re.compile(r"^(P?)(Sp|GSp|SO|Omega|O)(\d+)\((\d+)\)(?::(\w+?)(?:\^(\d+))?)?$")


def parse_spec(text):
    """Parse names such as ``Sp4(4):phi``, ``PSp4(3):delta`` or ``Omega5(3)``."""
    mt = _SPEC_RE.match(text.replace(" ", ""))
    if not mt:
        raise ValueError(f"unrecognised group name {text!r}")
    proj, fam, n, q, auto, power = mt.groups()
    n, q = int(n), int(q)
    p = prime_factors(q)
    if len(p) != 1:
        raise ValueError(f"{q} is not a prime power")
    p = p[0]
    f = 0
    while p ** f < q:
        f += 1
    F = make_field(p, f)
    if fam == "O":
        fam = "Omega"
    if fam in ("Sp", "GSp"):
        if n % 2:
            raise ValueError("symplectic dimension must be even")
        m = n // 2
    else:
        if n % 2 == 0:
            raise ValueError("only odd-dimensional orthogonal groups are supported")
        m = (n - 1) // 2
    auto = (auto or "").lower()
    if auto not in ("", "phi", "delta", "deltaphi"):
        raise ValueError(f"unknown automorphism {auto!r}")
    return GroupSpec(fam, m, F, auto, int(power) if power else 1)


def _spec_name(spec):
    q = spec.F.q
    base = f"{spec.family}{spec.dim}({q})"
    if spec.auto:
        base += ":" + spec.auto + (f"^{spec.frob}" if spec.frob != 1 else "")
    return base


@lru_cache(maxsize=None)
def zoo_group(text):
    """Build (and cache) the group named ``text``."""
    return classical_group(parse_spec(text))


# -- atlas groups ------------------------------------------------------------

def _pgaml29_generators():
    F = make_field(3, 2)
    inf = 9

    def mk(fn):
        img = [fn(z) for z in range(9)] + [None]
        return img

    add1 = [F.add(z, 1) for z in range(9)] + [inf]
    scal = [F.mul(F.zeta, z) for z in range(9)] + [inf]
    invz = [inf if z == 0 else F.inv(z) for z in range(9)] + [0]
    frob = [F.pow(z, 3) if z else 0 for z in range(9)] + [inf]
    return [Perm(add1), Perm(scal), Perm(invz), Perm(frob)], F


@lru_cache(maxsize=None)
def atlas_group(name):
    """A5 (on 5 points) and the groups between A6 and PGammaL2(9) (on 10 points)."""
    key = name.replace("_", "").replace("(", "").replace(")", "").upper()
    if key == "A5":
        G = PermGroup([Perm.from_cycles("(0 1 2 3 4)", 5), Perm.from_cycles("(0 1 2)", 5)],
                      order=60, name="A5")
        return G
    gens, F = _pgaml29_generators()
    full = PermGroup(gens, 10, order=1440, name="PGammaL29")
    if key == "PGAMMAL29":
        return full
    A6 = derived_subgroup(full)
    if A6.order() != 360:
        raise RuntimeError("derived subgroup of PGammaL2(9) is not of order 360")
    A6.name = "A6"
    if key == "A6":
        return A6
    labels = label_a6_overgroups(full, A6, gens)
    if key in labels:
        return labels[key]
    raise ValueError(f"unknown atlas group {name!r}")


def element_order_census(G):
    idx = G.index()
    orders = {}
    for row in idx.unrank(np.arange(idx.order)).tolist():
        o = Perm(row).order()
        orders[o] = orders.get(o, 0) + 1
    return dict(sorted(orders.items()))


def label_a6_overgroups(full, A6, gens):
    """Identify S6, PGL2(9) and M10 among the index-2 overgroups of A6."""
    add1, scal, invz, frob = gens
    outs = [scal, frob, scal * frob]
    found = {}
    for x in outs:
        H = PermGroup(list(A6.gens) + [x], 10, order=720)
        census = element_order_census(H)
        maxo = max(census)
        if 10 in census:
            label = "PGL29"
        elif maxo == 6:
            label = "S6"
        else:
            label = "M10"
        if label in found:
            raise RuntimeError("overgroup labels are not distinct")
        H.name = label
        H.census = census
        found[label] = H
    if set(found) != {"PGL29", "S6", "M10"}:
        raise RuntimeError("overgroup census failed")
    return found


ATLAS_NAMES = ("A5", "A6", "S6", "PGL29", "M10", "PGammaL29")


# -- special elements --------------------------------------------------------

class _ExtensionModel:
    """GF(q0^(2d)) viewed as a 2d-dimensional space over F0 with basis
    ``1, z, ..., z^(2d-1)`` for the fixed primitive element z."""

    def __init__(self, d, F0, total=None):
        self.d = d
        self.F0 = F0
        self.dim = total or 2 * d
        self.K = make_field(F0.p, F0.f * self.dim)
        K = self.K
        self.emb = subfield_embedding(K, F0)
        self.basis = [K.pow(K.zeta, j) for j in range(self.dim)]
        coords = {}
        for tup in product(range(F0.q), repeat=self.dim):
            acc = 0
            for c, b in zip(tup, self.basis):
                if c:
                    acc = K.add(acc, K.mul(int(self.emb[c]), b))
            coords[acc] = tup
        if len(coords) != K.q:
            raise RuntimeError("powers of the primitive element are not a basis")
        self.coords = coords
        self._restrict = {int(b): s for s, b in enumerate(self.emb)}

    def to_f0(self, x):
        return self._restrict[x]

    def mult_matrix(self, w):
        K = self.K
        rows = [self.coords[K.mul(b, w)] for b in self.basis]
        return np.array(rows, dtype=np.int64)

    def trace(self, x):
        K = self.K
        acc, y = 0, x
        for _ in range(self.dim):
            acc = K.add(acc, y)
            y = K.pow(y, self.F0.q) if y else 0
        return self.to_f0(acc)

    def hermitian_gram(self):
        """Gram matrix of (x, y) = Tr(lam * x * y^(q0^d)), alternating."""
        K, F0, d = self.K, self.F0, self.d
        if F0.p == 2:
            lam = 1
        else:
            lam = K.pow(K.zeta, (F0.q ** d + 1) // 2)
        e = F0.q ** d
        n = self.dim
        G = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                y = self.basis[b]
                G[a, b] = self.trace(K.mul(lam, K.mul(self.basis[a], K.pow(y, e))))
        return G

    def norm_quadratic(self):
        """Upper-triangular table of Q(x) = Tr_{q0^d/q0}(x^(q0^d + 1)) (minus type)."""
        K, F0, d = self.K, self.F0, self.d
        e = F0.q ** d

        def Q(x):
            if x == 0:
                return 0
            nrm = K.pow(x, e + 1)
            acc, y = 0, nrm
            for _ in range(d):
                acc = K.add(acc, y)
                y = K.pow(y, F0.q)
            return self.to_f0(acc)

        n = self.dim
        Qm = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            Qm[a, a] = Q(self.basis[a])
            for b in range(a + 1, n):
                s = K.add(self.basis[a], self.basis[b])
                val = F0.sub(F0.sub(Q(s), Q(self.basis[a])), Q(self.basis[b]))
                Qm[a, b] = val
        return Qm

    def norm_one_generator(self):
        K, e = self.K, self.F0.q ** self.d
        return K.pow(K.zeta, e - 1)


def symplectic_basis(F, gram):
    """Rows P with P @ gram @ P^T equal to the standard interleaved form."""
    n = gram.shape[0]
    add, mul, neg, inv = F.tables()

    def form(u, v):
        return la.fdot(F, la.fmatmul(F, u[None, :], gram)[0], v)

    pool = [row.copy() for row in np.eye(n, dtype=np.int64)]
    basis = []
    while pool:
        e = pool.pop(0)
        if not e.any():
            continue
        k = next((k for k, v in enumerate(pool) if form(e, v)), None)
        if k is None:
            raise FormMismatch("form is degenerate")
        f = pool.pop(k)
        f = mul[inv[form(e, f)], f]
        basis += [e, f]
        new = []
        for v in pool:
            a, b = form(v, f), form(v, e)
            v = add[v, mul[neg[a], e]]
            v = add[v, mul[b, f]]
            new.append(v)
        pool = new
    return np.array(basis, dtype=np.int64)


def _to_standard(F, gram, mats):
    P = symplectic_basis(F, gram)
    Pinv = la.inverse(F, P)
    std = standard_symplectic_form(gram.shape[0] // 2, F).gram
    check = la.fmatmul(F, la.fmatmul(F, P, gram), P.T)
    if not np.array_equal(check, std):
        raise FormMismatch("basis change did not produce the standard form")
    return [la.fmatmul(F, la.fmatmul(F, P, M), Pinv) for M in mats]


@lru_cache(maxsize=None)
def _model(d, F0):
    return _ExtensionModel(d, F0)


def element_A(d, F0):
    """Generator of a cyclic GU_1(q0^d) inside Sp_2d(q0) (order q0^d + 1)."""
    if d < 1:
        raise ValueError("d must be positive")
    M = _model(d, F0)
    w = M.norm_one_generator()
    gram = M.hermitian_gram()
    A = M.mult_matrix(w)
    (A_std,) = _to_standard(F0, gram, [A])
    out = MatF(F0, A_std, standard_symplectic_form(d, F0))
    if not preserves_form(out, out.form):
        raise FormMismatch("A does not preserve the symplectic form")
    if out.order() != F0.q ** d + 1:
        raise RuntimeError("A has the wrong order")
    return out


def element_C(d, F0):
    """C in GSp_2d(q0) with C^(q0-1) = A and tau(C) = zeta (q0 odd)."""
    if F0.p == 2:
        raise EvenCharacteristic("C is only defined for odd q0")
    M = _model(d, F0)
    K = M.K
    w = M.norm_one_generator()
    zeta0 = int(M.emb[F0.zeta])
    e = F0.q ** d
    mu = None
    for k in range(K.q - 1):
        x = K.pow(K.zeta, k)
        if K.pow(x, F0.q - 1) == w and K.pow(x, e + 1) == zeta0:
            mu = x
            break
    if mu is None:
        raise RuntimeError("no suitable multiplier found")
    gram = M.hermitian_gram()
    C_std, = _to_standard(F0, gram, [M.mult_matrix(mu)])
    out = MatF(F0, C_std, standard_symplectic_form(d, F0))
    if int(similarity_tau(out, out.form)) != F0.zeta:
        raise RuntimeError("C has the wrong similarity factor")
    return out


def primitive_min_poly(d, F0):
    """Minimal polynomial over F0 of the primitive element of GF(q0^d)."""
    L = make_field(F0.p, F0.f * d)
    poly = [1]
    z = L.zeta
    for i in range(d):
        root = L.pow(z, F0.q ** i)
        poly = la.pmul(L, poly, [L.neg(root), 1])
    table = {int(b): s for s, b in enumerate(subfield_embedding(L, F0))}
    return [table[c] for c in poly]


def companion(F, poly):
    """Companion matrix on row vectors: e_i -> e_{i+1}, e_{d-1} -> -sum c_k e_k."""
    d = len(poly) - 1
    C = np.zeros((d, d), dtype=np.int64)
    for i in range(d - 1):
        C[i, i + 1] = 1
    for k in range(d):
        C[d - 1, k] = F.neg(poly[k])
    return C


def _interleave(F, M):
    n = M.shape[0]
    d = n // 2
    order = [x for i in range(d) for x in (i, d + i)]
    return M[np.ix_(order, order)]


def _b_block(d, F0):
    return companion(F0, primitive_min_poly(d, F0))


def element_B(d, F0):
    """[B, B^-T] with B the companion matrix of a primitive polynomial."""
    if d < 1:
        raise ValueError("d must be positive")
    B = _b_block(d, F0)
    BinvT = la.inverse(F0, B).T
    blk = la.block_diag(F0, B, BinvT).a
    out = MatF(F0, _interleave(F0, blk), standard_symplectic_form(d, F0))
    if not preserves_form(out, out.form):
        raise FormMismatch("B block does not preserve the form")
    return out


def element_D(d, F0):
    """[zeta B, B^-T]: similarity with tau = zeta."""
    B = _b_block(d, F0)
    mul = F0.tables()[1]
    zB = mul[F0.zeta][B]
    BinvT = la.inverse(F0, B).T
    blk = la.block_diag(F0, zB, BinvT).a
    out = MatF(F0, _interleave(F0, blk), standard_symplectic_form(d, F0))
    if int(similarity_tau(out, out.form)) != F0.zeta:
        raise RuntimeError("D has the wrong similarity factor")
    return out


def orthogonal_A(d, F0):
    """A_2d in SO^-_2d(q0) for the norm form; returns (matrix, quad table)."""
    M = _model(d, F0)
    Qm = M.norm_quadratic()
    A = MatF(F0, M.mult_matrix(M.norm_one_generator()))
    form = FormSpec("quadratic", F0, 2 * d, None, Qm)
    form.gram = form.polarization()
    A.form = form
    if not preserves_form(A, form):
        raise FormMismatch("A does not preserve the norm form")
    return A


def orthogonal_B(d, F0):
    """B_2d in SO^+_2d(q0) for Q(w1 + w2) = w1 . w2 on W1 + W2."""
    B = _b_block(d, F0)
    BinvT = la.inverse(F0, B).T
    A = la.block_diag(F0, B, BinvT)
    Qm = np.zeros((2 * d, 2 * d), dtype=np.int64)
    for i in range(d):
        Qm[i, d + i] = 1
    form = FormSpec("quadratic", F0, 2 * d, None, Qm)
    form.gram = form.polarization()
    A.form = form
    if not preserves_form(A, form):
        raise FormMismatch("B does not preserve the hyperbolic form")
    return A


def _direct_sum_form(F, forms):
    n = sum(f.dim for f in forms)
    Qm = np.zeros((n, n), dtype=np.int64)
    k = 0
    for f in forms:
        Qm[k:k + f.dim, k:k + f.dim] = f.quad
        k += f.dim
    form = FormSpec("quadratic", F, n, None, Qm)
    form.gram = form.polarization()
    return form


def witness_element(case, m, F0, theta_kind="field"):
    """The element y for the chosen case, with its predicted order attached.

    Returns a MatF whose ``form`` attribute is the formed space it preserves
    (up to similarity); ``predicted_order`` comes from the element orders.
    """
    q0 = F0.q
    odd = F0.p != 2
    if theta_kind not in ("field", "diag-field", "graph-field"):
        raise UnsupportedCase(theta_kind)
    if case == "S":
        if m < 3:
            raise UnsupportedCase("case S needs m >= 3")
        d = m - 1
        if theta_kind == "field":
            if m % 2:
                blocks = [element_A(1, F0), element_A(d, F0)]
                pred = lcm(q0 + 1, q0 ** d + 1)
            else:
                blocks = [element_A(1, F0), element_B(d, F0)]
                pred = lcm(q0 + 1, q0 ** d - 1)
        elif theta_kind == "diag-field":
            if not odd:
                raise UnsupportedCase("diagonal automorphisms need odd q")
            if m % 2:
                blocks = [element_C(1, F0), element_C(d, F0)]
                pred = lcm((q0 - 1) * (q0 + 1), (q0 - 1) * (q0 ** d + 1))
            else:
                blocks = [element_C(1, F0), element_D(d, F0)]
                pred = None
        else:
            raise UnsupportedCase("graph-field automorphisms only occur in case S4")
        y = la.block_diag(F0, *blocks)
        y.form = standard_symplectic_form(m, F0)
    elif case == "S4":
        if m != 2:
            raise UnsupportedCase("case S4 has m = 2")
        if theta_kind == "field":
            y = element_A(2, F0)
            pred = q0 ** 2 + 1
        elif theta_kind == "diag-field":
            if not odd:
                raise UnsupportedCase("diagonal automorphisms need odd q")
            y = element_C(2, F0)
            pred = (q0 - 1) * (q0 ** 2 + 1)
        else:
            if odd or F0.f % 2 == 0:
                raise UnsupportedCase("graph-field automorphisms need q0 an odd power of 2")
            A = element_A(2, F0)
            r = ppd(q0, 4)
            ell = (q0 ** 2 + 1) // r
            y = A ** ell
            y.form = A.form
            pred = r
    elif case == "O":
        if not odd:
            raise UnsupportedCase("case O needs odd q")
        if m < 2:
            raise UnsupportedCase("case O needs m >= 2")
        d = m - 1
        a2 = orthogonal_A(1, F0)
        x = orthogonal_A(d, F0) if m % 2 else orthogonal_B(d, F0)
        one = MatF(F0, [[1]])
        one_form = FormSpec("quadratic", F0, 1, None, np.array([[1]], dtype=np.int64))
        one_form.gram = one_form.polarization()
        form = _direct_sum_form(F0, [a2.form, x.form, one_form])
        y = la.block_diag(F0, a2, x, one)
        pred = lcm(q0 + 1, q0 ** d + 1 if m % 2 else q0 ** d - 1)
        if theta_kind == "field":
            y = y ** 2
            pred = pred // gcd(pred, 2)
        elif theta_kind != "diag-field":
            raise UnsupportedCase("case O has no graph-field automorphism")
        y.form = form
    else:
        raise UnsupportedCase(f"unknown case {case!r}")
    y.predicted_order = pred
    return y


def is_irreducible_action(A):
    """No proper nonzero invariant subspace (exhaustive over cyclic subspaces)."""
    F = A.F
    n = A.n
    codes = np.arange(1, F.q ** n)
    V = np.stack([(codes // F.q ** k) % F.q for k in range(n)], axis=1)
    for v in V:
        rows = [v]
        for _ in range(n - 1):
            rows.append(la.fmatmul(F, rows[-1][None, :], A.a)[0])
        if la.rank(F, np.array(rows)) < n:
            return False
    return True


def matrix_centralizer_order(A, group, action):
    """|C_group(A)| via the conjugation orbit of A's permutation image."""
    from .permcore import conj_orbit_with_stabilizer

    x = action.perm_of(A)
    size, C = conj_orbit_with_stabilizer(group, x)
    return C.order()
