"""Dense linear algebra and polynomials over a :class:`~spreadlab.ffield.FieldSpec`.

Matrices are numpy integer arrays of field encodings; all arithmetic goes
through the field's dense tables, so fields here are limited to q <= 512.
Row vectors are acted on from the right: ``v -> v @ A``.
"""

from __future__ import annotations

import numpy as np

from .ffield import FieldElem, FieldError


class SingularMatrix(ValueError):
    pass


def _tables(F):
    return F.tables()


def fmatmul(F, X, Y):
    """Product of encoded matrices ``X`` (N x n) and ``Y`` (n x m)."""
    add, mul, _, _ = _tables(F)
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    if X.ndim == 1:
        return fmatmul(F, X[None, :], Y)[0]
    n = X.shape[1]
    if n == 0:
        return np.zeros((X.shape[0], Y.shape[1]), dtype=np.int64)
    acc = mul[X[:, 0][:, None], Y[0][None, :]]
    for k in range(1, n):
        acc = add[acc, mul[X[:, k][:, None], Y[k][None, :]]]
    return acc


def fdot(F, u, v):
    add, mul, _, _ = _tables(F)
    acc = 0
    for a, b in zip(u, v):
        acc = add[acc, mul[a, b]]
    return int(acc)


def identity(n):
    return np.eye(n, dtype=np.int64)


def rank(F, M):
    return _echelon(F, np.array(M, dtype=np.int64))[1]


def _echelon(F, M):
    """Row echelon form in place; returns (matrix, rank, pivot columns)."""
    add, mul, neg, inv = _tables(F)
    rows, cols = M.shape
    r = 0
    pivots = []
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = mul[inv[M[r, c]], M[r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = add[M[i], mul[neg[M[i, c]], M[r]]]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, r, pivots


def row_reduce(F, M):
    return _echelon(F, np.array(M, dtype=np.int64))


def inverse(F, A):
    n = A.shape[0]
    aug = np.concatenate([np.array(A, dtype=np.int64), identity(n)], axis=1)
    M, r, piv = _echelon(F, aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return M[:, n:].copy()


def solve_left(F, A, b):
    """Solve ``x @ A = b`` for a row vector ``x`` (A square, invertible)."""
    return fmatmul(F, np.asarray(b)[None, :], inverse(F, A))[0]


def det(F, A):
    add, mul, neg, inv = _tables(F)
    M = np.array(A, dtype=np.int64)
    n = M.shape[0]
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i, c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[[c, piv]] = M[[piv, c]]
            d = neg[d]
        d = mul[d, M[c, c]]
        ic = inv[M[c, c]]
        for i in range(c + 1, n):
            if M[i, c]:
                f = mul[neg[M[i, c]], ic]
                M[i] = add[M[i], mul[f, M[c]]]
    return int(d)


def nullspace(F, M):
    """Basis (rows) of ``{x : x @ M = 0}``."""
    Mt = np.array(M, dtype=np.int64).T.copy()
    R, r, piv = _echelon(F, Mt)
    n = Mt.shape[1]
    _, _, neg, _ = _tables(F)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        v = np.zeros(n, dtype=np.int64)
        v[fc] = 1
        for i, pc in enumerate(piv):
            v[pc] = neg[R[i, fc]]
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)


def frob_table(F, i):
    i %= F.f
    return np.array([F.pow(x, F.p ** i) if x else 0 for x in range(F.q)], dtype=np.int64)


def fpow_matrix(F, A, e):
    n = A.shape[0]
    if e < 0:
        A, e = inverse(F, A), -e
    result = identity(n)
    base = np.array(A, dtype=np.int64)
    while e:
        if e & 1:
            result = fmatmul(F, result, base)
        base = fmatmul(F, base, base)
        e >>= 1
    return result


def matrix_order(F, A, limit=10 ** 7):
    """Multiplicative order of an invertible matrix (by repeated squaring on
    candidate divisors of a multiple of the order)."""
    n = A.shape[0]
    I = identity(n)
    # the order divides lcm over k <= n of q^k - 1 times a p-power
    from math import lcm
    from .ffield import prime_factors

    q = F.q
    bound = 1
    for k in range(1, n + 1):
        bound = lcm(bound, q ** k - 1)
    pk = 1
    while pk < n:
        pk *= F.p
    bound *= pk
    if not np.array_equal(fpow_matrix(F, A, bound), I):
        raise SingularMatrix("matrix is not invertible")
    order = bound
    for r in prime_factors(bound):
        while order % r == 0 and np.array_equal(fpow_matrix(F, A, order // r), I):
            order //= r
    return order


# -- polynomials over F (coefficient lists of encodings, low degree first) --

def ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def padd(F, a, b):
    n = max(len(a), len(b))
    return ptrim([F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])


def psub(F, a, b):
    return padd(F, a, [F.neg(x) for x in b])


def pmul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return ptrim(out)


def pdivmod(F, a, b):
    a = ptrim(a)
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = F.inv(b[-1])
    quo = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        c = F.mul(a[-1], inv)
        shift = len(a) - len(b)
        quo[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
        a = ptrim(a)
    return ptrim(quo), a


def pmod(F, a, b):
    return pdivmod(F, a, b)[1]


def pgcd(F, a, b):
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pmod(F, a, b)
    if a:
        inv = F.inv(a[-1])
        a = [F.mul(x, inv) for x in a]
    return a


def ppowmod(F, base, e, mod):
    result = [1]
    base = pmod(F, base, mod)
    while e:
        if e & 1:
            result = pmod(F, pmul(F, result, base), mod)
        base = pmod(F, pmul(F, base, base), mod)
        e >>= 1
    return result


def is_irreducible_over(F, poly):
    """Ben-Or irreducibility test over an arbitrary finite field."""
    g = ptrim(poly)
    n = len(g) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    h = [0, 1]
    for _ in range(1, n // 2 + 1):
        h = ppowmod(F, h, F.q, g)
        d = pgcd(F, g, psub(F, h, [0, 1]))
        if len(d) > 1:
            return False
    return True


def smallest_factor_degree(F, poly):
    """Degree of the smallest irreducible factor (distinct-degree scan)."""
    g = ptrim(poly)
    n = len(g) - 1
    h = [0, 1]
    for k in range(1, n + 1):
        h = ppowmod(F, h, F.q, g)
        d = pgcd(F, g, psub(F, h, [0, 1]))
        if len(d) > 1:
            return k
    return n


def charpoly(F, A):
    """Characteristic polynomial det(tI - A) via Hessenberg reduction."""
    add, mul, neg, inv = _tables(F)
    H = np.array(A, dtype=np.int64)
    n = H.shape[0]
    # reduce to upper Hessenberg form by similarity transformations
    for c in range(n - 2):
        piv = next((i for i in range(c + 1, n) if H[i, c]), None)
        if piv is None:
            continue
        if piv != c + 1:
            H[[c + 1, piv]] = H[[piv, c + 1]]
            H[:, [c + 1, piv]] = H[:, [piv, c + 1]]
        ip = inv[H[c + 1, c]]
        for i in range(c + 2, n):
            if H[i, c]:
                f = mul[H[i, c], ip]
                H[i] = add[H[i], mul[neg[f], H[c + 1]]]
                H[:, c + 1] = add[H[:, c + 1], mul[f, H[:, i]]]
    # p_k(t) = (t - h_kk) p_{k-1} - sum_{i<k} h_{ik} prod_{j=i+1..k} h_{j,j-1} p_{i-1}
    polys = [[1]]
    for k in range(n):
        pk = pmul(F, [neg[H[k, k]], 1], polys[k])
        prod = 1
        for i in range(k - 1, -1, -1):
            prod = mul[prod, H[i + 1, i]]
            if prod == 0:
                break
            term = [mul[mul[H[i, k], prod], c] for c in polys[i]]
            pk = psub(F, pk, term)
        polys.append(pk)
    return polys[n]


def poly_roots_in(F, poly, K, emb):
    """Roots in the extension field ``K`` of a polynomial over ``F``.

    ``emb`` maps encodings of ``F`` into ``K``.
    """
    coeffs = [int(emb[c]) for c in poly]
    roots = []
    for r in range(K.q):
        acc = 0
        for c in reversed(coeffs):
            acc = K.add(K.mul(acc, r), c)
        if acc == 0:
            roots.append(r)
    return roots


class MatF:
    """Square matrix over a finite field (immutable value)."""

    __slots__ = ("F", "a", "form", "predicted_order")

    def __init__(self, F, a, form=None):
        self.predicted_order = None
        self.F = F
        a = np.array(a, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise FieldError("matrix must be square")
        a.setflags(write=False)
        self.a = a
        self.form = form

    @classmethod
    def identity(cls, F, n):
        return cls(F, identity(n))

    @property
    def n(self):
        return self.a.shape[0]

    def __mul__(self, other):
        if isinstance(other, MatF):
            return MatF(self.F, fmatmul(self.F, self.a, other.a), self.form)
        if isinstance(other, (int, FieldElem)):
            s = int(other)
            return MatF(self.F, self.F.tables()[1][s][self.a], self.form)
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, e):
        return MatF(self.F, fpow_matrix(self.F, self.a, e), self.form)

    def inverse(self):
        return MatF(self.F, inverse(self.F, self.a), self.form)

    def transpose(self):
        return MatF(self.F, self.a.T, self.form)

    @property
    def T(self):
        return self.transpose()

    def frob(self, i):
        return MatF(self.F, frob_table(self.F, i)[self.a], self.form)

    def det(self):
        return det(self.F, self.a)

    def order(self):
        return matrix_order(self.F, self.a)

    def charpoly(self):
        return charpoly(self.F, self.a)

    def is_identity(self):
        return np.array_equal(self.a, identity(self.n))

    def __eq__(self, other):
        return isinstance(other, MatF) and self.F == other.F and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.F, self.a.tobytes()))

    def __repr__(self):
        return f"MatF({self.F!r}, {self.a.tolist()})"


def block_diag(F, *blocks):
    n = sum(b.n if isinstance(b, MatF) else np.asarray(b).shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    k = 0
    for b in blocks:
        arr = b.a if isinstance(b, MatF) else np.asarray(b)
        d = arr.shape[0]
        out[k:k + d, k:k + d] = arr
        k += d
    return MatF(F, out)
