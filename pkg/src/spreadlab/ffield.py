"""Arithmetic in GF(p^f) with an explicit defining polynomial.

Elements are stored as integers ``sum(c_i * p**i)`` where ``c_i`` are the
coefficients of the polynomial-basis representation (low degree first).  This
integer encoding also fixes the element ordering used for every deterministic
choice in the package: comparing encodings is the same as comparing
coefficient vectors read from the highest degree down.

Multiplication goes through log/antilog tables built from the smallest
primitive element, so fields up to 2**16 elements are cheap to use.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd

import numpy as np

MAX_ORDER = 1 << 16


class FieldError(ValueError):
    pass


class NonPrime(FieldError):
    pass


class ReduciblePolynomial(FieldError):
    pass


class NotASubfield(FieldError):
    pass


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n):
    """Distinct prime factors of ``n`` in increasing order (trial division)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p), coefficient lists low-to-high -----------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, b, p):
    a = list(a)
    _trim(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def is_irreducible(coeffs, p):
    """Ben-Or test: no factor of degree <= deg/2 via gcd(x^(p^i) - x, g)."""
    g = _trim(list(coeffs))
    n = len(g) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if g[0] == 0:
        return False
    h = [0, 1]
    for _ in range(1, n // 2 + 1):
        h = _ppowmod(h, p, g, p)
        d = _pgcd(g, _psub(h, [0, 1], p), p)
        if len(d) > 1:
            return False
    return True


# -- field spec ------------------------------------------------------------

class FieldSpec:
    """GF(p^f) together with its defining monic polynomial ``irred``.

    ``irred`` is the coefficient list ``[c0, ..., cf]`` (``cf == 1``).
    """

    __slots__ = ("p", "f", "q", "irred", "_exp", "_log", "_digits", "_add", "_mul",
                 "_neg", "_inv", "zeta", "__weakref__")

    def __init__(self, p, f, irred):
        self.p = p
        self.f = f
        self.q = p ** f
        self.irred = tuple(irred)
        self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.f})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.f, self.irred) == (
            other.p, other.f, other.irred)

    def __hash__(self):
        return hash((self.p, self.f, self.irred))

    def __reduce__(self):
        return (make_field, (self.p, self.f, list(self.irred)))

    # raw integer arithmetic -------------------------------------------------

    def _polymul_int(self, a, b):
        p, f = self.p, self.f
        da = [(a // p ** i) % p for i in range(f)]
        db = [(b // p ** i) % p for i in range(f)]
        prod = _pmul(_trim(da), _trim(db), p)
        rem = _pmod(prod, list(self.irred), p) if prod else []
        return sum(c * p ** i for i, c in enumerate(rem))

    def _build_tables(self):
        p, f, q = self.p, self.f, self.q
        idx = np.arange(q)
        self._digits = np.stack([(idx // p ** i) % p for i in range(f)], axis=1).astype(np.int64)
        # primitive element: smallest encoding of multiplicative order q-1
        order = q - 1
        primes = prime_factors(order) if order > 1 else []

        def powint(a, e):
            r = 1
            while e:
                if e & 1:
                    r = self._polymul_int(r, a)
                a = self._polymul_int(a, a)
                e >>= 1
            return r

        if q == 2:
            gen = 1
        else:
            gen = None
            for cand in range(2, q):
                if all(powint(cand, order // r) != 1 for r in primes):
                    gen = cand
                    break
        self.zeta = gen
        exp = np.zeros(2 * order + 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._polymul_int(x, gen)
        exp[order:2 * order] = exp[:order]
        exp[2 * order] = exp[0]
        self._exp = exp
        self._log = log
        # dense tables for small fields (used by matrix code)
        if q <= 512:
            d = self._digits
            s = (d[:, None, :] + d[None, :, :]) % p
            weights = p ** np.arange(f)
            self._add = (s * weights).sum(axis=2).astype(np.int64)
            la = log[:, None]
            lb = log[None, :]
            m = exp[(la + lb) % order] if order else np.zeros((q, q), dtype=np.int64)
            m = np.where((la < 0) | (lb < 0), 0, m)
            self._mul = m.astype(np.int64)
        else:
            self._add = None
            self._mul = None
        neg = ((-self._digits) % p * (p ** np.arange(f))).sum(axis=1)
        self._neg = neg.astype(np.int64)
        inv = np.zeros(q, dtype=np.int64)
        if order:
            nz = np.arange(1, q)
            inv[nz] = exp[(order - log[nz]) % order]
        self._inv = inv

    def add(self, a, b):
        if self._add is not None:
            return int(self._add[a, b])
        if self.p == 2:
            return a ^ b
        da, db = self._digits[a], self._digits[b]
        return int((((da + db) % self.p) * (self.p ** np.arange(self.f))).sum())

    def neg(self, a):
        return int(self._neg[a])

    def sub(self, a, b):
        return self.add(a, int(self._neg[b]))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return int(self._inv[a])

    def pow(self, a, e):
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 0 if e else 1
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    def log(self, a):
        """Discrete log of ``a`` to the base of the fixed primitive element."""
        return int(self._log[a])

    def order_of(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        return (self.q - 1) // gcd(self.q - 1, int(self._log[a]))

    def from_int(self, n):
        """Image of the integer ``n`` in the prime field."""
        return n % self.p

    # element helpers -------------------------------------------------------

    def elem(self, value):
        if isinstance(value, (list, tuple)):
            if len(value) != self.f:
                raise FieldError("coefficient vector has wrong length")
            value = sum((c % self.p) * self.p ** i for i, c in enumerate(value))
        return FieldElem(self, int(value))

    def elements(self):
        return [FieldElem(self, i) for i in range(self.q)]

    @property
    def zero(self):
        return FieldElem(self, 0)

    @property
    def one(self):
        return FieldElem(self, 1)

    @property
    def generator(self):
        """The fixed primitive element (smallest encoding of full order)."""
        return FieldElem(self, self.zeta)

    def tables(self):
        """Dense (add, mul, neg, inv) integer tables; requires q <= 512."""
        if self._add is None:
            raise FieldError(f"dense tables unavailable for {self!r}")
        return self._add, self._mul, self._neg, self._inv


class FieldElem:
    """Immutable element of a :class:`FieldSpec`."""

    __slots__ = ("spec", "v")

    def __init__(self, spec, v):
        self.spec = spec
        self.v = v

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise FieldError("elements from different fields")
            return other.v
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.spec, self.spec.add(self.v, o))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.spec, self.spec.neg(self.v))

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.spec, self.spec.sub(self.v, o))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.spec, self.spec.mul(self.v, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(
            self.spec, self.spec.mul(self.v, self.spec.inv(o)))

    def __pow__(self, e):
        return FieldElem(self.spec, self.spec.pow(self.v, e))

    def inverse(self):
        return FieldElem(self.spec, self.spec.inv(self.v))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.spec == other.spec and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.spec.p and self.v < self.spec.p
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.q, self.v))

    def __lt__(self, other):
        return self.v < other.v

    def __int__(self):
        return self.v

    def __bool__(self):
        return self.v != 0

    def coeffs(self):
        return tuple(int(c) for c in self.spec._digits[self.v])

    def order(self):
        return self.spec.order_of(self.v)

    def __repr__(self):
        return f"{self.spec!r}{self.coeffs()}"


# -- public operations -----------------------------------------------------

def _least_irreducible(p, f):
    if f == 1:
        return [0, 1]
    for n in range(p ** f):
        low = [(n // p ** i) % p for i in range(f)]
        coeffs = low + [1]
        if is_irreducible(coeffs, p):
            return coeffs
    raise FieldError(f"no irreducible polynomial of degree {f} over GF({p})")


@lru_cache(maxsize=None)
def _make_field_cached(p, f, irred):
    return FieldSpec(p, f, irred)


def make_field(p, f=1, irred=None):
    """Validated GF(p^f).

    Without ``irred`` the least monic irreducible polynomial (in the integer
    encoding order) is chosen, so ``make_field(3, 2)`` uses x^2 + 1.
    """
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if f < 1:
        raise FieldError("degree must be positive")
    if p ** f > MAX_ORDER:
        raise FieldError(f"GF({p}^{f}) exceeds the supported order {MAX_ORDER}")
    if irred is None:
        irred = _least_irreducible(p, f)
    irred = [int(c) % p for c in irred]
    if len(irred) != f + 1 or irred[-1] != 1:
        raise FieldError("defining polynomial must be monic of degree f")
    if not is_irreducible(irred, p):
        raise ReduciblePolynomial(f"{irred} is reducible over GF({p})")
    return _make_field_cached(p, f, tuple(irred))


def frobenius(x, i=1):
    """``x`` raised to ``p**i``."""
    spec = x.spec
    i %= spec.f
    return FieldElem(spec, spec.pow(x.v, spec.p ** i)) if x.v else x


def is_square(x):
    spec = x.spec
    if x.v == 0 or spec.p == 2:
        return True
    return spec.log(x.v) % 2 == 0


@lru_cache(maxsize=None)
def subfield_embedding(big, sub):
    """Integer array mapping encodings of ``sub`` into ``big``.

    The image of the subfield generator x is the smallest root (by encoding)
    of ``sub.irred`` inside ``big``.
    """
    if sub.p != big.p or big.f % sub.f:
        raise NotASubfield(f"{sub!r} is not a subfield of {big!r}")
    coeffs = sub.irred

    def evaluate(r):
        acc = 0
        for c in reversed(coeffs):
            acc = big.add(big.mul(acc, r), c)
        return acc

    root = next(r for r in range(big.q) if evaluate(r) == 0)
    powers = [1]
    for _ in range(sub.f - 1):
        powers.append(big.mul(powers[-1], root))
    emb = np.zeros(sub.q, dtype=np.int64)
    for s in range(sub.q):
        acc = 0
        for i, c in enumerate(sub._digits[s]):
            acc = big.add(acc, big.mul(int(c), powers[i]))
        emb[s] = acc
    return emb


@lru_cache(maxsize=None)
def _restriction(big, sub):
    emb = subfield_embedding(big, sub)
    return {int(b): s for s, b in enumerate(emb)}


def embed(x, big):
    """Image of a subfield element in ``big``."""
    return FieldElem(big, int(subfield_embedding(big, x.spec)[x.v]))


def restrict(x, sub):
    """Inverse of :func:`embed`; raises if ``x`` is not in the subfield."""
    table = _restriction(x.spec, sub)
    if x.v not in table:
        raise NotASubfield(f"{x!r} does not lie in {sub!r}")
    return FieldElem(sub, table[x.v])


def norm_to_subfield(x, sub):
    """Norm from x's field down to ``sub``: x^((q-1)/(q1-1))."""
    big = x.spec
    if sub.p != big.p or big.f % sub.f:
        raise NotASubfield(f"{sub!r} is not a subfield of {big!r}")
    if x.v == 0:
        return FieldElem(sub, 0)
    e = (big.q - 1) // (sub.q - 1)
    return restrict(FieldElem(big, big.pow(x.v, e)), sub)


def trace_to_subfield(x, sub):
    big = x.spec
    if sub.p != big.p or big.f % sub.f:
        raise NotASubfield(f"{sub!r} is not a subfield of {big!r}")
    acc = 0
    y = x.v
    for _ in range(big.f // sub.f):
        acc = big.add(acc, y)
        y = big.pow(y, sub.q) if y else 0
    return restrict(FieldElem(big, acc), sub)


def multiplicative_order_mod(a, r):
    if gcd(a, r) != 1:
        return None
    k, x = 1, a % r
    while x != 1:
        x = x * a % r
        k += 1
    return k


def ppd(a, k):
    """Smallest primitive prime divisor of a^k - 1, or None if none exists."""
    if a < 2 or k < 2:
        raise ValueError("ppd needs a >= 2 and k >= 2")
    n = a ** k - 1
    if n >= 1 << 63:
        raise OverflowError(f"{a}^{k} exceeds the native integer range")
    for r in prime_factors(n):
        if multiplicative_order_mod(a, r) == k:
            return r
    return None
