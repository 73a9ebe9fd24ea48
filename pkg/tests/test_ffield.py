import pytest
from hypothesis import given, strategies as st

from spreadlab.ffield import (FieldElem, NonPrime, NotASubfield, ReduciblePolynomial,
                              frobenius, is_square, make_field, norm_to_subfield, ppd)

SMALL = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2),
         (7, 1), (7, 2), (3, 4)]


def digits(v, p, f):
    return [(v // p ** i) % p for i in range(f)]


def oracle_mul(F, a, b):
    """Schoolbook product of coefficient vectors reduced by the defining polynomial."""
    p, f = F.p, F.f
    x, y = digits(a, p, f), digits(b, p, f)
    prod = [0] * (2 * f - 1)
    for i, u in enumerate(x):
        for j, w in enumerate(y):
            prod[i + j] = (prod[i + j] + u * w) % p
    irr = list(F.irred)
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c:
            for t in range(f + 1):
                prod[k - f + t] = (prod[k - f + t] - c * irr[t]) % p
    return sum(c * p ** i for i, c in enumerate(prod[:f]))


def test_prime_field_default_polynomial():
    F = make_field(2, 1)
    assert F.q == 2 and list(F.irred) == [0, 1]


def test_gf9_with_x2_plus_1():
    F = make_field(3, 2, [1, 0, 1])
    assert F.q == 9


def test_reducible_polynomial_rejected():
    with pytest.raises(ReduciblePolynomial):
        make_field(2, 2, [0, 1, 1])


def test_nonprime_rejected():
    with pytest.raises(NonPrime):
        make_field(4, 1)


@pytest.mark.parametrize("p,f", SMALL)
def test_multiplication_matches_schoolbook(p, f):
    F = make_field(p, f)
    for a in range(F.q):
        for b in range(0, F.q, max(1, F.q // 9)):
            assert F.mul(a, b) == oracle_mul(F, a, b)


@given(st.sampled_from([(p, f) for p, f in SMALL if p ** f <= 32]), st.data())
def test_field_axioms(pf, data):
    F = make_field(*pf)
    a, b, c = (FieldElem(F, data.draw(st.integers(0, F.q - 1))) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
    if a.v:
        assert (a * a.inverse()).v == 1


def test_frobenius_on_gf4():
    F = make_field(2, 2)
    w = F.generator
    assert frobenius(w, 1) == w * w
    assert frobenius(w, 2) == w


def test_frobenius_on_gf9_generator():
    F = make_field(3, 2)
    g = F.generator
    assert frobenius(g, 1) == g ** 3


@pytest.mark.parametrize("p,f", [(2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4),
                                 (5, 2), (7, 2)])
def test_frobenius_fixes_exactly_the_prime_field(p, f):
    F = make_field(p, f)
    fixed = [v for v in range(F.q) if frobenius(FieldElem(F, v)).v == v]
    assert len(fixed) == p
    images = {frobenius(FieldElem(F, v)).v for v in range(F.q)}
    assert len(images) == F.q
    for a in range(1, F.q, 3):
        for b in range(1, F.q, 5):
            x, y = FieldElem(F, a), FieldElem(F, b)
            assert frobenius(x * y) == frobenius(x) * frobenius(y)
            assert frobenius(x + y) == frobenius(x) + frobenius(y)


def test_norm_examples():
    F4, F2 = make_field(2, 2), make_field(2, 1)
    assert norm_to_subfield(F4.generator, F2).v == 1
    F9, F3 = make_field(3, 2), make_field(3, 1)
    n = norm_to_subfield(F9.generator, F3)
    assert F3.order_of(n.v) == 2
    assert norm_to_subfield(FieldElem(F9, 0), F3).v == 0


@pytest.mark.parametrize("big,sub", [((2, 4), (2, 2)), ((2, 6), (2, 3)), ((3, 4), (3, 2)),
                                     ((3, 2), (3, 1)), ((2, 6), (2, 2)), ((5, 2), (5, 1))])
def test_norm_multiplicative_and_surjective(big, sub):
    B, S = make_field(*big), make_field(*sub)
    elems = [FieldElem(B, v) for v in range(1, B.q)]
    image = {norm_to_subfield(x, S).v for x in elems}
    assert image == set(range(1, S.q))
    for x in elems[::3]:
        for y in elems[::5]:
            assert norm_to_subfield(x * y, S) == norm_to_subfield(x, S) * norm_to_subfield(y, S)


def test_norm_needs_subfield():
    with pytest.raises(NotASubfield):
        norm_to_subfield(FieldElem(make_field(2, 3), 1), make_field(2, 2))


@pytest.mark.parametrize("p,f", SMALL)
def test_is_square_by_enumeration(p, f):
    F = make_field(p, f)
    squares = {F.mul(y, y) for y in range(F.q)}
    for v in range(F.q):
        assert is_square(FieldElem(F, v)) == (v in squares)


def test_square_examples():
    F = make_field(3, 2)
    g = F.generator
    assert not is_square(g) and is_square(g * g)
    assert all(is_square(FieldElem(make_field(2, 3), v)) for v in range(8))


@pytest.mark.parametrize("a,k,r", [(2, 4, 5), (2, 6, None), (3, 2, None), (4, 3, 7)])
def test_ppd_examples(a, k, r):
    assert ppd(a, k) == r


def test_ppd_divides_and_is_primitive():
    for a in range(2, 10):
        for k in range(2, 13):
            r = ppd(a, k)
            if r is None:
                continue
            assert (a ** k - 1) % r == 0 and (r - 1) % k == 0
            assert all((a ** i - 1) % r for i in range(1, k))


def test_ppd_rejects_bad_input():
    with pytest.raises(ValueError):
        ppd(1, 3)
    with pytest.raises(OverflowError):
        ppd(9, 40)
