import itertools

import pytest

from addcodes.errors import ConfigurationError, DomainError, InputError, UsageError
from addcodes.gf import FieldElement, field_make, field_of_order, is_irreducible, subfield_contract, subfield_expand


def poly_mul_mod(a, b, modulus, p):
    """Schoolbook product of digit vectors reduced modulo a monic polynomial (oracle)."""
    m = len(modulus) - 1
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for i in range(m + 1):
                prod[k - m + i] = (prod[k - m + i] - c * modulus[i]) % p
    return prod[:m]


def digits(x, p, m):
    return [(x // p ** i) % p for i in range(m)]


def test_f4_omega_squared():
    F = field_make(2, 2)
    w = F(2)
    assert F.modulus == (1, 1, 1)
    assert w * w == w + F(1)


def test_f2_and_f3_prime_arithmetic():
    F2, F3 = field_make(2, 1), field_make(3, 1)
    assert F2(1) + F2(1) == F2(0)
    assert F3(2) + F3(2) == F3(1)


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (2, 4), (5, 2)])
def test_multiplication_table_matches_polynomial_oracle(p, m):
    F = field_make(p, m)
    assert is_irreducible(list(F.modulus), p)
    for a, b in itertools.product(range(F.q), repeat=2):
        expect = poly_mul_mod(digits(a, p, m), digits(b, p, m), F.modulus, p)
        assert F.digits(F.mul(a, b)) == expect


def test_f8_modulus_is_x3_x_1():
    assert field_make(2, 3).modulus == (1, 1, 0, 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27])
def test_field_axioms(q):
    F = field_of_order(q)
    els = F.elements()
    one, zero = F(1), F(0)
    for a in els:
        assert a + zero == a and a * one == a
        assert a - a == zero and a + (-a) == zero
        if a != zero:
            assert a * a.inverse() == one
            assert a ** (q - 1) == one
    for a, b in itertools.product(els[:6], repeat=2):
        assert a * b == b * a and a + b == b + a
        for c in els[:4]:
            assert a * (b + c) == a * b + a * c


def test_errors():
    F, G = field_of_order(4), field_of_order(8)
    with pytest.raises(DomainError):
        F(0).inverse()
    with pytest.raises(DomainError):
        F(1) / F(0)
    with pytest.raises(UsageError):
        F(1) + G(1)
    with pytest.raises(ConfigurationError):
        field_make(11, 1)
    with pytest.raises(InputError):
        FieldElement(F, 4)


def test_subfield_expand_example():
    F = field_of_order(4)
    w = F(2)
    basis = [F(1), w]
    assert subfield_expand(w * w, basis) == (1, 1)
    assert subfield_expand(F(0), basis) == (0, 0)


def test_subfield_expand_dependent_basis():
    F = field_of_order(4)
    with pytest.raises(InputError):
        subfield_expand(F(3), [F(1), F(1)])


@pytest.mark.parametrize("Q,q", [(4, 2), (8, 2), (9, 3), (16, 4), (16, 2), (27, 3)])
def test_expand_contract_roundtrip_and_linearity(Q, q):
    F = field_of_order(Q)
    l = {(4, 2): 2, (8, 2): 3, (9, 3): 2, (16, 4): 2, (16, 2): 4, (27, 3): 3}[(Q, q)]
    g = F.generator
    basis = [F(F.pow(g, i)) for i in range(l)]
    small = field_of_order(q)
    for x in F.elements():
        c = subfield_expand(x, basis, q)
        assert len(c) == l
        assert subfield_contract(c, basis, q) == x
    xs = F.elements()
    for x, y in itertools.product(xs[:5], xs[-5:]):
        cx, cy, cs = subfield_expand(x, basis, q), subfield_expand(y, basis, q), subfield_expand(x + y, basis, q)
        assert cs == tuple(small.add(a, b) for a, b in zip(cx, cy))
