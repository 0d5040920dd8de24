import itertools

import pytest

from etalecover.arith import (ExtField, FieldElement, embed, frobenius,
                              is_prime, make_extension, parse_element)
from etalecover.errors import NotPrime


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29}
    for n in range(-2, 31):
        assert is_prime(n) == (n in primes)


def test_make_extension_rejects_composite():
    with pytest.raises(NotPrime):
        make_extension(4, 1)


def test_prime_field_arithmetic():
    F = make_extension(5, 1)
    a, b = F.element(3), F.element(4)
    assert (a + b) == F.element(2)
    assert (a * b) == F.element(2)
    assert (a - b) == F.element(4)
    assert (a / b) == a * b.inverse()
    assert b * b.inverse() == F.one()
    assert (-a) == F.element(2)


def test_extension_field_axioms():
    F = make_extension(3, 2)
    elems = list(F.elements())
    assert len(elems) == 9
    # every nonzero element has a multiplicative inverse
    for a in elems:
        if not a.is_zero():
            assert a * a.inverse() == F.one()
    # the multiplicative group is cyclic of order 8
    orders = []
    for a in elems:
        if a.is_zero():
            continue
        k, b = 1, a
        while b != F.one():
            b, k = b * a, k + 1
        orders.append(k)
    assert max(orders) == 8
    # the ring generator w is not in the prime field
    g = F.generator()
    assert g.frobenius() != g


def test_frobenius_is_field_automorphism():
    F = make_extension(2, 3)
    for a, b in itertools.product(F.elements(), repeat=2):
        assert frobenius(a + b) == frobenius(a) + frobenius(b)
        assert frobenius(a * b) == frobenius(a) * frobenius(b)
    # fixed field is the prime field
    fixed = [a for a in F.elements() if frobenius(a) == a]
    assert len(fixed) == 2


def test_frobenius_orbit_closes():
    F = make_extension(3, 2)
    g = F.generator()
    assert g.frobenius().frobenius() == g


def test_embed_preserves_arithmetic():
    small = make_extension(2, 1)
    big = make_extension(2, 2)
    one = embed(small.one(), big)
    assert one == big.one()
    with pytest.raises(Exception):
        embed(make_extension(2, 2).generator(), make_extension(2, 3))


def test_parse_element_round_trip():
    F = make_extension(3, 2)
    for a in F.elements():
        assert parse_element(str(a), F) == a


def test_parse_element_rejects_w_in_prime_field():
    F = make_extension(3, 1)
    with pytest.raises(ValueError):
        parse_element("w", F)


def test_parse_element_signs_and_powers():
    F = make_extension(5, 2)
    w = F.generator()
    assert parse_element("2+w", F) == F.element(2) + w
    assert parse_element("-w", F) == -w
    assert parse_element("1-2*w", F) == F.one() - F.element(2) * w
