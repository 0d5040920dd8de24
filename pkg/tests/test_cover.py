import pytest

from etalecover.cover import (DegreeLedger, assemble_u_tuple,
                              build_local_cover, reduced_jacobian_minors)
from etalecover.errors import DegreeMismatch, UnsupportedRequiresBlowup
from etalecover.geometry import VarietyInstance
from etalecover.ideal import HomIdeal
from etalecover.poly import SparseForm, parse_form
from etalecover.sections import SectionSearchConfig
from tests.conftest import point


def test_degree_ledger_common_degree():
    led = DegreeLedger(p=3, e=1, m=2, r=2, l=2)
    assert led.common_degree == 24


def test_assemble_u_tuple_identities():
    p = 3
    s = parse_form("x+y+z", p, 3)
    s1 = parse_form("x*y", p, 3)          # degree m*e with m=2, e=1
    t = parse_form("x^2+y*z", p, 3)       # degree r*m*e with r=1
    t1 = parse_form("x^4+z^4", p, 3)      # degree l*r*m*e with l=2
    M = assemble_u_tuple(s, [s1], t, [t1], p=p, l=2, r=1, m=2)
    l, big_m = 2, 2 * (p * 1 - 1)
    assert M.u[0] == t ** (p * l)
    assert M.u[1] == s1 * s ** big_m * t ** (p * (l - 1)) + t1 ** p
    assert all(u.homogeneous_degree == M.ledger.common_degree for u in M.u)
    # every partial derivative of u_0 dies (p-th power)
    for i in range(3):
        assert M.u[0].partial_derivative(i).is_zero()


def test_assemble_rejects_bad_degrees():
    p = 3
    s = parse_form("x", p, 3)
    with pytest.raises(DegreeMismatch):
        assemble_u_tuple(s, [parse_form("x*y", p, 3)],
                         parse_form("x^3", p, 3),   # wrong degree for t
                         [parse_form("x^4", p, 3)], p=p, l=2, r=1, m=2)


def test_assemble_rejects_l_below_two():
    p = 3
    s = parse_form("x", p, 3)
    with pytest.raises(Exception):
        assemble_u_tuple(s, [parse_form("x^2", p, 3)],
                         parse_form("x^2", p, 3), [parse_form("x^2", p, 3)],
                         p=p, l=1, r=1, m=2)


def test_reduced_jacobian_minors_shape():
    p = 3
    F = parse_form("x*z-y^2", p, 3)
    s = parse_form("x+z", p, 3)
    s1 = parse_form("x*y", p, 3)
    minors = reduced_jacobian_minors(F, s, [s1], m=2)
    assert len(minors) == 3
    assert any(not m.is_zero() for m in minors)


def test_build_conic_cover_structure(conic_V, conic_cover):
    M, C = conic_cover
    led = M.ledger
    assert led.p == 3 and led.l >= 2
    assert len(M.u) == conic_V.n + 1
    deg = led.common_degree
    assert all(u.homogeneous_degree == deg for u in M.u)
    assert M.u[0] == M.t ** (led.p * led.l)
    # certificates verify by re-multiplication
    for cert in C.finiteness + C.etale_off_H:
        assert cert.verify()
    # D maps into the hyperplane at infinity: u_0 in (F) + I(D)
    assert C.D_to_H is not None
    acc = SparseForm.zero(3, 3)
    gens = [conic_V.F] + conic_V.divisor_D.generators
    for c, g in zip(C.D_to_H, gens):
        acc = acc + c * g
    assert acc == M.u[0]
    # S stays off the hyperplane at infinity
    for P, val in C.S_off_H:
        assert M.u[0].evaluate(P) == val
        assert not val.is_zero()


def test_local_cover_rejects_too_many_divisors():
    p = 5
    F = parse_form("x^3+y^3+z^3", p, 3)
    D1 = HomIdeal([parse_form("x+y", p, 3), parse_form("z", p, 3)])
    D2 = HomIdeal([parse_form("x", p, 3), parse_form("y+z", p, 3)])
    V = VarietyInstance(p, F, extra_divisors=[D1, D2],
                        S=[point(p, 1, 4, 1, 0)])
    with pytest.raises(UnsupportedRequiresBlowup):
        build_local_cover(V, SectionSearchConfig())
