import pytest

from etalecover.geometry import (VarietyInstance, chart_ramification_ideal,
                                 jacobian_rows, matrix_rank_at,
                                 maximal_minors, singular_locus, smooth_at,
                                 unramified_at, validate_instance)
from etalecover.ideal import HomIdeal
from etalecover.poly import parse_form
from tests.conftest import conic_instance, point


def test_validate_smooth_conic():
    assert validate_instance(conic_instance()) == []


def test_validate_flags_nonhomogeneous():
    V = VarietyInstance(3, parse_form("x*z-y^2+x", 3, 3))
    assert validate_instance(V)


def test_validate_flags_s_point_off_variety():
    V = conic_instance()
    V.S.append(point(3, 1, 1, 1, 2))
    assert validate_instance(V)


def test_smooth_at_and_singular_locus():
    p = 3
    # nodal cubic zy^2 = x^2(x+z) is singular at (0:0:1)
    F = parse_form("x^3+x^2*z-y^2*z", p, 3)
    assert not smooth_at(F, point(p, 1, 0, 0, 1))
    assert smooth_at(F, point(p, 1, 2, 0, 1))
    V = VarietyInstance(p, F)
    sing = singular_locus(V)
    assert not sing.is_trivial()


def test_maximal_minors_of_jacobian():
    p = 3
    F = parse_form("x*z-y^2", p, 3)
    u = [parse_form("x^3", p, 3), parse_form("y^3", p, 3)]
    rows = jacobian_rows(F, u)
    minors = maximal_minors(rows)
    assert len(minors) == 3
    # all u-gradients vanish (p-th powers), so every minor is zero
    assert all(m.is_zero() for m in minors)


def test_matrix_rank_at():
    p = 3
    F = parse_form("x*z-y^2", p, 3)
    rows = jacobian_rows(F, [parse_form("z^2", p, 3),
                             parse_form("y*z", p, 3)])
    P = point(p, 1, 0, 0, 1)
    assert matrix_rank_at(rows, P) == 2


def test_unramified_at_conic():
    p = 3
    F = parse_form("x*z-y^2", p, 3)
    V = VarietyInstance(p, F)
    P = point(p, 1, 0, 0, 1)
    # (z^2 : y*z) has full Jacobian rank at (0:0:1)
    assert unramified_at(V, [parse_form("z^2", p, 3),
                             parse_form("y*z", p, 3)], P)
    # a tuple of p-th powers is ramified everywhere
    assert not unramified_at(V, [parse_form("z^3", p, 3),
                                 parse_form("x^3", p, 3)], P)


def test_chart_ramification_ideal_shape():
    p = 3
    F_aff = parse_form("x-y^2", p, 2)   # conic on the z = 1 chart
    h = parse_form("x*y", p, 2)
    I = chart_ramification_ideal(F_aff, h)
    gens = I.generators
    assert gens[0] == F_aff
    wedge = (h.partial_derivative(0) * F_aff.partial_derivative(1)
             - h.partial_derivative(1) * F_aff.partial_derivative(0))
    assert gens[1] == wedge
