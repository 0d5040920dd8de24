import pytest

from etalecover.errors import DegreeCapExceeded
from etalecover.ideal import HomIdeal
from etalecover.poly import parse_form
from etalecover.sections import (SectionSearchConfig, build_unramified_map,
                                 find_separating_section, graded_piece,
                                 kernel_mod_p, monomials_of_degree,
                                 rref_mod_p, solve_mod_p)
from tests.conftest import conic_instance, point


def test_monomials_of_degree_count():
    # dim of degree-d forms in nv variables is C(d + nv - 1, nv - 1)
    assert len(monomials_of_degree(3, 2)) == 6
    assert len(monomials_of_degree(2, 5)) == 6
    assert len(monomials_of_degree(3, 0)) == 1


def test_linear_algebra_mod_p():
    p = 5
    m = [[1, 2, 3], [2, 4, 2], [0, 0, 0]]
    rref, pivots = rref_mod_p([row[:] for row in m], p)
    assert len(pivots) == 2
    ker = kernel_mod_p([row[:] for row in m], 3, p)
    assert len(ker) == 1
    v = ker[0]
    for row in m:
        assert sum(a * b for a, b in zip(row, v)) % p == 0
    sol = solve_mod_p([[1, 2], [3, 4]], [1, 0], p)
    assert sol is not None
    assert (sol[0] + 2 * sol[1]) % p == 1
    assert (3 * sol[0] + 4 * sol[1]) % p == 0


def test_graded_piece_respects_vanishing():
    p = 3
    D = HomIdeal([parse_form("y", p, 3), parse_form("z", p, 3)])
    piece = graded_piece(p, 3, 2, vanish_ideals=[D],
                         vanish_points=[point(p, 1, 0, 0, 1)])
    P = point(p, 1, 0, 0, 1)
    for f in piece.basis:
        assert f.evaluate(P).is_zero()
        assert D.contains(f)


def test_find_separating_section_avoids_points():
    p = 3
    cfg = SectionSearchConfig()
    D = HomIdeal([parse_form("y", p, 3), parse_form("z", p, 3)])
    S = [point(p, 1, 0, 0, 1)]
    deg, s = find_separating_section([D], S, cfg, p, 3)
    assert s.homogeneous_degree == deg
    assert D.contains(s)
    for P in S:
        assert not s.evaluate(P).is_zero()


def test_find_separating_section_degree_cap():
    p = 3
    cfg = SectionSearchConfig(max_degree=0)
    with pytest.raises(DegreeCapExceeded):
        find_separating_section([], [point(p, 1, 0, 0, 1)], cfg, p, 3)


def test_build_unramified_map_rank_at_s():
    from etalecover.geometry import unramified_at
    V = conic_instance()
    cfg = SectionSearchConfig()
    deg, alpha = find_separating_section([V.divisor_D], V.S, cfg, V.p,
                                         V.num_vars)
    data = build_unramified_map(V, alpha, cfg)
    m = data.power
    assert len(data.deltas) == V.n
    forms = [alpha ** m] + list(data.deltas)
    for P in V.S:
        assert unramified_at(V, forms, P)
