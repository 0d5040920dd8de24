import pytest

from etalecover import ideal as ideal_module
from etalecover.errors import ResourceBudgetExceeded
from etalecover.ideal import (HomIdeal, NullstellensatzCert, buchberger,
                              enumerate_projective, projective_empty)
from etalecover.poly import SparseForm, parse_form


def test_buchberger_representations_remultiply():
    p = 3
    gens = [parse_form("x*z-y^2", p, 3), parse_form("y", p, 3)]
    for g, rep in buchberger(gens):
        acc = SparseForm.zero(p, 3)
        for c, f in zip(rep, gens):
            acc = acc + c * f
        assert acc == g


def test_groebner_membership():
    p = 3
    I = HomIdeal([parse_form("x*z-y^2", p, 3), parse_form("y", p, 3)])
    assert I.contains(parse_form("x*z", p, 3))
    assert not I.contains(parse_form("x", p, 3))


def test_membership_with_cofactors_remultiplies():
    p = 5
    gens = [parse_form("x^2-y*z", p, 3), parse_form("z", p, 3)]
    I = HomIdeal(gens)
    f = parse_form("x^2*y-y^2*z+x*z", p, 3)
    cofs = I.membership_with_cofactors(f)
    assert cofs is not None
    acc = SparseForm.zero(p, 3)
    for c, g in zip(cofs, gens):
        acc = acc + c * g
    assert acc == f
    assert I.membership_with_cofactors(parse_form("x", p, 3)) is None


def test_trivial_ideal():
    p = 3
    I = HomIdeal([parse_form("x", p, 3), parse_form("x+1", p, 3)])
    assert I.is_trivial()


def test_nullstellensatz_cert_verify():
    p = 3
    g = parse_form("x", p, 3)
    one = SparseForm.constant(p, 3, 1)
    good = NullstellensatzCert([g, one - g], [one, one], one)
    assert good.verify()
    bad = NullstellensatzCert([g, one - g], [one, g], one)
    assert not bad.verify()


def test_enumerate_projective_counts():
    # |P^2(F_q)| = q^2 + q + 1
    assert len(list(enumerate_projective(3, 1, 3))) == 13
    assert len(list(enumerate_projective(2, 2, 3))) == 21
    # |P^1(F_q)| = q + 1
    assert len(list(enumerate_projective(5, 1, 2))) == 6


def test_projective_empty_decides():
    p = 3
    empty = HomIdeal([parse_form("x", p, 3), parse_form("y", p, 3),
                      parse_form("z", p, 3)])
    res = projective_empty(empty)
    assert res.empty
    nonempty = HomIdeal([parse_form("x", p, 3), parse_form("y", p, 3)])
    res2 = projective_empty(nonempty)
    assert not res2.empty


def test_spair_budget_enforced(monkeypatch):
    monkeypatch.setattr(ideal_module, "DEFAULT_SPAIR_BUDGET", 0)
    p = 3
    with pytest.raises(ResourceBudgetExceeded):
        HomIdeal([parse_form("x^2-y*z", p, 3),
                  parse_form("x*y-z^2", p, 3)]).groebner_basis()
