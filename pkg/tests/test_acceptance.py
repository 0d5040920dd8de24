"""Acceptance suite: end-to-end behavior the package must guarantee.

Each test is self-contained against the public API; the heavy constructions
are shared through module-scoped fixtures so the suite stays within its time
budgets.
"""

import copy
import random
import time

import pytest

from etalecover.cli import (main, parse_instance, serialize_certificate,
                            serialize_morphism)
from etalecover.cover import DegreeLedger, build_etale_cover, build_local_cover
from etalecover.geometry import VarietyInstance, chart_ramification_ideal
from etalecover.ideal import HomIdeal, _Budget, _reduce, buchberger
from etalecover.poly import SparseForm, parse_form
from etalecover.sections import (SectionSearchConfig, monomials_of_degree,
                                 rref_mod_p)
from etalecover.verify import check_certificate, oracle_check
from tests.conftest import conic_instance, point


def reducible_instance():
    p = 3
    F = parse_form("x*y", p, 3)
    return VarietyInstance(p, F,
                           S=[point(p, 1, 0, 1, 1), point(p, 1, 1, 0, 1)])


def cubic_global_instance():
    p = 5
    F = parse_form("x^3+y^3+z^3", p, 3)
    D = HomIdeal([parse_form("x+y", p, 3), parse_form("z", p, 3)])
    return VarietyInstance(p, F, divisor_D=D, S=[point(p, 1, 4, 0, 1)])


def cubic_local_instance():
    p = 5
    F = parse_form("x^3+y^3+z^3", p, 3)
    D1 = HomIdeal([parse_form("x+y", p, 3), parse_form("z", p, 3)])
    return VarietyInstance(p, F, extra_divisors=[D1],
                           S=[point(p, 1, 4, 1, 0)])


@pytest.fixture(scope="module")
def conic_built(conic_cover):
    return conic_cover


@pytest.fixture(scope="module")
def cubic_global_built():
    V = cubic_global_instance()
    M, C = build_etale_cover(V, SectionSearchConfig())
    return V, M, C


# --- 1: smooth conic, end to end, within budget ---------------------------

def test_acceptance_01_conic_end_to_end(conic_V, conic_built):
    start = time.monotonic()
    M, C = build_etale_cover(conic_V, SectionSearchConfig())
    assert check_certificate(C, M, conic_V).passed
    report = oracle_check(conic_V, M, depth=3)
    assert report.passed
    assert time.monotonic() - start < 10


# --- 2: reducible curve ----------------------------------------------------

def test_acceptance_02_reducible_curve():
    start = time.monotonic()
    V = reducible_instance()
    M, C = build_etale_cover(V, SectionSearchConfig())
    assert check_certificate(C, M, V).passed
    assert oracle_check(V, M, depth=2).passed
    assert time.monotonic() - start < 30


# --- 3: smooth plane cubic, global mode ------------------------------------

def test_acceptance_03_cubic_global(cubic_global_built):
    start = time.monotonic()
    V, M, C = cubic_global_built
    assert check_certificate(C, M, V).passed
    assert oracle_check(V, M, depth=2).passed
    # D really lands in the hyperplane at infinity
    assert C.D_to_H is not None
    assert time.monotonic() - start < 120


# --- 4: smooth plane cubic, local mode -------------------------------------

def test_acceptance_04_cubic_local():
    start = time.monotonic()
    V = cubic_local_instance()
    local, C = build_local_cover(V, SectionSearchConfig())
    M = local.morphism
    assert check_certificate(C, M, V).passed
    assert oracle_check(V, M, depth=2).passed
    # the constrained divisor lands in the coordinate hyperplane u_1 = 0
    # while staying off u_0 = 0
    P = V.S[0]
    assert M.u[1].evaluate(P).is_zero()
    assert not M.u[0].evaluate(P).is_zero()
    assert time.monotonic() - start < 120


# --- 5: ramification ideal is blind to p-th-power perturbations ------------

def _random_poly(rng, p, nv, max_deg):
    terms = {}
    for d in range(max_deg + 1):
        for exp in monomials_of_degree(nv, d):
            terms[exp] = rng.randrange(p)
    return SparseForm(p, nv, terms)


def test_acceptance_05_pth_power_invariance():
    seeds = 0
    for p in (2, 3, 5):
        for seed in range(34):
            rng = random.Random(1000 * p + seed)
            F_aff = _random_poly(rng, p, 2, 3)
            h = _random_poly(rng, p, 2, 3)
            g = _random_poly(rng, p, 2, 2)
            if F_aff.is_zero():
                continue
            base = chart_ramification_ideal(F_aff, h)
            bumped = chart_ramification_ideal(F_aff, h + g ** p)
            assert base.generators == bumped.generators
            seeds += 1
    assert seeds >= 100


# --- 6: differential cancellation on the catalog ---------------------------

def _check_differential_cancellation(M):
    p, led = M.ledger.p, M.ledger
    big_m = led.m * (p * led.r - 1)
    t_pow = M.t ** (p * (led.l - 1))
    s_pow = M.s ** (big_m - led.m)
    sm = M.s ** led.m
    sm1 = M.s ** (led.m - 1)
    nv = M.u[0].num_vars
    for j in range(nv):
        assert M.u[0].partial_derivative(j).is_zero()
    for i, (si, ti) in enumerate(zip(M.s_list, M.t_list), 1):
        for j in range(nv):
            lhs = M.u[i].partial_derivative(j)
            cleared = (sm * si.partial_derivative(j)
                       - si.scale(led.m) * sm1 * M.s.partial_derivative(j))
            assert lhs == t_pow * s_pow * cleared


def test_acceptance_06_differential_cancellation(conic_built,
                                                 cubic_global_built):
    _check_differential_cancellation(conic_built[0])
    _check_differential_cancellation(cubic_global_built[1])


# --- 7: degree ledger identity ---------------------------------------------

def test_acceptance_07_degree_ledger_identity():
    for p in (2, 3, 5, 7):
        for e in range(1, 5):
            for m in range(1, 5):
                for r in range(1, 5):
                    for l in range(2, 6):
                        led = DegreeLedger(p=p, e=e, m=m, r=r, l=l)
                        common = led.common_degree
                        assert common == p * l * r * m * e
                        # u_0 = t^{pl}
                        assert p * l * (r * m * e) == common
                        # first summand of u_i
                        big_m = m * (p * r - 1)
                        assert (m * e + big_m * e
                                + p * (l - 1) * r * m * e) == common
                        # second summand of u_i
                        assert p * (l * r * m * e) == common


# --- 8: falsifier pair -----------------------------------------------------

def test_acceptance_08_falsifier_pair():
    p = 3
    V = VarietyInstance(p, parse_form("x*z-y^2", p, 3))
    reject = [parse_form("x^3", p, 3), parse_form("y^3", p, 3)]
    rep = oracle_check(V, reject, depth=2)
    assert rep.off_H_violations      # genuinely ramified off u_0 = 0
    accept = [parse_form("x^3", p, 3), parse_form("y^3-x^2*y", p, 3)]
    rep2 = oracle_check(V, accept, depth=2)
    assert not rep2.off_H_violations
    # off-H fibers of the accepted map carry squarefree fiber polynomials
    checked = 0
    for lvl in rep2.levels:
        for fib in lvl.fibers:
            if fib.squarefree is not None:
                assert fib.squarefree
                checked += 1
    assert checked > 0


# --- 9: every certificate clause is mutation-sensitive ---------------------

def test_acceptance_09_mutation_sensitivity(conic_V, conic_built):
    M, C = conic_built

    def bump_first_nonzero(cofactors):
        idx = next(i for i, c in enumerate(cofactors) if not c.is_zero())
        cof = cofactors[idx]
        exp, _ = cof.leading_term()
        cofactors[idx] = cof + SparseForm.monomial(cof.p, cof.num_vars,
                                                   exp, 1)

    mutants = []
    bad = copy.deepcopy(C)
    bump_first_nonzero(bad.finiteness[0].cofactors)
    mutants.append((bad, "finiteness"))
    bad = copy.deepcopy(C)
    bump_first_nonzero(bad.etale_off_H[0].cofactors)
    mutants.append((bad, "etale"))
    bad = copy.deepcopy(C)
    bump_first_nonzero(bad.D_to_H)
    mutants.append((bad, "d-to-h"))
    for mutant, prefix in mutants:
        res = check_certificate(mutant, M, conic_V)
        assert not res.passed
        assert res.first_failure.startswith(prefix)


# --- 10: byte-identical determinism ----------------------------------------

def test_acceptance_10_determinism(conic_V):
    def run():
        V = conic_instance()
        M, C = build_etale_cover(V, SectionSearchConfig(rng_seed=0))
        return serialize_morphism(M, 3) + serialize_certificate(C, 3)

    assert run().encode() == run().encode()


# --- 11: Groebner engine self-checks ---------------------------------------

def test_acceptance_11_groebner_self_check():
    p = 5
    gens = [parse_form("x^2-y*z", p, 3), parse_form("x*y-z^2", p, 3)]
    gb = buchberger(gens)
    basis = [(g, *g.leading_term()) for g, _ in gb]

    # every S-polynomial of the returned basis reduces to zero
    for i in range(len(basis)):
        for j in range(i):
            gi, ei, ci = basis[i]
            gj, ej, cj = basis[j]
            lcm = tuple(max(a, b) for a, b in zip(ei, ej))
            mi = SparseForm.monomial(p, 3, tuple(a - b for a, b
                                                 in zip(lcm, ei)),
                                     pow(ci, p - 2, p))
            mj = SparseForm.monomial(p, 3, tuple(a - b for a, b
                                                 in zip(lcm, ej)),
                                     pow(cj, p - 2, p))
            nf, _ = _reduce(mi * gi - mj * gj, basis, _Budget())
            assert nf.is_zero()

    # membership agrees with naive graded linear algebra in low degree
    I = HomIdeal(gens)
    for d in (2, 3, 4):
        span_rows = []
        monos = monomials_of_degree(3, d)
        col = {exp: k for k, exp in enumerate(monos)}
        for g in gens:
            dg = g.homogeneous_degree
            if dg > d:
                continue
            for exp in monomials_of_degree(3, d - dg):
                prod = SparseForm.monomial(p, 3, exp) * g
                row = [0] * len(monos)
                for e2, c in prod.terms.items():
                    row[col[e2]] = c
                span_rows.append(row)
        rref, pivots = rref_mod_p(span_rows, p)
        pivot_rows = [rref[k] for k in range(len(pivots))]
        for probe in range(40):
            rng = random.Random(100 * d + probe)
            f = SparseForm(p, 3, {exp: rng.randrange(p) for exp in monos})
            row = [0] * len(monos)
            for e2, c in f.terms.items():
                row[col[e2]] = c
            # reduce the probe row against the rref span
            for k, pc in enumerate(pivots):
                if row[pc]:
                    c = row[pc]
                    row = [(a - c * b) % p for a, b
                           in zip(row, pivot_rows[k])]
            naive_member = not any(row)
            assert I.contains(f) == naive_member


# --- 12: point counts partition along the cover ----------------------------

def test_acceptance_12_point_count_partition(conic_V, conic_built):
    M, _ = conic_built
    report = oracle_check(conic_V, M, depth=3)
    assert report.passed
    counts = [len(lvl.points) for lvl in report.levels]
    assert counts == [4, 10, 28]
    for lvl in report.levels:
        on_h = sum(1 for rec in lvl.points if rec.u0_zero)
        off_h = sum(fib.size for fib in lvl.fibers
                    if not fib.image.coords[0].is_zero())
        in_fibers = sum(fib.size for fib in lvl.fibers)
        # fibers partition all points; the on-H points sit over u_0 = 0
        assert in_fibers == len(lvl.points)
        assert off_h == len(lvl.points) - on_h
