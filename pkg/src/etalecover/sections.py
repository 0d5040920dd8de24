"""Searches for sections with prescribed vanishing and non-vanishing.

"Sufficiently divisible" degrees become explicit scan schedules: degrees are
scanned in multiples of a step, with deterministic candidate selection first
and seeded randomized retries after, all under a hard degree cap that fails
loudly instead of looping forever.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dfield
from itertools import combinations_with_replacement

from .errors import DegreeCapExceeded, NotTransverse, PointOnDivisor
from .geometry import (VarietyInstance, jacobian_rows, matrix_rank_at,
                       on_divisor)
from .ideal import HomIdeal, projective_empty
from .poly import ProjPoint, SparseForm, grevlex_key


@dataclass
class SectionSearchConfig:
    base_degree_step: int = 1
    max_degree: int = 24
    rng_seed: int = 0
    max_retries: int = 32
    witness_depth: int = 3

    def rng(self):
        return random.Random(self.rng_seed)


# ---------------------------------------------------------------------------
# linear algebra over F_p
# ---------------------------------------------------------------------------

def rref_mod_p(matrix, p):
    """Row-reduce in place (copies); returns (rows, pivot column list)."""
    m = [row[:] for row in matrix]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def kernel_mod_p(matrix, ncols, p):
    """Basis of the null space of the matrix, deterministic order."""
    if not matrix:
        basis = []
        for i in range(ncols):
            v = [0] * ncols
            v[i] = 1
            basis.append(v)
        return basis
    rows, pivots = rref_mod_p(matrix, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for r, pcol in enumerate(pivots):
            v[pcol] = -rows[r][fcol] % p
        basis.append(v)
    return basis


def solve_mod_p(matrix, rhs, p):
    """A particular solution of matrix*x = rhs, or None."""
    ncols = len(matrix[0]) if matrix else 0
    aug = [row + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = rref_mod_p(aug, p)
    if ncols in pivots:
        return None  # inconsistent
    x = [0] * ncols
    for r, pcol in enumerate(pivots):
        x[pcol] = rows[r][-1]
    return x


def monomials_of_degree(num_vars, d):
    """Exponent vectors of total degree d, grevlex-descending."""
    out = []
    for combo in combinations_with_replacement(range(num_vars), d):
        e = [0] * num_vars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return out


# ---------------------------------------------------------------------------
# graded pieces
# ---------------------------------------------------------------------------

@dataclass
class GradedPiece:
    degree: int
    basis: list = dfield(default_factory=list)


def _orbit_representatives(points):
    reps = []
    seen = set()
    for P in points:
        if P in seen:
            continue
        reps.append(P)
        seen.update(P.orbit())
    return reps


def graded_piece(p, num_vars, l, vanish_ideals=(), vanish_points=()) -> GradedPiece:
    """Basis of degree-l forms inside each given ideal and vanishing at each
    given point (imposed on full Frobenius orbits via F_p-rational rows)."""
    monos = monomials_of_degree(num_vars, l)
    dim = len(monos)
    constraints = []
    for ideal in vanish_ideals:
        if ideal is None or ideal.is_trivial():
            continue  # unit ideal: no vanishing constraint
        nf_cols = [ideal.normal_form(SparseForm.monomial(p, num_vars, e))
                   for e in monos]
        support = sorted({m for nf in nf_cols for m in nf.terms},
                         key=grevlex_key, reverse=True)
        for mu in support:
            constraints.append([nf.terms.get(mu, 0) for nf in nf_cols])
    for P in _orbit_representatives(vanish_points):
        k = P.field.k
        vals = [SparseForm.monomial(p, num_vars, e).evaluate(P) for e in monos]
        for coord in range(k):
            constraints.append([v.coeffs[coord] for v in vals])
    kern = kernel_mod_p(constraints, dim, p)
    basis = [SparseForm(p, num_vars, {e: c for e, c in zip(monos, vec) if c})
             for vec in kern]
    return GradedPiece(degree=l, basis=[b for b in basis if not b.is_zero()])


def _evaluation_solve(basis, points, p, target_one=True):
    """Solve for a combination of basis forms taking value 1 at every orbit
    representative; returns the form or None."""
    reps = _orbit_representatives(points)
    rows, rhs = [], []
    for P in reps:
        k = P.field.k
        vals = [b.evaluate(P) for b in basis]
        for coord in range(k):
            rows.append([v.coeffs[coord] for v in vals])
            rhs.append(1 if (coord == 0 and target_one) else 0)
    sol = solve_mod_p(rows, rhs, p)
    if sol is None:
        return None
    acc = SparseForm.zero(p, basis[0].num_vars)
    for c, b in zip(sol, basis):
        if c:
            acc = acc + b.scale(c)
    return None if acc.is_zero() else acc


def _nonvanishing_scan(basis, points, p, cfg):
    """Deterministic-then-randomized scan for a combination nonvanishing at
    every point; the fallback when the all-ones system is unsolvable."""
    reps = _orbit_representatives(points)

    def good(f):
        return all(not f.evaluate(P).is_zero() for P in reps)

    for b in basis:
        if good(b):
            return b
    rng = cfg.rng()
    for _ in range(cfg.max_retries):
        coeffs = [rng.randrange(p) for _ in basis]
        acc = SparseForm.zero(p, basis[0].num_vars)
        for c, b in zip(coeffs, basis):
            if c:
                acc = acc + b.scale(c)
        if not acc.is_zero() and good(acc):
            return acc
    return None


def find_separating_section(vanish_ideals, avoid_points, cfg: SectionSearchConfig,
                            p, num_vars, step=None):
    """Smallest scheduled degree l and a degree-l form lying in every given
    ideal and nonvanishing at every avoid point."""
    ideals = [i for i in (vanish_ideals or []) if i is not None]
    for ideal in ideals:
        if ideal.is_trivial():
            continue
        for P in avoid_points:
            if on_divisor(ideal, P):
                raise PointOnDivisor(f"avoid point {P} lies on the "
                                     "prescribed vanishing locus")
    step = step or cfg.base_degree_step
    l = step
    while l <= cfg.max_degree:
        piece = graded_piece(p, num_vars, l, ideals, [])
        if piece.basis:
            if avoid_points:
                f = _evaluation_solve(piece.basis, avoid_points, p)
                if f is None:
                    f = _nonvanishing_scan(piece.basis, avoid_points, p, cfg)
            else:
                f = piece.basis[0]
            if f is not None:
                return l, f
        l += step
    raise DegreeCapExceeded(
        f"no separating section up to degree {cfg.max_degree}")


def find_covering_sections(V: VarietyInstance, locus: HomIdeal, vanish_points,
                           constrained_divisors, cfg: SectionSearchConfig,
                           step=None, min_multiplier=1):
    """n forms of one common degree, vanishing at the given points (and along
    their constrained divisors), with certified absence of common zeros on
    the locus.  Returns (l, forms, emptiness_result)."""
    n = V.n
    p, nv = V.p, V.num_vars
    step = step or cfg.base_degree_step
    constrained = list(constrained_divisors or [])
    constrained += [None] * (n - len(constrained))
    mult = min_multiplier
    while mult * step <= cfg.max_degree:
        l = mult * step
        bases = []
        for i in range(n):
            ideals = [constrained[i]] if constrained[i] is not None else []
            bases.append(graded_piece(p, nv, l, ideals, vanish_points).basis)
        if all(bases):
            found = _covering_candidates(V, locus, bases, cfg)
            if found is not None:
                forms, res = found
                return l, forms, res
        mult += 1
    raise DegreeCapExceeded(
        f"no covering sections up to degree {cfg.max_degree}")


def _covering_candidates(V, locus, bases, cfg):
    p = V.p
    n = len(bases)

    def check(forms):
        ideal = HomIdeal(list(locus.generators) + list(forms))
        res = projective_empty(ideal, depth=cfg.witness_depth)
        return res if res.empty else None

    # deterministic pass: aligned-index picks
    for idx in range(max(len(b) for b in bases)):
        forms = [bases[i][min(idx, len(bases[i]) - 1)] for i in range(n)]
        res = check(forms)
        if res is not None:
            return forms, res
    rng = cfg.rng()
    for _ in range(cfg.max_retries):
        forms = []
        for b in bases:
            acc = SparseForm.zero(p, V.num_vars)
            while acc.is_zero():
                acc = SparseForm.zero(p, V.num_vars)
                for c, f in zip((rng.randrange(p) for _ in b), b):
                    if c:
                        acc = acc + f.scale(c)
            forms.append(acc)
        res = check(forms)
        if res is not None:
            return forms, res
    return None


# ---------------------------------------------------------------------------
# Lemma-2.4-style unramified maps
# ---------------------------------------------------------------------------

@dataclass
class UnramifiedMapData:
    power: int                  # m: the u-degree of the map in alpha-units
    deltas: list                # the n forms of degree m * deg(alpha)
    betas: list                 # chosen numerators
    beta_powers: list           # j_i with f_i = beta_i / alpha^{j_i}
    gammas: list
    gamma_multiplier: int       # l' with m = 2 l'
    covering_emptiness: object  # certificate for no common zero on Z(alpha)


def _check_transversality(V: VarietyInstance, points):
    for P in points:
        gradF = [[d.evaluate_affine(P.coords) for d in V.F.gradient()]]
        picks = []
        base_rank = 1
        for D_i in V.extra_divisors:
            if not on_divisor(D_i, P):
                continue
            chosen = None
            for g in D_i.generators:
                row = [d.evaluate_affine(P.coords) for d in g.gradient()]
                if _field_rank(gradF + picks + [row]) > base_rank + len(picks):
                    chosen = row
                    break
            if chosen is None:
                raise NotTransverse(
                    f"divisor tangent to X (or to another divisor) at {P}")
            picks.append(chosen)
    return True


def _field_rank(rows):
    if not rows:
        return 0
    m = [row[:] for row in rows]
    rank = 0
    r = 0
    for c in range(len(m[0])):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        rank += 1
        r += 1
        if r == len(m):
            break
    return rank


def _cleared_row_at(alpha, beta, j, P):
    """(alpha * grad(beta) - j * beta * grad(alpha)) evaluated at P."""
    p = alpha.p
    a = alpha.evaluate_affine(P.coords)
    b = beta.evaluate_affine(P.coords)
    row = []
    for ga, gb in zip(alpha.gradient(), beta.gradient()):
        row.append(a * gb.evaluate_affine(P.coords)
                   - (j % p) * b * ga.evaluate_affine(P.coords))
    return row


def build_unramified_map(V: VarietyInstance, alpha: SparseForm,
                         cfg: SectionSearchConfig) -> UnramifiedMapData:
    """Forms delta_1..delta_n of one degree such that (alpha^m, delta_*) has
    no common zero on X and the induced map is unramified at every marked
    point, with delta_i vanishing along the i-th constrained divisor."""
    n = V.n
    p, nv = V.p, V.num_vars
    e = alpha.homogeneous_degree
    for P in V.S:
        if alpha.evaluate(P).is_zero():
            raise PointOnDivisor(f"alpha vanishes at marked point {P}")
    if V.extra_divisors:
        _check_transversality(V, V.S)

    constrained = list(V.extra_divisors)
    constrained += [None] * (n - len(constrained))

    # pick numerators beta_i whose functions beta_i / alpha^{j_i} span the
    # cotangent space of X at every marked point, greedily by rank gain
    betas, jays = [], []
    state = {P: [[d.evaluate_affine(P.coords) for d in V.F.gradient()]]
             for P in V.S}

    def try_candidate(beta, j):
        rows = {P: _cleared_row_at(alpha, beta, j, P) for P in V.S}
        for P in V.S:
            if _field_rank(state[P] + [rows[P]]) != len(state[P]) + 1:
                return False
        for P in V.S:
            state[P].append(rows[P])
        return True

    for i in range(n):
        chosen = None
        for j in (1, 2):
            ideals = [constrained[i]] if constrained[i] is not None else []
            basis = graded_piece(p, nv, j * e, ideals, []).basis
            for beta in basis:
                if try_candidate(beta, j):
                    chosen = (beta, j)
                    break
            if chosen is None and basis:
                rng = cfg.rng()
                for _ in range(cfg.max_retries):
                    acc = SparseForm.zero(p, nv)
                    for c, b in zip((rng.randrange(p) for _ in basis), basis):
                        if c:
                            acc = acc + b.scale(c)
                    if not acc.is_zero() and try_candidate(acc, j):
                        chosen = (acc, j)
                        break
            if chosen:
                break
        if chosen is None:
            raise DegreeCapExceeded(
                "no cotangent-spanning numerator up to degree "
                f"{2 * e} at the marked points")
        betas.append(chosen[0])
        jays.append(chosen[1])

    # gammas: no common zero on Z(alpha), vanishing on S and constrained
    min_mult = max(1, -(-max(jays) // 2))  # need 2 l' >= j_i
    lp, gammas, cover_res = find_covering_sections(
        V, HomIdeal([V.F, alpha]), V.S, constrained, cfg,
        step=e, min_multiplier=min_mult)
    lprime = lp // e
    m = 2 * lprime
    deltas = [beta * alpha ** (2 * lprime - j) + gamma * gamma
              for beta, j, gamma in zip(betas, jays, gammas)]

    # final unramifiedness check at the marked points
    rows = jacobian_rows(V.F, [alpha ** m] + deltas)
    for P in V.S:
        if matrix_rank_at(rows, P) != n + 1:
            raise DegreeCapExceeded(
                f"assembled map fails the rank test at {P}")
    return UnramifiedMapData(power=m, deltas=deltas, betas=betas,
                             beta_powers=jays, gammas=gammas,
                             gamma_multiplier=lprime,
                             covering_emptiness=cover_res)
