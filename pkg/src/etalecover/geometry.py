"""Instance model: hypersurface, smooth/singular loci, divisor data and
ramification loci of maps defined by tuples of forms.

Unramifiedness is read off a homogeneous Jacobian-style matrix.  For a map
given by forms (a_0, ..., a_n) of one common degree on X = V(F), the matrix
has rows grad(F) and a_0*grad(a_i) - a_i*grad(a_0).  At a point of X where
some coordinate x_c is nonzero, every row is orthogonal to the coordinate
vector (Euler's identity, valid for every characteristic), so the rank of
this matrix equals the rank of the affine chart Jacobian with column c
deleted: full rank n+1 exactly at the smooth points off a_0 = 0 where the
induced map to affine n-space is unramified.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from itertools import combinations
from typing import Optional

from .errors import ComponentCollapse
from .ideal import HomIdeal
from .poly import ProjPoint, SparseForm, is_squarefree, multivariate_gcd


@dataclass
class Chart:
    """Affine chart x_i = 1 of the ambient projective space."""
    index: int

    def dehomogenize(self, f: SparseForm) -> SparseForm:
        return f.dehomogenize(self.index)


@dataclass
class VarietyInstance:
    """Hypersurface X = V(F) in P^{n+1} with divisor and marked-point data."""
    p: int
    F: SparseForm
    divisor_D: Optional[HomIdeal] = None
    extra_divisors: list = dfield(default_factory=list)
    S: list = dfield(default_factory=list)

    @property
    def num_vars(self):
        return self.F.num_vars

    @property
    def n(self):
        """Dimension of X."""
        return self.F.num_vars - 2


def on_divisor(ideal: HomIdeal, point: ProjPoint) -> bool:
    return all(g.evaluate(point).is_zero() for g in ideal.generators)


def smooth_at(F: SparseForm, point: ProjPoint) -> bool:
    return any(not d.evaluate(point).is_zero() for d in F.gradient())


def validate_instance(V: VarietyInstance):
    """Diagnostics list; empty means the instance satisfies all hypotheses."""
    diags = []
    if V.F.is_zero():
        return ["defining form is zero"]
    if V.F.homogeneous_degree is None:
        return ["defining form is not homogeneous"]
    if not is_squarefree(V.F):
        diags.append("defining form is not squarefree "
                     "(X not geometrically reduced)")
    for P in V.S:
        if not V.F.evaluate(P).is_zero():
            diags.append(f"marked point {P} does not lie on X")
            continue
        if not smooth_at(V.F, P):
            diags.append(f"marked point {P} is a singular point of X")
        if V.divisor_D is not None and on_divisor(V.divisor_D, P):
            diags.append(f"marked point {P} lies on the divisor D")
    in_s = set(V.S)
    for P in V.S:
        if P.frobenius() not in in_s:
            diags.append(f"marked points not closed under Frobenius at {P}")
            break
    for D_i in V.extra_divisors:
        if D_i.num_vars != V.num_vars:
            diags.append("constrained divisor in wrong variable count")
    return diags


def singular_locus(V: VarietyInstance) -> HomIdeal:
    return HomIdeal([V.F] + V.F.gradient())


def _det(rows):
    """Determinant of a small square matrix of SparseForms (Laplace)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    p, nv = rows[0][0].p, rows[0][0].num_vars
    acc = SparseForm.zero(p, nv)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[r[c] for c in range(n) if c != j] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def jacobian_rows(F: SparseForm, map_forms):
    """Rows grad(F), a_0*grad(a_i) - a_i*grad(a_0) (denominators cleared)."""
    a0 = map_forms[0]
    g0 = a0.gradient()
    rows = [F.gradient()]
    for a in map_forms[1:]:
        ga = a.gradient()
        rows.append([a0 * ga[j] - a * g0[j] for j in range(F.num_vars)])
    return rows


def maximal_minors(rows):
    """All r x r minors of an r x c matrix (c >= r), column-subset order."""
    r, c = len(rows), len(rows[0])
    out = []
    for cols in combinations(range(c), r):
        out.append(_det([[row[j] for j in cols] for row in rows]))
    return out


@dataclass
class RamificationData:
    """Failure-of-unramifiedness locus for a candidate map on X."""
    ideal: HomIdeal
    map_forms: list
    minors: list


def ramification_locus(V: VarietyInstance, map_forms) -> RamificationData:
    """The locus in X where the map (a_0 : ... : a_n) fails to be
    unramified over the chart a_0 != 0; contains the singular locus."""
    a0 = map_forms[0]
    degs = {a.homogeneous_degree for a in map_forms}
    if len(degs) != 1 or None in degs:
        raise ValueError("map forms must share one homogeneous degree")
    if multivariate_gcd(V.F, a0).degree > 0:
        raise ComponentCollapse("a_0 vanishes on a component of X")
    minors = maximal_minors(jacobian_rows(V.F, map_forms))
    return RamificationData(ideal=HomIdeal([V.F] + minors),
                            map_forms=list(map_forms), minors=minors)


def chart_ramification_ideal(F_aff: SparseForm, h: SparseForm) -> HomIdeal:
    """Affine-chart ramification ideal of a regular function h on the plane
    curve F_aff = 0: generated by F_aff and h_x F_y - h_y F_x."""
    if F_aff.num_vars != 2:
        raise ValueError("chart helper is for plane-curve charts")
    fx, fy = F_aff.partial_derivative(0), F_aff.partial_derivative(1)
    hx, hy = h.partial_derivative(0), h.partial_derivative(1)
    return HomIdeal([F_aff, hx * fy - hy * fx])


def matrix_rank_at(rows, point: ProjPoint) -> int:
    """Rank over the residue field of the rows evaluated at the point."""
    vals = [[entry.evaluate_affine(point.coords) for entry in row]
            for row in rows]
    rank = 0
    cols = len(vals[0]) if vals else 0
    pivot_col = 0
    m = [row[:] for row in vals]
    r = 0
    while r < len(m) and pivot_col < cols:
        piv = None
        for i in range(r, len(m)):
            if not m[i][pivot_col].is_zero():
                piv = i
                break
        if piv is None:
            pivot_col += 1
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][pivot_col].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][pivot_col].is_zero():
                c = m[i][pivot_col]
                m[i] = [a - c * b for a, b in zip(m[i], m[r])]
        r += 1
        pivot_col += 1
        rank += 1
    return rank


def unramified_at(V: VarietyInstance, map_forms, point: ProjPoint) -> bool:
    """Full Jacobian rank at a (smooth) point with a_0 nonzero there."""
    rows = jacobian_rows(V.F, map_forms)
    return matrix_rank_at(rows, point) == V.n + 1
