"""Homogeneous ideals over F_p: Buchberger's algorithm with cofactor
tracking, membership, and projective emptiness with Nullstellensatz
certificates (Rabinowitsch per chart).

Every returned Groebner basis is reduced and deterministic; every cofactor
identity is re-multiplied before it is returned, so callers never have to
trust the Groebner machinery itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .arith import make_extension
from .errors import ResourceBudgetExceeded
from .poly import ProjPoint, SparseForm, grevlex_key, var_name

DEFAULT_SPAIR_BUDGET = 200_000
DEFAULT_MONOMIAL_BUDGET = 10_000_000
DEFAULT_WITNESS_DEPTH = 3


class _Budget:
    def __init__(self, spairs=None, monomials=None):
        # defaults are read at call time so they can be overridden globally
        self.spairs_left = DEFAULT_SPAIR_BUDGET if spairs is None else spairs
        self.monomials_left = (DEFAULT_MONOMIAL_BUDGET if monomials is None
                               else monomials)

    def spend_spair(self):
        self.spairs_left -= 1
        if self.spairs_left < 0:
            raise ResourceBudgetExceeded("S-pair budget exhausted")

    def spend_monomials(self, n):
        self.monomials_left -= n
        if self.monomials_left < 0:
            raise ResourceBudgetExceeded("monomial budget exhausted")


def _lcm(e1, e2):
    return tuple(max(a, b) for a, b in zip(e1, e2))


def _div(e1, e2):
    return tuple(a - b for a, b in zip(e1, e2))


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


def _coprime(e1, e2):
    return all(a == 0 or b == 0 for a, b in zip(e1, e2))


def _reduce(f, basis, budget, track=True):
    """Full normal form of f modulo basis; returns (nf, quotients)."""
    p, nv = f.p, f.num_vars
    quot = [SparseForm.zero(p, nv) for _ in basis] if track else None
    nf_terms = {}
    r = f
    while not r.is_zero():
        budget.spend_monomials(1)
        re, rc = r.leading_term()
        for idx, (g, ge, gc) in enumerate(basis):
            if _divides(ge, re):
                c = rc * pow(gc, p - 2, p) % p
                mono = SparseForm.monomial(p, nv, _div(re, ge), c)
                budget.spend_monomials(len(g.terms))
                r = r - mono * g
                if track:
                    quot[idx] = quot[idx] + mono
                break
        else:
            nf_terms[re] = rc
            r = r - SparseForm.monomial(p, nv, re, rc)
    return SparseForm(p, nv, nf_terms), quot


def buchberger(generators, budget=None):
    """Reduced Groebner basis with representations.

    Returns a list of (g, rep) with g monic and rep the cofactors expressing
    g in terms of the original generators.
    """
    if budget is None:
        budget = _Budget()
    p = generators[0].p
    nv = generators[0].num_vars
    ngen = len(generators)

    def unit_rep(i):
        rep = [SparseForm.zero(p, nv) for _ in range(ngen)]
        rep[i] = SparseForm.constant(p, nv, 1)
        return rep

    basis = []  # (poly, lead exp, lead coeff)
    reps = []
    for i, g in enumerate(generators):
        if g.is_zero():
            continue
        basis.append((g, *g.leading_term()))
        reps.append(unit_rep(i))

    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}

    def pair_key(pr):
        i, j = pr
        return (sum(_lcm(basis[i][1], basis[j][1])), i, j)

    done_pairs = set()
    while pairs:
        i, j = min(pairs, key=pair_key)
        pairs.discard((i, j))
        done_pairs.add((i, j))
        gi, ei, ci = basis[i]
        gj, ej, cj = basis[j]
        if _coprime(ei, ej):
            continue
        lcm = _lcm(ei, ej)
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if _divides(basis[k][1], lcm):
                pik = (max(i, k), min(i, k))
                pjk = (max(j, k), min(j, k))
                if pik in done_pairs and pjk in done_pairs:
                    skip = True
                    break
        if skip:
            continue
        budget.spend_spair()
        mi = SparseForm.monomial(p, nv, _div(lcm, ei), pow(ci, p - 2, p))
        mj = SparseForm.monomial(p, nv, _div(lcm, ej), pow(cj, p - 2, p))
        s = mi * gi - mj * gj
        rep = [mi * a - mj * b for a, b in zip(reps[i], reps[j])]
        nf, quot = _reduce(s, basis, budget)
        if nf.is_zero():
            continue
        for idx, q in enumerate(quot):
            if not q.is_zero():
                rep = [a - q * b for a, b in zip(rep, reps[idx])]
        k = len(basis)
        basis.append((nf, *nf.leading_term()))
        reps.append(rep)
        pairs.update((k, t) for t in range(k))

    # minimalize: keep only elements whose lead no other kept lead divides
    order = sorted(range(len(basis)), key=lambda i: grevlex_key(basis[i][1]))
    keep = []
    for i in order:
        if not any(_divides(basis[j][1], basis[i][1]) for j in keep):
            keep.append(i)
    elems = [basis[i] for i in keep]
    elem_reps = [reps[i] for i in keep]
    # inter-reduce tails, tracking representations, until stable
    changed = True
    while changed:
        changed = False
        for i in range(len(elems)):
            others = elems[:i] + elems[i + 1:]
            nf, quot = _reduce(elems[i][0], others, budget)
            if nf != elems[i][0]:
                changed = True
                rep = list(elem_reps[i])
                other_reps = elem_reps[:i] + elem_reps[i + 1:]
                for q, orep in zip(quot, other_reps):
                    if not q.is_zero():
                        rep = [a - q * b for a, b in zip(rep, orep)]
                elems[i] = (nf, *nf.leading_term())
                elem_reps[i] = rep
    final = []
    for (g, e, c), rep in zip(elems, elem_reps):
        inv = pow(c, p - 2, p)
        final.append((g.scale(inv), [r.scale(inv) for r in rep]))
    final.sort(key=lambda t: grevlex_key(t[0].leading_term()[0]))
    return final


class HomIdeal:
    """A finitely generated ideal with a cached reduced Groebner basis."""

    def __init__(self, generators, budget=None):
        gens = [g for g in generators]
        if not gens:
            raise ValueError("ideal needs at least one generator")
        self.p = gens[0].p
        self.num_vars = gens[0].num_vars
        self.generators = gens
        self._budget = budget
        self._gb = None

    def _compute(self):
        if self._gb is None:
            nz = [g for g in self.generators if not g.is_zero()]
            if not nz:
                self._gb = []
            else:
                self._gb = buchberger(self.generators,
                                      self._budget or _Budget())
        return self._gb

    def groebner_basis(self):
        return [g for g, _ in self._compute()]

    def _gb_triples(self):
        return [(g, *g.leading_term()) for g, _ in self._compute()]

    def normal_form(self, f):
        nf, _ = _reduce(f, self._gb_triples(), self._budget or _Budget(),
                        track=False)
        return nf

    def contains(self, f):
        return self.normal_form(f).is_zero()

    def membership_with_cofactors(self, f) -> Optional[list]:
        """Cofactors c with f = sum c_j * generators[j], or None."""
        gb = self._compute()
        nf, quot = _reduce(f, self._gb_triples(), self._budget or _Budget())
        if not nf.is_zero():
            return None
        p, nv = self.p, self.num_vars
        cof = [SparseForm.zero(p, nv) for _ in self.generators]
        for q, (_, rep) in zip(quot, gb):
            if q.is_zero():
                continue
            cof = [a + q * b for a, b in zip(cof, rep)]
        # soundness: re-multiply before returning
        acc = SparseForm.zero(p, nv)
        for c, g in zip(cof, self.generators):
            acc = acc + c * g
        if acc != f:
            raise AssertionError("cofactor identity failed to re-multiply")
        return cof

    def is_trivial(self):
        """Whether the ideal is the whole ring (contains 1)."""
        one = SparseForm.constant(self.p, self.num_vars, 1)
        return self.contains(one)

    def join(self, other: "HomIdeal") -> "HomIdeal":
        return HomIdeal(self.generators + other.generators)

    def __repr__(self):
        return "Ideal(" + ", ".join(str(g) for g in self.generators) + ")"


@dataclass
class NullstellensatzCert:
    """An identity target = sum cofactor_j * generator_j, re-checkable by
    multiplication alone."""
    generators: list
    cofactors: list
    target: SparseForm
    chart: Optional[int] = None       # dehomogenized variable, if any
    aux_index: Optional[int] = None   # Rabinowitsch variable index, if any

    def verify(self) -> bool:
        p, nv = self.target.p, self.target.num_vars
        acc = SparseForm.zero(p, nv)
        for c, g in zip(self.cofactors, self.generators):
            acc = acc + c * g
        return acc == self.target and len(self.cofactors) == len(self.generators)


@dataclass
class EmptinessResult:
    empty: Optional[bool]                 # None = inconclusive witness search
    certificates: dict = field(default_factory=dict)   # chart -> cert
    witness: Optional[ProjPoint] = None
    failing_chart: Optional[int] = None


def _enumerate_affine(field_, nv):
    elts = list(field_.elements())
    idx = [0] * nv
    total = len(elts) ** nv
    for count in range(total):
        yield tuple(elts[i] for i in idx)
        for j in range(nv):
            idx[j] += 1
            if idx[j] < len(elts):
                break
            idx[j] = 0


def enumerate_projective(p, k, nv):
    """Points of P^{nv-1}(F_{p^k}), normalized, deterministic order."""
    field_ = make_extension(p, k)
    one = field_.one()
    zero = field_.zero()
    for last in range(nv - 1, -1, -1):
        free = last  # coordinates before the normalized 1
        for vals in _enumerate_affine(field_, free):
            coords = list(vals) + [one] + [zero] * (nv - 1 - last)
            yield ProjPoint(coords)


def projective_empty(ideal: HomIdeal, depth=DEFAULT_WITNESS_DEPTH,
                     budget=None) -> EmptinessResult:
    """Projective emptiness over the closure, chart-certified.

    Empty: a certificate 1 = sum c_j g_j(dehomogenized) for every chart.
    Nonempty: a witness point over F_{p^k}, k <= depth, when one exists at
    that depth; otherwise empty=None with the failing chart recorded.
    """
    p, nv = ideal.p, ideal.num_vars
    certs = {}
    failing = None
    for chart in range(nv):
        dehom = [g.dehomogenize(chart) for g in ideal.generators]
        aff = HomIdeal(dehom, budget=budget)
        one = SparseForm.constant(p, nv - 1, 1)
        cof = aff.membership_with_cofactors(one)
        if cof is None:
            failing = chart
            break
        certs[chart] = NullstellensatzCert(dehom, cof, one, chart=chart)
    if failing is None:
        return EmptinessResult(empty=True, certificates=certs)
    for k in range(1, depth + 1):
        for pt in enumerate_projective(p, k, nv):
            if all(g.evaluate(pt).is_zero() for g in ideal.generators):
                return EmptinessResult(empty=False, witness=pt,
                                       failing_chart=failing)
    return EmptinessResult(empty=None, failing_chart=failing)


def chart_unramified_empty(F_aff: SparseForm, rams, avoid: SparseForm,
                           depth=DEFAULT_WITNESS_DEPTH, budget=None):
    """Emptiness of {F_aff = 0, rams = 0, avoid != 0} on an affine chart,
    via the Rabinowitsch trick; rams may be one form or a sequence."""
    if isinstance(rams, SparseForm):
        rams = [rams]
    p, nv = F_aff.p, F_aff.num_vars
    gens = [F_aff.extend_vars(nv + 1)] + [r.extend_vars(nv + 1) for r in rams]
    y = SparseForm.variable(p, nv + 1, nv)
    rab = SparseForm.constant(p, nv + 1, 1) - y * avoid.extend_vars(nv + 1)
    gens.append(rab)
    ideal = HomIdeal(gens, budget=budget)
    one = SparseForm.constant(p, nv + 1, 1)
    cof = ideal.membership_with_cofactors(one)
    if cof is not None:
        return EmptinessResult(
            empty=True,
            certificates={None: NullstellensatzCert(gens, cof, one,
                                                    aux_index=nv)})
    for k in range(1, depth + 1):
        field_ = make_extension(p, k)
        for vals in _enumerate_affine(field_, nv):
            if not F_aff.evaluate_affine(vals).is_zero():
                continue
            if any(not r.evaluate_affine(vals).is_zero() for r in rams):
                continue
            if avoid.evaluate_affine(vals).is_zero():
                continue
            pt = tuple(vals)
            return EmptinessResult(empty=False, witness=pt)
    return EmptinessResult(empty=None)
