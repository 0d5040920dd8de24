"""Independent verification.

Two unrelated safety nets live here.  check_certificate re-multiplies every
polynomial identity in a Certificate with nothing but ring arithmetic — no
Groebner machinery, no trust in the construction.  oracle_check enumerates
all points of X over small extension fields and tests etaleness, divisor
images and fiber structure pointwise; it is a falsifier, not a prover.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Optional

from .arith import FieldElement, make_extension
from .errors import BudgetExceeded, OracleViolation
from .geometry import jacobian_rows, maximal_minors, on_divisor
from .ideal import enumerate_projective
from .poly import ProjPoint, SparseForm, _coeffs_in

DEFAULT_POINT_BUDGET = 2_000_000

FLATNESS_NOTE = (
    "flatness is not certified computationally: the source is a hypersurface"
    " (hence Cohen-Macaulay of pure dimension n) and the target P^n is"
    " regular, so a finite surjection is automatically flat (miracle"
    " flatness); etale = finite + unramified then needs no further check")


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    """Everything needed to re-verify a cover by multiplication alone."""
    p: int
    ledger: object                 # carries p, e, m, r, l
    finiteness: list               # NullstellensatzCert per chart: (F, u_0..u_n)
    etale_off_H: list              # NullstellensatzCert per chart:
    #                                (F_aff, Jacobian minors, 1 - y*u_0_aff)
    D_to_H: Optional[list]         # cofactors: u_0 = c_0 F + sum c_j g_j
    S_off_H: list                  # (point, u_0(point)) records
    local_memberships: list        # (i, cofactors): u_{i+1} = sum c_j g_j
    flatness_note: str = FLATNESS_NOTE


@dataclass
class CheckResult:
    passed: bool
    failures: list = dfield(default_factory=list)

    @property
    def first_failure(self):
        return self.failures[0] if self.failures else None


def _identity_holds(cofactors, generators, target):
    p, nv = target.p, target.num_vars
    acc = SparseForm.zero(p, nv)
    for c, g in zip(cofactors, generators):
        acc = acc + c * g
    return acc == target and len(cofactors) == len(generators)


def check_certificate(C: Certificate, M, V) -> CheckResult:
    """Re-multiply every identity in C against recomputed generators."""
    failures = []
    p, nv = V.p, V.num_vars
    n = nv - 2
    led = C.ledger
    one_aff = SparseForm.constant(p, nv - 1, 1)

    # degree ledger
    ok = (C.p == p == led.p and led.l >= 2
          and M.s.homogeneous_degree == led.e
          and all(f.homogeneous_degree == led.m * led.e for f in M.s_list)
          and M.t.homogeneous_degree == led.r * led.m * led.e
          and all(f.homogeneous_degree == led.l * led.r * led.m * led.e
                  for f in M.t_list)
          and len(M.u) == n + 1 and len(M.s_list) == n == len(M.t_list)
          and all(u.homogeneous_degree == led.common_degree for u in M.u))
    if not ok:
        failures.append("ledger")

    # assembly identities
    big_m = led.m * (p * led.r - 1)
    if M.u[0] != M.t ** (p * led.l):
        failures.append("assembly-u0")
    mid = M.s ** big_m * M.t ** (p * (led.l - 1))
    for i, (si, ti, ui) in enumerate(zip(M.s_list, M.t_list, M.u[1:]), 1):
        if ui != si * mid + ti ** p:
            failures.append(f"assembly-u{i}")

    # finiteness: per-chart 1 in (F, u_0, ..., u_n)
    by_chart = {c.chart: c for c in C.finiteness}
    for chart in range(nv):
        cert = by_chart.get(chart)
        name = f"finiteness-chart-{chart}"
        if cert is None:
            failures.append(name)
            continue
        gens = [V.F.dehomogenize(chart)] + [u.dehomogenize(chart)
                                            for u in M.u]
        if (cert.generators != gens or cert.target != one_aff
                or not _identity_holds(cert.cofactors, gens, one_aff)):
            failures.append(name)

    # etaleness off H: per-chart Rabinowitsch over the Jacobian minors
    minors = maximal_minors(jacobian_rows(V.F, M.u))
    one_ext = SparseForm.constant(p, nv, 1)
    y = SparseForm.variable(p, nv, nv - 1)
    by_chart = {c.chart: c for c in C.etale_off_H}
    for chart in range(nv):
        cert = by_chart.get(chart)
        name = f"etale-chart-{chart}"
        if cert is None:
            failures.append(name)
            continue
        rab = one_ext - y * M.u[0].dehomogenize(chart).extend_vars(nv)
        gens = ([V.F.dehomogenize(chart).extend_vars(nv)]
                + [mnr.dehomogenize(chart).extend_vars(nv) for mnr in minors]
                + [rab])
        if (cert.generators != gens or cert.target != one_ext
                or not _identity_holds(cert.cofactors, gens, one_ext)):
            failures.append(name)

    # D maps into H: u_0 in (F) + I(D)
    if V.divisor_D is not None:
        gens = [V.F] + list(V.divisor_D.generators)
        if C.D_to_H is None or not _identity_holds(C.D_to_H, gens, M.u[0]):
            failures.append("d-to-h")

    # S stays off H
    recorded = {P for P, _ in C.S_off_H}
    if any(P not in recorded for P in V.S):
        failures.append("s-off-h")
    else:
        for P, val in C.S_off_H:
            if val.is_zero() or M.u[0].evaluate(P) != val:
                failures.append("s-off-h")
                break

    # local mode: u_{i+1} vanishes along the i-th constrained divisor
    by_index = dict(C.local_memberships)
    for i, D_i in enumerate(V.extra_divisors):
        name = f"local-u{i + 1}"
        cof = by_index.get(i)
        if cof is None or not _identity_holds(cof, D_i.generators,
                                              M.u[i + 1]):
            failures.append(name)

    if not C.flatness_note:
        failures.append("flatness-note")
    return CheckResult(passed=not failures, failures=failures)


# ---------------------------------------------------------------------------
# point enumeration
# ---------------------------------------------------------------------------

def enumerate_points(V, k, budget=DEFAULT_POINT_BUDGET):
    """All points of X(F_{p^k}) in deterministic normalized order."""
    nv = V.num_vars
    q = V.p ** k
    candidates = (q ** nv - 1) // (q - 1)
    if candidates > budget:
        raise BudgetExceeded(
            f"{candidates} candidate points exceed the budget {budget}")
    return [P for P in enumerate_projective(V.p, k, nv)
            if V.F.evaluate(P).is_zero()]


# ---------------------------------------------------------------------------
# univariate helpers over an extension field (for fiber analysis)
# ---------------------------------------------------------------------------

def _utrim(f):
    while f and f[-1].is_zero():
        f.pop()
    return f


def _udeg(f):
    return len(f) - 1


def _udivmod(f, g):
    f = list(f)
    dg = _udeg(g)
    inv = g[-1].inverse()
    q = [g[-1].field.zero()] * max(0, len(f) - dg)
    while _udeg(f) >= dg and f:
        d = _udeg(f) - dg
        c = f[-1] * inv
        q[d] = c
        for i, gc in enumerate(g):
            f[i + d] = f[i + d] - c * gc
        _utrim(f)
    return q, f


def _ugcd(f, g):
    f, g = list(f), list(g)
    while g:
        _, r = _udivmod(f, g)
        f, g = g, r
    return f


def _uderiv(f, p):
    out = []
    for i in range(1, len(f)):
        out.append(f[i] * f[i].field.element(i % p))
    return _utrim(out)


def _uresultant(f, g):
    """res(f, g) over a field, by the Euclidean remainder formula."""
    field_ = f[0].field
    res = field_.one()
    sign = 1
    f, g = list(f), list(g)
    while True:
        if not g:
            return field_.zero() if _udeg(f) > 0 else res * field_.element(sign)
        if _udeg(g) == 0:
            return res * field_.element(sign) * g[0] ** _udeg(f)
        _, r = _udivmod(f, g)
        if (_udeg(f) * _udeg(g)) % 2:
            sign = -sign
        res = res * g[-1] ** (_udeg(f) - _udeg(r))
        f, g = g, r


def _usquarefree(f, p):
    """Squarefree over the algebraic closure (coefficients in a perfect
    field)."""
    if _udeg(f) <= 0:
        return True
    d = _uderiv(f, p)
    if not d:
        return False  # a p-th power
    return _udeg(_ugcd(f, d)) == 0


def _lagrange(xs, ys, field_):
    """Coefficient list of the interpolating polynomial, low to high.

    Quadratic-time: build the master product once, then peel off each
    factor (X - x_i) by synthetic division.
    """
    n = len(xs)
    full = [field_.one()]          # prod_j (X - x_j), low to high
    for xj in xs:
        nxt = [field_.zero()] + full
        for k in range(len(full)):
            nxt[k] = nxt[k] - xj * full[k]
        full = nxt
    coeffs = [field_.zero()] * n
    for i in range(n):
        xi = xs[i]
        num = [field_.zero()] * n  # full / (X - x_i)
        carry = full[n]
        for k in range(n - 1, -1, -1):
            num[k] = carry
            carry = full[k] + xi * carry
        denom = field_.zero()      # num(x_i) = prod_{j != i} (x_i - x_j)
        for c in reversed(num):
            denom = denom * xi + c
        scale = ys[i] * denom.inverse()
        for k in range(n):
            coeffs[k] = coeffs[k] + scale * num[k]
    return coeffs


# ---------------------------------------------------------------------------
# fiber elimination (curves only)
# ---------------------------------------------------------------------------

class FiberFamily:
    """R(T; x) with the property that for an affine image value a, the fiber
    of [u_0 : u_1] over [1 : a] is cut out by R(a; x) (chart y = 1), computed
    once by interpolation of univariate resultants eliminating z.

    What is interpolated is the padded Sylvester determinant, a polynomial
    in T even where the z-leading coefficient of u_1 - T u_0 vanishes; at
    specialization the spurious factor lc_z(F)^gap is divided back out.

    coeffs[j][i] is the F_p coefficient of x^j T^i.
    """

    def __init__(self, p, coeffs, generic_degree, lcf=None,
                 z_top=None, d2=0):
        self.p = p
        self.coeffs = coeffs
        self.generic_degree = generic_degree
        self.lcf = lcf        # lc_z(F)(x, 1) coefficient ints, low-to-high
        self.z_top = z_top    # (u1_zcoeffs, u0_zcoeffs): dicts i -> int list
        self.d2 = d2

    def specialize(self, a: FieldElement):
        """Univariate fiber polynomial over a's field, low-to-high list."""
        field_ = a.field
        out = []
        for tc in self.coeffs:
            acc = field_.zero()
            for c in reversed(tc):
                acc = acc * a + field_.element(c)
            out.append(acc)
        out = _utrim(out)
        if self.z_top is None or not out:
            return out
        # divide out lc_z(F)^gap, gap = z-degree drop of u_1 - a*u_0
        u1z, u0z = self.z_top
        gap = self.d2
        for i in range(self.d2, -1, -1):
            c1 = u1z.get(i, [])
            c0 = u0z.get(i, [])
            width = max(len(c1), len(c0))
            coeffs = [field_.element(c1[j] if j < len(c1) else 0)
                      - a * field_.element(c0[j] if j < len(c0) else 0)
                      for j in range(width)]
            if any(not c.is_zero() for c in coeffs):
                gap = self.d2 - i
                break
        for _ in range(gap):
            lcf = [field_.element(c) for c in self.lcf]
            out, rem = _udivmod(out, _utrim(lcf))
            if rem:
                raise AssertionError("leading-coefficient division inexact")
        return _utrim(out)


def fiber_family(F: SparseForm, u0: SparseForm, u1: SparseForm):
    """Build the fiber family for a plane curve; returns None when the
    analysis is unavailable (T-degree too large for prime-field sampling)."""
    p = F.p
    if F.num_vars != 3:
        return None
    d1 = F.degree_in(2)
    d2 = max(u0.degree_in(2), u1.degree_in(2))
    if d2 == 0:
        # G = u1 - T*u0 is already z-free: it is its own elimination
        coeffs = {}
        for src, tpow in ((u1, 0), (u0, 1)):
            for exp, c in src.terms.items():
                row = coeffs.setdefault(exp[0], [0, 0])
                row[tpow] = (row[tpow] + (c if tpow == 0 else -c)) % p
        deg = max((j for j, row in coeffs.items() if any(row)), default=0)
        out = [coeffs.get(j, [0, 0]) for j in range(deg + 1)]
        return FiberFamily(p, out, deg)
    if d1 == 0:
        coeffs = [[c % p] for c in
                  [F.terms.get((j, F.homogeneous_degree - j, 0), 0)
                   for j in range(F.homogeneous_degree + 1)]]
        return FiberFamily(p, coeffs, F.homogeneous_degree)
    if d1 + 1 > p:
        return None  # T-samples must come from the prime field

    D = F.homogeneous_degree * u0.homogeneous_degree
    kE = 1
    while p ** kE < 2 * D + 4:
        kE += 1
    field_ = make_extension(p, kE)
    elements = list(field_.elements())

    fcoeffs = _coeffs_in(F, 2)
    u0coeffs = _coeffs_in(u0, 2)
    u1coeffs = _coeffs_in(u1, 2)

    def eval_xy(form2, xi):
        # form2 is z-free; evaluate at (x, y) = (xi, 1)
        one = field_.one()
        return form2.evaluate_affine((xi, one, one))

    tsamples = list(range(d1 + 1))
    per_t = []
    for t in tsamples:
        tval = field_.element(t)
        xs, ys = [], []
        for xi in elements:
            fz = [eval_xy(fcoeffs.get(i, SparseForm.zero(p, 3)), xi)
                  for i in range(d1 + 1)]
            gz = []
            for i in range(d2 + 1):
                v1 = eval_xy(u1coeffs.get(i, SparseForm.zero(p, 3)), xi)
                v0 = eval_xy(u0coeffs.get(i, SparseForm.zero(p, 3)), xi)
                gz.append(v1 - tval * v0)
            if fz[-1].is_zero():
                continue  # lc_z(F) drop: skip this x-sample
            # padded Sylvester determinant: lc(F)^{z-degree gap} * res
            gz = _utrim(gz)
            if not gz:
                val = field_.zero()
            else:
                val = fz[-1] ** (d2 - _udeg(gz)) * _uresultant(fz, gz)
            xs.append(xi)
            ys.append(val)
            if len(xs) == D + 1:
                break
        if len(xs) < D + 1:
            return None
        per_t.append(_lagrange(xs, ys, field_))
    tnodes = [field_.element(t) for t in tsamples]
    coeffs = []
    for j in range(D + 1):
        col = [per_t[i][j] if j < len(per_t[i]) else field_.zero()
               for i in range(len(tsamples))]
        tpoly = _lagrange(tnodes, col, field_)
        ints = []
        for c in tpoly:
            if any(c.coeffs[1:]):
                raise AssertionError("interpolated coefficient left F_p")
            ints.append(c.coeffs[0])
        coeffs.append(ints)
    deg = max((j for j in range(D + 1) if any(coeffs[j])), default=0)

    def zvec(cmap):
        out = {}
        for i, form2 in cmap.items():
            dx = form2.degree_in(0)
            vec = [0] * (dx + 1)
            for exp, c in form2.terms.items():
                vec[exp[0]] = c  # binary form: one y-power per x-power
            out[i] = vec
        return out

    lcform = fcoeffs[d1]
    lcf = [0] * (lcform.degree_in(0) + 1)
    for exp, c in lcform.terms.items():
        lcf[exp[0]] = c
    return FiberFamily(p, coeffs[:deg + 1], deg, lcf=lcf,
                       z_top=(zvec(u1coeffs), zvec(u0coeffs)), d2=d2)


# ---------------------------------------------------------------------------
# the oracle
# ---------------------------------------------------------------------------

@dataclass
class Violation:
    clause: str            # ramified-off-H | base-point | D-not-into-H | ...
    point: object
    k: Optional[int] = None
    detail: str = ""
    off_H: bool = False    # whether the witness lies off the hyperplane H

    def __str__(self):
        where = f" (k={self.k})" if self.k is not None else ""
        tail = f": {self.detail}" if self.detail else ""
        return f"{self.clause} at {self.point}{where}{tail}"


@dataclass
class PointRecord:
    point: ProjPoint
    u0_zero: bool
    jac_rank: int
    image: Optional[ProjPoint]     # None only at a common zero of the u_i


@dataclass
class FiberRecord:
    image: ProjPoint
    size: int
    poly_degree: Optional[int] = None
    squarefree: Optional[bool] = None
    full_degree: Optional[bool] = None


@dataclass
class OracleLevel:
    k: int
    points: list
    fibers: list


@dataclass
class OracleReport:
    depth: int
    levels: list
    violations: list

    @property
    def passed(self):
        return not self.violations

    @property
    def off_H_violations(self):
        return [v for v in self.violations if v.off_H]


def _value_rank(rows):
    """Rank of a matrix of FieldElements by Gaussian elimination."""
    m = [row[:] for row in rows]
    rank = 0
    r = 0
    for c in range(len(m[0]) if m else 0):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()),
                   None)
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


def oracle_check(V, M, depth=3, strict=False,
                 budget=DEFAULT_POINT_BUDGET) -> OracleReport:
    """Brute-force cross-check of the cover M over F_{p^k}, k <= depth."""
    u = list(M.u) if hasattr(M, "u") else list(M)
    n = len(u) - 1
    # the Jacobian rank is evaluated factor-wise: rows grad(F) and
    # u_0 grad(u_i) - u_i grad(u_0), assembled from point values instead of
    # expanded product polynomials
    grad_f = V.F.gradient()
    grad_u = [ui.gradient() for ui in u]

    def rank_at(P, vals):
        rows = [[d.evaluate_affine(P.coords) for d in grad_f]]
        g0 = [d.evaluate_affine(P.coords) for d in grad_u[0]]
        for i in range(1, len(u)):
            rows.append([vals[0] * grad_u[i][j].evaluate_affine(P.coords)
                         - vals[i] * g0[j] for j in range(V.num_vars)])
        return _value_rank(rows)

    violations = []
    family = fiber_family(V.F, u[0], u[1]) if n == 1 else None

    for P in V.S:
        if u[0].evaluate(P).is_zero():
            violations.append(Violation("S-meets-H", P))

    levels = []
    for k in range(1, depth + 1):
        pts = enumerate_points(V, k, budget)
        records = []
        fiber_points = {}
        for P in pts:
            vals = [ui.evaluate(P) for ui in u]
            if all(v.is_zero() for v in vals):
                violations.append(Violation("base-point", P, k))
                records.append(PointRecord(P, True, 0, None))
                continue
            image = ProjPoint(vals)
            u0z = vals[0].is_zero()
            rank = rank_at(P, vals)
            if not u0z and rank != n + 1:
                violations.append(Violation(
                    "ramified-off-H", P, k,
                    detail=f"rank {rank} < {n + 1}", off_H=True))
            if (V.divisor_D is not None and on_divisor(V.divisor_D, P)
                    and not u0z):
                violations.append(Violation("D-not-into-H", P, k,
                                            off_H=True))
            records.append(PointRecord(P, u0z, rank, image))
            fiber_points.setdefault(image, []).append(P)
        fibers = []
        for image in fiber_points:
            rec = FiberRecord(image=image, size=len(fiber_points[image]))
            off_H = not image.coords[0].is_zero()
            if off_H and family is not None and n == 1:
                a = image.coords[1] * image.coords[0].inverse()
                poly = family.specialize(a)
                rec.poly_degree = _udeg(poly)
                rec.squarefree = _usquarefree(poly, V.p)
                rec.full_degree = _udeg(poly) == family.generic_degree
            fibers.append(rec)
        fibers.sort(key=lambda r: str(r.image))
        if sum(r.size for r in fibers) != len(
                [r for r in records if r.image is not None]):
            violations.append(Violation("partition-mismatch", "-", k))
        levels.append(OracleLevel(k=k, points=records, fibers=fibers))

    report = OracleReport(depth=depth, levels=levels, violations=violations)
    if strict and violations:
        raise OracleViolation(str(violations[0]))
    return report


def format_report(report: OracleReport) -> str:
    """Tabular text serialization of an oracle run."""
    lines = [f"oracle depth {report.depth}: "
             + ("PASS" if report.passed else
                f"{len(report.violations)} violation(s)")]
    for v in report.violations:
        lines.append(f"violation: {v}")
    lines.append("")
    for lvl in report.levels:
        lines.append(f"[k={lvl.k}] {len(lvl.points)} point(s) on X")
        lines.append("point | u0=0 | rank | image")
        for rec in lvl.points:
            lines.append(f"{rec.point} | {'yes' if rec.u0_zero else 'no'} | "
                         f"{rec.jac_rank} | {rec.image}")
        lines.append("image | fiber size | fiber poly deg | squarefree")
        for f in lvl.fibers:
            deg = "-" if f.poly_degree is None else str(f.poly_degree)
            sf = "-" if f.squarefree is None else ("yes" if f.squarefree
                                                   else "no")
            lines.append(f"{f.image} | {f.size} | {deg} | {sf}")
    return "\n".join(lines) + "\n"
