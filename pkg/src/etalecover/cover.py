"""Top-level constructions: the global cover etale away from the hyperplane
at infinity, and the local variant that sends chosen divisors to coordinate
hyperplanes.

The output tuple is u_0 = t^{pl}, u_i = s_i s^{m(pr-1)} t^{p(l-1)} + t_i^p.
Every t-power carries an exponent divisible by p, so those factors have zero
gradient; that is what confines all ramification of the assembled map to the
fibre over u_0 = 0.  Certificates are built constructively from small-degree
memberships — raising identities to p-th and l-th powers instead of running
Groebner eliminations on the large u-forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import (ComponentCoverageFailed, DegreeMismatch,
                     UnsupportedRequiresBlowup)
from .geometry import (VarietyInstance, jacobian_rows, maximal_minors,
                       on_divisor, smooth_at, validate_instance)
from .ideal import HomIdeal, NullstellensatzCert, enumerate_projective
from .poly import SparseForm, multivariate_gcd
from .sections import (SectionSearchConfig, build_unramified_map,
                       find_covering_sections, find_separating_section)
from .verify import Certificate, FLATNESS_NOTE

MAX_AUGMENTATION_ROUNDS = 5


@dataclass
class DegreeLedger:
    """The integers behind the common degree p*l*r*m*e of the u-tuple."""
    p: int
    e: int   # degree of s
    m: int   # s_i have degree m*e
    r: int   # t has degree r*m*e
    l: int   # t_i have degree l*r*m*e; l >= 2

    @property
    def common_degree(self):
        return self.p * self.l * self.r * self.m * self.e


@dataclass
class CoverMorphism:
    u: list                      # u_0 ... u_n, one common degree
    ledger: DegreeLedger
    s: SparseForm
    s_list: list
    t: SparseForm
    t_list: list

    @property
    def n(self):
        return len(self.u) - 1


@dataclass
class LocalCover:
    morphism: CoverMorphism
    constrained_divisors: list   # D_i mapped to the i-th coordinate hyperplane


def assemble_u_tuple(s, s_list, t, t_list, p, l, r, m) -> CoverMorphism:
    """Pure symbolic assembly of the u-tuple; degree ledger is enforced."""
    if l < 2:
        raise DegreeMismatch("the construction requires l >= 2")
    e = s.homogeneous_degree
    if e is None:
        raise DegreeMismatch("s is not homogeneous")
    for name, form, want in (
            [("s_%d" % (i + 1), f, m * e) for i, f in enumerate(s_list)]
            + [("t", t, r * m * e)]
            + [("t_%d" % (i + 1), f, l * r * m * e)
               for i, f in enumerate(t_list)]):
        if form.homogeneous_degree != want:
            raise DegreeMismatch(
                f"{name} has degree {form.homogeneous_degree}, ledger "
                f"requires {want}")
    u0 = t ** (p * l)
    mid = s ** (m * (p * r - 1)) * t ** (p * (l - 1))
    u = [u0] + [si * mid + ti ** p for si, ti in zip(s_list, t_list)]
    return CoverMorphism(u=u, ledger=DegreeLedger(p=p, e=e, m=m, r=r, l=l),
                         s=s, s_list=list(s_list), t=t, t_list=list(t_list))


def reduced_jacobian_minors(F, s, s_list, m):
    """Maximal minors of [grad F; s*grad(s_i) - m*s_i*grad(s)].

    These are the denominator-cleared differentials of the functions
    s_i / s^m; off the zero loci of s and t they cut out exactly the locus
    where the assembled map is ramified, at a fraction of the degree of the
    full Jacobian minors.
    """
    gs = s.gradient()
    rows = [F.gradient()]
    for si in s_list:
        gi = si.gradient()
        rows.append([s * gi[j] - (m % F.p) * si * gs[j]
                     for j in range(F.num_vars)])
    return maximal_minors(rows)


def _find_fresh_smooth_point(V, on_factor, depth, exclude):
    for k in range(1, depth + 1):
        for P in enumerate_projective(V.p, k, V.num_vars):
            if not on_factor.evaluate(P).is_zero():
                continue
            if not V.F.evaluate(P).is_zero():
                continue
            if not smooth_at(V.F, P):
                continue
            if V.divisor_D is not None and on_divisor(V.divisor_D, P):
                continue
            if P in exclude:
                continue
            return P
    return None


def _finiteness_cert(chart_cert, morphism, F, chart):
    """Turn a chart identity 1 = a F + b t + sum c_i t_i into one for
    1 = . F + . u_0 + sum . u_i, by taking p-th then l-th powers.

    The p-th power (freshman's dream) turns t_i into t_i^p = u_i - s_i
    s^{m(pr-1)} t^{p(l-1)}; the leftover t^p lands in a term T with 1 = G + T
    and G in (F, u_1..u_n), so expanding 1 = (G + T)^l makes T^l a multiple
    of u_0 = t^{pl}.
    """
    led = morphism.ledger
    p, l, r, m = led.p, led.l, led.r, led.m
    F_aff = F.dehomogenize(chart)
    t_aff = morphism.t.dehomogenize(chart)
    a = chart_cert.cofactors[0]
    b = chart_cert.cofactors[1]
    cs = chart_cert.cofactors[2:]
    s_aff = morphism.s.dehomogenize(chart)
    sig = [f.dehomogenize(chart) for f in morphism.s_list]
    u_aff = [f.dehomogenize(chart) for f in morphism.u]

    A = a ** p * F_aff ** (p - 1)
    cp = [c ** p for c in cs]
    acc = SparseForm.zero(F_aff.p, F_aff.num_vars)
    for c, si in zip(cp, sig):
        acc = acc + c * si
    W = b ** p - acc * s_aff ** (m * (p * r - 1)) * t_aff ** (p * (l - 2))
    G = F_aff * A
    for c, ui in zip(cp, u_aff[1:]):
        G = G + c * ui
    T = t_aff ** p * W
    # 1 = (G + T)^l = G*H + T^l  with  H = sum_{i<l} C(l,i) G^{l-1-i} T^i
    H = SparseForm.zero(F_aff.p, F_aff.num_vars)
    for i in range(l):
        H = H + (G ** (l - 1 - i) * T ** i).scale(comb(l, i))
    cof = [A * H] + [W ** l] + [c * H for c in cp]
    gens = [F_aff] + u_aff
    one = SparseForm.constant(F_aff.p, F_aff.num_vars, 1)
    cert = NullstellensatzCert(gens, cof, one, chart=chart)
    if not cert.verify():
        raise AssertionError("finiteness cofactor construction failed")
    return cert


def _etale_certificates(F, morphism, E_ideal, Fs_ideal, num_vars):
    """Per-chart identities 1 in (F_aff, Jacobian minors, 1 - y*u_0_aff).

    Built from two small memberships: t in (F, reduced minors) and
    t in (F, s).  Each full minor equals Phi * (reduced minor) with
    Phi = t^{pn(2l-1)} s^{n(M-1)}, so multiplying the first membership by
    Phi expresses Phi*t through the full minors; the s-power in Phi is then
    produced from powers of the second membership, and the Rabinowitsch
    geometric series in y*u_0 = y*t^{pl} absorbs the remaining t-powers.
    """
    p = F.p
    n = num_vars - 2
    led = morphism.ledger
    l, r, m = led.l, led.r, led.m
    t, s = morphism.t, morphism.s
    big_m = m * (p * r - 1)

    full_minors = maximal_minors(jacobian_rows(F, morphism.u))
    q = E_ideal.membership_with_cofactors(t)
    ab = Fs_ideal.membership_with_cofactors(t)
    if q is None or ab is None:
        raise AssertionError("t escaped its defining ideals")
    a, b = ab
    phi_t = t ** (p * n * (2 * l - 1))
    phi_s = s ** (n * (big_m - 1))
    phi = phi_t * phi_s
    for fm, rm in zip(full_minors, E_ideal.generators[1:]):
        if fm != phi * rm:
            raise AssertionError("minor factorization identity failed")

    # t^{N1} = F*B + b^{N1} s^{N1},  N1 = n(M-1)
    n1 = n * (big_m - 1)
    B = SparseForm.zero(p, num_vars)
    for i in range(1, n1 + 1):
        B = B + (a ** i * F ** (i - 1) * (b * s) ** (n1 - i)).scale(
            comb(n1, i))
    b_n = b ** n1
    # t^{Nstar} = F*cof_F + sum_j (b^{N1} q_j) * full_minor_j
    nstar = n1 + p * n * (2 * l - 1) + 1
    cof_f_hom = B * t ** (p * n * (2 * l - 1) + 1) + b_n * q[0] * phi
    cof_j_hom = [b_n * qj for qj in q[1:]]
    check = F * cof_f_hom
    for cj, fm in zip(cof_j_hom, full_minors):
        check = check + cj * fm
    if check != t ** nstar:
        raise AssertionError("etale power identity failed")

    pl = p * led.l
    kpow = -(-nstar // pl)           # ceil: (y*u_0)^K covers t^{Nstar}
    certs = []
    one = SparseForm.constant(p, num_vars, 1)
    y = SparseForm.variable(p, num_vars, num_vars - 1)
    for chart in range(num_vars):
        t_aff = t.dehomogenize(chart).extend_vars(num_vars)
        u0_aff = morphism.u[0].dehomogenize(chart).extend_vars(num_vars)
        rab = one - y * u0_aff
        yu = y * u0_aff
        r_k = SparseForm.zero(p, num_vars)
        acc = one
        for _ in range(kpow):
            r_k = r_k + acc
            acc = acc * yu
        lead = y ** kpow * t_aff ** (pl * kpow - nstar)
        gens = ([F.dehomogenize(chart).extend_vars(num_vars)]
                + [fm.dehomogenize(chart).extend_vars(num_vars)
                   for fm in full_minors]
                + [rab])
        cofs = ([lead * cof_f_hom.dehomogenize(chart).extend_vars(num_vars)]
                + [lead * cj.dehomogenize(chart).extend_vars(num_vars)
                   for cj in cof_j_hom]
                + [r_k])
        cert = NullstellensatzCert(gens, cofs, one, chart=chart,
                                   aux_index=num_vars - 1)
        if not cert.verify():
            raise AssertionError("etale chart certificate failed to verify")
        certs.append(cert)
    return certs


def _d_to_h_cofactors(F, morphism, divisor, Fs_ideal):
    """Cofactors for u_0 in (F) + I(D), from t = a F + b s and s in I(D)."""
    ab = Fs_ideal.membership_with_cofactors(morphism.t)
    ds = divisor.membership_with_cofactors(morphism.s)
    if ab is None or ds is None:
        raise AssertionError("t or s escaped its defining ideal")
    a, b = ab
    p, nv = F.p, F.num_vars
    pl = p * morphism.ledger.l
    s = morphism.s
    cof_f = SparseForm.zero(p, nv)
    for i in range(1, pl + 1):
        cof_f = cof_f + (a ** i * F ** (i - 1) * (b * s) ** (pl - i)).scale(
            comb(pl, i))
    tail = b ** pl * s ** (pl - 1)
    cofs = [cof_f] + [tail * d for d in ds]
    check = SparseForm.zero(p, nv)
    for c, g in zip(cofs, [F] + list(divisor.generators)):
        check = check + c * g
    if check != morphism.u[0]:
        raise AssertionError("D-to-H cofactor construction failed")
    return cofs


def build_etale_cover(V: VarietyInstance, cfg: SectionSearchConfig = None,
                      constrained_divisors=None):
    """The full pipeline; returns (CoverMorphism, Certificate)."""
    cfg = cfg or SectionSearchConfig()
    diags = validate_instance(V)
    if diags:
        raise ValueError("invalid instance: " + "; ".join(diags))
    p, nv = V.p, V.num_vars
    constrained = list(constrained_divisors or [])

    S_work = list(V.S)
    for _round in range(MAX_AUGMENTATION_ROUNDS + 1):
        if not S_work:
            P = _find_fresh_smooth_point(V, V.F, cfg.witness_depth, set())
            if P is None:
                raise ComponentCoverageFailed(
                    "no smooth low-degree point available to seed S")
            S_work.extend(P.orbit())
            continue
        V_work = VarietyInstance(p, V.F, divisor_D=V.divisor_D,
                                 extra_divisors=constrained, S=S_work)
        e, s = find_separating_section(
            [V.divisor_D] if V.divisor_D is not None else [],
            S_work, cfg, p, nv)
        offending = multivariate_gcd(V.F, s)
        if offending.degree == 0:
            umd = build_unramified_map(V_work, s, cfg)
            minors = reduced_jacobian_minors(V.F, s, umd.deltas, umd.power)
            offending = V.F
            for mnr in minors:
                offending = multivariate_gcd(offending, mnr)
                if offending.degree == 0:
                    break
            if offending.degree == 0:
                break
        # some component of X is missed: augment S with a smooth point on
        # the offending factor and retry
        P = _find_fresh_smooth_point(V, offending, cfg.witness_depth,
                                     set(S_work))
        if P is None:
            raise ComponentCoverageFailed(
                "component-coverage augmentation found no smooth point on "
                f"the uncovered factor {offending}")
        S_work.extend(P.orbit())
    else:
        raise ComponentCoverageFailed("augmentation retries exhausted")

    m = umd.power
    deltas = umd.deltas
    E_ideal = HomIdeal([V.F] + minors)
    Fs_ideal = HomIdeal([V.F, s])
    deg_t, t = find_separating_section([E_ideal, Fs_ideal], S_work, cfg,
                                       p, nv, step=m * e)
    r = deg_t // (m * e)
    deg_ti, t_list, empt = find_covering_sections(
        V_work, HomIdeal([V.F, t]), [], constrained, cfg,
        step=r * m * e, min_multiplier=2)
    l = deg_ti // (r * m * e)

    morphism = assemble_u_tuple(s, deltas, t, t_list, p, l, r, m)

    finiteness = [_finiteness_cert(empt.certificates[c], morphism, V.F, c)
                  for c in sorted(empt.certificates)]
    etale = _etale_certificates(V.F, morphism, E_ideal, Fs_ideal, nv)
    d_to_h = (_d_to_h_cofactors(V.F, morphism, V.divisor_D, Fs_ideal)
              if V.divisor_D is not None else None)
    s_records = [(P, morphism.u[0].evaluate(P)) for P in S_work]

    local_memberships = []
    for i, D_i in enumerate(constrained):
        cof = D_i.membership_with_cofactors(morphism.u[i + 1])
        if cof is None:
            raise AssertionError(
                f"u_{i + 1} escaped the constrained divisor ideal")
        local_memberships.append((i, cof))

    cert = Certificate(
        p=p, ledger=morphism.ledger, finiteness=finiteness,
        etale_off_H=etale, D_to_H=d_to_h, S_off_H=s_records,
        local_memberships=local_memberships, flatness_note=FLATNESS_NOTE)
    return morphism, cert


def build_local_cover(V: VarietyInstance, cfg: SectionSearchConfig = None):
    """Cover with the given divisors mapped to coordinate hyperplanes."""
    cfg = cfg or SectionSearchConfig()
    mdiv = len(V.extra_divisors)
    if mdiv > V.n:
        raise UnsupportedRequiresBlowup(
            f"{mdiv} constrained divisors exceed the dimension {V.n}")
    if mdiv >= 2:
        _check_intersections_supported(V, cfg)
    morphism, cert = build_etale_cover(
        VarietyInstance(V.p, V.F, divisor_D=V.divisor_D, S=V.S),
        cfg, constrained_divisors=V.extra_divisors)
    return LocalCover(morphism=morphism,
                      constrained_divisors=list(V.extra_divisors)), cert


def _check_intersections_supported(V, cfg):
    """Accept only pairwise divisor intersections supported at a single
    rational point; the general position needs blow-ups, out of scope."""
    from itertools import combinations
    for a, b in combinations(range(len(V.extra_divisors)), 2):
        gens = ([V.F] + V.extra_divisors[a].generators
                + V.extra_divisors[b].generators)
        pts = set()
        for k in range(1, cfg.witness_depth + 1):
            for P in enumerate_projective(V.p, k, V.num_vars):
                if all(g.evaluate(P).is_zero() for g in gens):
                    pts.add(P)
        rational = [P for P in pts if P.field.k == 1]
        if len(pts) != 1 or not rational:
            raise UnsupportedRequiresBlowup(
                "divisor intersections are not a single rational point; "
                "the blow-up preprocessing is not supported")
