"""Sparse multivariate polynomials over F_p and projective points.

Exponent vectors map to nonzero coefficients in [1, p); the canonical term
order is graded reverse lexicographic with x_0 > x_1 > ... and it is used for
printing, hashing and all Groebner-facing code.  The textual grammar names the
variables ``x``, ``y``, ``z``, ``w0``, ``w1``, ... by position.
"""

from __future__ import annotations

import re

from .arith import ExtField, FieldElement, embed, make_extension
from .errors import (DegenerateInput, NotHomogeneous, ZeroInput)


def grevlex_key(exp):
    """Sort key; larger key = larger monomial in grevlex."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


def var_name(i: int) -> str:
    return ("x", "y", "z")[i] if i < 3 else f"w{i - 3}"


class SparseForm:
    """A sparse polynomial over F_p in num_vars variables."""

    __slots__ = ("p", "num_vars", "terms", "_hash")

    def __init__(self, p: int, num_vars: int, terms=None):
        self.p = p
        self.num_vars = num_vars
        clean = {}
        if terms:
            for exp, c in terms.items():
                c %= p
                if c:
                    clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, p, num_vars):
        return cls(p, num_vars)

    @classmethod
    def constant(cls, p, num_vars, c):
        return cls(p, num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, p, num_vars, i, power=1):
        exp = [0] * num_vars
        exp[i] = power
        return cls(p, num_vars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, p, num_vars, exp, c=1):
        return cls(p, num_vars, {tuple(exp): c})

    # -- basic queries ------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    @property
    def homogeneous_degree(self):
        if not self.terms:
            return None
        degs = {sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_homogeneous(self):
        return self.is_zero() or self.homogeneous_degree is not None

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=-1)

    def leading_term(self):
        """(exponent, coefficient) of the grevlex-largest monomial."""
        exp = max(self.terms, key=grevlex_key)
        return exp, self.terms[exp]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]),
                      reverse=True)

    # -- ring operations ----------------------------------------------------

    def _check(self, other):
        if self.p != other.p or self.num_vars != other.num_vars:
            raise ValueError("mixed polynomial rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = SparseForm.constant(self.p, self.num_vars, other)
        self._check(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = (terms.get(exp, 0) + c) % self.p
        return SparseForm(self.p, self.num_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparseForm(self.p, self.num_vars,
                          {e: -c % self.p for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = SparseForm.constant(self.p, self.num_vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        p = self.p
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (out.get(e, 0) + c1 * c2) % p
                if v:
                    out[e] = v
                elif e in out:
                    del out[e]
        return SparseForm(p, self.num_vars, out)

    __rmul__ = __mul__

    def scale(self, c: int):
        c %= self.p
        if c == 0:
            return SparseForm.zero(self.p, self.num_vars)
        return SparseForm(self.p, self.num_vars,
                          {e: k * c for e, k in self.terms.items()})

    def __pow__(self, e: int):
        result = SparseForm.constant(self.p, self.num_vars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def monic(self):
        """Scale so the grevlex-leading coefficient is 1."""
        if self.is_zero():
            return self
        _, c = self.leading_term()
        return self.scale(pow(c, self.p - 2, self.p))

    def __eq__(self, other):
        return (isinstance(other, SparseForm) and self.p == other.p
                and self.num_vars == other.num_vars
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.num_vars,
                               tuple(self.sorted_terms())))
        return self._hash

    # -- calculus and evaluation --------------------------------------------

    def partial_derivative(self, i: int) -> "SparseForm":
        out = {}
        for exp, c in self.terms.items():
            if exp[i] == 0:
                continue
            k = exp[i] * c % self.p
            if k == 0:
                continue  # characteristic kills exponents divisible by p
            e = list(exp)
            e[i] -= 1
            te = tuple(e)
            out[te] = (out.get(te, 0) + k) % self.p
        return SparseForm(self.p, self.num_vars, out)

    def gradient(self):
        return [self.partial_derivative(i) for i in range(self.num_vars)]

    def evaluate_affine(self, values) -> FieldElement:
        """Evaluate at a tuple of FieldElements (one per variable)."""
        field = values[0].field if values else make_extension(self.p, 1)
        acc = field.zero()
        powers = [{} for _ in range(self.num_vars)]

        def pw(i, e):
            if e == 0:
                return field.one()
            v = powers[i].get(e)
            if v is None:
                v = values[i] ** e
                powers[i][e] = v
            return v

        for exp, c in self.terms.items():
            t = field.element(c)
            for i, e in enumerate(exp):
                if e:
                    t = t * pw(i, e)
            acc = acc + t
        return acc

    def evaluate(self, point: "ProjPoint") -> FieldElement:
        if len(point.coords) != self.num_vars:
            raise ValueError("coordinate count mismatch")
        if not self.is_zero() and self.homogeneous_degree is None:
            raise NotHomogeneous("projective evaluation needs a homogeneous form")
        return self.evaluate_affine(point.coords)

    # -- substitution and charts --------------------------------------------

    def dehomogenize(self, i: int) -> "SparseForm":
        """Set x_i = 1, dropping to num_vars-1 variables."""
        out = {}
        for exp, c in self.terms.items():
            e = exp[:i] + exp[i + 1:]
            out[e] = (out.get(e, 0) + c) % self.p
        return SparseForm(self.p, self.num_vars - 1, out)

    def homogenize(self, i: int, degree=None) -> "SparseForm":
        """Insert x_i, padding each term up to the given (or max) degree."""
        d = degree if degree is not None else self.degree
        out = {}
        for exp, c in self.terms.items():
            t = sum(exp)
            if t > d:
                raise ValueError("degree too small to homogenize")
            e = exp[:i] + (d - t,) + exp[i:]
            out[e] = c
        return SparseForm(self.p, self.num_vars + 1, out)

    def extend_vars(self, num_vars: int) -> "SparseForm":
        """Reinterpret in a larger ring, new variables appended."""
        pad = num_vars - self.num_vars
        return SparseForm(self.p, num_vars,
                          {e + (0,) * pad: c for e, c in self.terms.items()})

    # -- printing -----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            factors = []
            if c != 1 or not any(exp):
                factors.append(str(c))
            for i, e in enumerate(exp):
                if e == 1:
                    factors.append(var_name(i))
                elif e > 1:
                    factors.append(f"{var_name(i)}^{e}")
            parts.append("*".join(factors))
        return "+".join(parts)

    def __repr__(self):
        return f"SparseForm({self.p}, {self.num_vars}, {self})"


# ---------------------------------------------------------------------------
# division, gcd, resultants
# ---------------------------------------------------------------------------

def _exp_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def exact_divide(f: SparseForm, g: SparseForm) -> SparseForm:
    """f / g when the division is exact; raises ValueError otherwise."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return f
    p = f.p
    ge, gc = g.leading_term()
    ginv = pow(gc, p - 2, p)
    q = {}
    r = f
    while not r.is_zero():
        re, rc = r.leading_term()
        if not _exp_divides(ge, re):
            raise ValueError("inexact polynomial division")
        e = tuple(a - b for a, b in zip(re, ge))
        c = rc * ginv % p
        q[e] = c
        r = r - g * SparseForm.monomial(p, f.num_vars, e, c)
    return SparseForm(p, f.num_vars, q)


def divides(g: SparseForm, f: SparseForm) -> bool:
    try:
        exact_divide(f, g)
        return True
    except ValueError:
        return False


def _coeffs_in(f: SparseForm, i: int):
    """f as a map deg-in-x_i -> SparseForm coefficient (free of x_i)."""
    out = {}
    for exp, c in f.terms.items():
        e = list(exp)
        d = e[i]
        e[i] = 0
        out.setdefault(d, {})[tuple(e)] = c
    return {d: SparseForm(f.p, f.num_vars, t) for d, t in out.items()}


def _from_coeffs(coeffs, i, p, num_vars):
    out = {}
    for d, poly in coeffs.items():
        for exp, c in poly.terms.items():
            e = list(exp)
            e[i] += d
            out[tuple(e)] = c
    return SparseForm(p, num_vars, out)


def _pseudo_rem(f: SparseForm, g: SparseForm, i: int) -> SparseForm:
    """Pseudo-remainder of f by g with respect to x_i."""
    df, dg = f.degree_in(i), g.degree_in(i)
    gc = _coeffs_in(g, i)
    lg = gc[dg]
    r = f
    xi = SparseForm.variable(f.p, f.num_vars, i)
    while not r.is_zero() and r.degree_in(i) >= dg:
        dr = r.degree_in(i)
        lr = _coeffs_in(r, i)[dr]
        r = lg * r - lr * (xi ** (dr - dg)) * g
    return r


def _content(f: SparseForm, i: int) -> SparseForm:
    cs = list(_coeffs_in(f, i).values())
    g = cs[0]
    for c in cs[1:]:
        g = multivariate_gcd(g, c)
        if g.degree == 0:
            break
    return g


def multivariate_gcd(f: SparseForm, g: SparseForm) -> SparseForm:
    """GCD via primitive pseudo-remainder sequences; monic-normalized."""
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.degree == 0 or g.degree == 0:
        return SparseForm.constant(f.p, f.num_vars, 1)
    # main variable: highest index occurring in either
    for i in range(f.num_vars - 1, -1, -1):
        if f.degree_in(i) > 0 or g.degree_in(i) > 0:
            break
    if f.degree_in(i) == 0:
        return multivariate_gcd(f, _content(g, i)).monic()
    if g.degree_in(i) == 0:
        return multivariate_gcd(_content(f, i), g).monic()
    cf, cg = _content(f, i), _content(g, i)
    a, b = exact_divide(f, cf), exact_divide(g, cg)
    cont = multivariate_gcd(cf, cg)
    if a.degree_in(i) < b.degree_in(i):
        a, b = b, a
    while True:
        r = _pseudo_rem(a, b, i)
        if r.is_zero():
            gcd_pp = exact_divide(b, _content(b, i))
            break
        if r.degree_in(i) == 0:
            gcd_pp = SparseForm.constant(f.p, f.num_vars, 1)
            break
        a, b = b, exact_divide(r, _content(r, i))
    return (cont * gcd_pp).monic()


def is_squarefree(f: SparseForm) -> bool:
    """No repeated factor over the algebraic closure (F_p is perfect)."""
    if f.is_zero():
        raise ZeroInput("squarefreeness of the zero polynomial")
    if f.degree == 0:
        return True
    partials = [f.partial_derivative(i) for i in range(f.num_vars)]
    if all(d.is_zero() for d in partials):
        return False  # a p-th power over F_p
    g = f
    for d in partials:
        g = multivariate_gcd(g, d)
        if g.degree == 0:
            return True
    return g.degree == 0


def resultant(f: SparseForm, g: SparseForm, i: int) -> SparseForm:
    """Resultant with respect to x_i via Bareiss fraction-free elimination."""
    df, dg = f.degree_in(i), g.degree_in(i)
    if df <= 0 or dg <= 0:
        raise DegenerateInput(f"both inputs must have positive degree in "
                              f"{var_name(i)}")
    fc, gc = _coeffs_in(f, i), _coeffs_in(g, i)
    n = df + dg
    p, nv = f.p, f.num_vars
    zero = SparseForm.zero(p, nv)
    rows = []
    for r in range(dg):
        rows.append([fc.get(df - (c - r), zero) if 0 <= c - r <= df else zero
                     for c in range(n)])
    for r in range(df):
        rows.append([gc.get(dg - (c - r), zero) if 0 <= c - r <= dg else zero
                     for c in range(n)])
    sign = 1
    prev = SparseForm.constant(p, nv, 1)
    for k in range(n - 1):
        if rows[k][k].is_zero():
            for s in range(k + 1, n):
                if not rows[s][k].is_zero():
                    rows[k], rows[s] = rows[s], rows[k]
                    sign = -sign
                    break
            else:
                return zero
        for r2 in range(k + 1, n):
            for c in range(k + 1, n):
                num = rows[k][k] * rows[r2][c] - rows[r2][k] * rows[k][c]
                rows[r2][c] = exact_divide(num, prev) if num else zero
            rows[r2][k] = zero
        prev = rows[k][k]
    return rows[n - 1][n - 1].scale(sign)


# ---------------------------------------------------------------------------
# projective points
# ---------------------------------------------------------------------------

class ProjPoint:
    """A point of projective space with coordinates in one ExtField.

    Normalized so the last nonzero coordinate equals 1.
    """

    __slots__ = ("field", "coords")

    def __init__(self, coords):
        coords = tuple(coords)
        if not coords or all(c.is_zero() for c in coords):
            raise ValueError("projective point needs a nonzero coordinate")
        self.field = coords[0].field
        last = max(i for i, c in enumerate(coords) if not c.is_zero())
        inv = coords[last].inverse()
        self.coords = tuple(c * inv for c in coords)

    def __eq__(self, other):
        return (isinstance(other, ProjPoint) and self.field == other.field
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.field, self.coords))

    def frobenius(self) -> "ProjPoint":
        return ProjPoint(tuple(c.frobenius() for c in self.coords))

    def orbit(self):
        """The full Frobenius conjugate orbit, starting at this point."""
        pts = [self]
        cur = self.frobenius()
        while cur != self:
            pts.append(cur)
            cur = cur.frobenius()
        return pts

    def to_field(self, target: ExtField) -> "ProjPoint":
        return ProjPoint(tuple(embed(c, target) for c in self.coords))

    def __str__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"ProjPoint{self}"


# ---------------------------------------------------------------------------
# parsing and printing of the polynomial grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([xyz]|w\d+)|(\^)|(\*)|(\+)|(-))")


def _var_index(name: str) -> int:
    if name in ("x", "y", "z"):
        return "xyz".index(name)
    return 3 + int(name[1:])


def parse_form(text: str, p: int, num_vars: int) -> SparseForm:
    """Parse the canonical grammar into a SparseForm."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    pos = 0
    terms = {}
    sign = 1
    coeff = None
    exp = [0] * num_vars

    def flush():
        nonlocal coeff, exp, sign
        if coeff is None and not any(exp):
            raise ValueError(f"dangling operator in {text!r}")
        c = (1 if coeff is None else coeff) * sign % p
        e = tuple(exp)
        terms[e] = (terms.get(e, 0) + c) % p
        coeff, exp, sign = None, [0] * num_vars, 1

    started = False
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"bad token at {s[pos:]!r}")
        pos = m.end()
        num, name, caret, star, plus, minus = m.groups()
        if plus or minus:
            if started:
                flush()
            if minus:
                sign = -sign
            continue
        if star:
            continue
        if num is not None:
            started = True
            coeff = (coeff if coeff is not None else 1) * int(num)
            continue
        if caret:
            raise ValueError(f"misplaced ^ in {text!r}")
        # variable, possibly with a power
        started = True
        i = _var_index(name)
        if i >= num_vars:
            raise ValueError(f"variable {name} out of range")
        e = 1
        m2 = re.match(r"\s*\^\s*(\d+)", s[pos:])
        if m2:
            e = int(m2.group(1))
            pos += m2.end()
        exp[i] += e
    if started:
        flush()
    else:
        raise ValueError("empty polynomial")
    return SparseForm(p, num_vars, terms)
