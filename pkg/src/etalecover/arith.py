"""Exact arithmetic in F_p and its extensions F_{p^k}.

Extension fields carry a deterministically chosen modulus: monic degree-k
polynomials over F_p are scanned in lexicographic order of their coefficient
tuples (constant term first) and the first irreducible one wins.  Elements
print in a generator symbol ``w``, ascending powers, e.g. ``2+w`` in F_9.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache

from .errors import NoEmbedding, NotPrime


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin, valid far beyond 2^31
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# univariate polynomials over F_p, as coefficient tuples (ascending powers),
# used only for modulus bookkeeping
# ---------------------------------------------------------------------------

def _trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_add(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
                  for i in range(n)])


def _poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_divmod(a, b, p):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv = pow(lb, p - 2, p)
    q = [0] * max(len(a) - db, 1)
    while len(_trim(a)) - 1 >= db and _trim(a):
        a = list(_trim(a))
        da = len(a) - 1
        if da < db:
            break
        c = a[-1] * inv % p
        q[da - db] = c
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - c * b[i]) % p
    return _trim(q), _trim(a)


def _poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _poly_divmod(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], p - 2, p)
        a = tuple(c * inv % p for c in a)
    return a


def _poly_powmod(base, e, mod, p):
    result = (1,)
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _is_irreducible(f, p):
    k = len(f) - 1
    if k < 1:
        return False
    x = (0, 1)
    for i in range(1, k):
        xpi = _poly_powmod(x, p ** i, f, p)
        g = _poly_gcd(_poly_add(xpi, tuple(-c % p for c in x), p), f, p)
        if len(g) - 1 != 0:
            return False
    return _poly_powmod(x, p ** k, f, p) == _trim(x)


class PrimeField:
    """The prime field F_p; primality is checked at construction."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class ExtField:
    """F_{p^k} presented as F_p[w]/(modulus)."""

    def __init__(self, base: PrimeField, k: int, modulus):
        self.base = base
        self.p = base.p
        self.k = k
        self.modulus = tuple(modulus)
        self._embed_cache = {}

    @property
    def order(self):
        return self.p ** self.k

    def __eq__(self, other):
        return (isinstance(other, ExtField) and self.p == other.p
                and self.k == other.k and self.modulus == other.modulus)

    def __hash__(self):
        return hash(("ExtField", self.p, self.k, self.modulus))

    def __repr__(self):
        return f"F_{self.p}^{self.k}"

    def element(self, coeffs) -> "FieldElement":
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        c = [x % self.p for x in coeffs]
        if len(c) > self.k:
            c = list(_poly_divmod(tuple(c), self.modulus, self.p)[1])
        c += [0] * (self.k - len(c))
        return FieldElement(self, tuple(c))

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    def generator(self):
        return self.element((0, 1)) if self.k > 1 else self.element(1)

    def elements(self):
        """All field elements in the deterministic coefficient order."""
        p, k = self.p, self.k
        for idx in range(p ** k):
            digits = []
            m = idx
            for _ in range(k):
                digits.append(m % p)
                m //= p
            yield FieldElement(self, tuple(digits))


class FieldElement:
    """An element of an ExtField; immutable coefficient vector over F_p."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field == self.field:
                return other
            if other.field.k == 1:
                return self.field.element(other.coeffs)
            raise ValueError("field mismatch; embed explicitly")
        if isinstance(other, int):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FieldElement(self.field, tuple(
            (a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        prod = _poly_mul(_trim(self.coeffs), _trim(o.coeffs), p)
        return self.field.element(prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # extended Euclid in F_p[x] against the modulus
        p = self.field.p
        a, b = _trim(self.coeffs), self.field.modulus
        if self.field.k == 1:
            return self.field.element(pow(self.coeffs[0], p - 2, p))
        s0, s1 = (1,), ()
        while b:
            q, r = _poly_divmod(a, b, p)
            a, b = b, r
            s0, s1 = s1, _poly_add(s0, tuple(-c % p for c in _poly_mul(q, s1, p)), p)
        inv = pow(a[0], p - 2, p)  # a is now the (constant) gcd
        return self.field.element(_poly_mul(s0, (inv,), p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def frobenius(self):
        """The p-power Frobenius a |-> a^p."""
        return self ** self.field.p

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.element(other)
        return (isinstance(other, FieldElement) and self.field == other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append("w" if c == 1 else f"{c}*w")
            else:
                parts.append(f"w^{i}" if c == 1 else f"{c}*w^{i}")
        return "+".join(parts) if parts else "0"

    def __repr__(self):
        return f"<{self} in {self.field!r}>"


@lru_cache(maxsize=None)
def make_extension(p: int, k: int) -> ExtField:
    """The deterministic extension F_{p^k}; repeated calls share the field."""
    base = PrimeField(p)
    if k == 1:
        return ExtField(base, 1, (0, 1))  # modulus x, the trivial quotient
    # lexicographic order of (c_0, ..., c_{k-1}), constant term compared first
    for tup in itertools.product(range(p), repeat=k):
        f = tup + (1,)
        if _is_irreducible(f, p):
            return ExtField(base, k, f)
    raise RuntimeError("unreachable: irreducible modulus always exists")


def frobenius(a: FieldElement) -> FieldElement:
    return a.frobenius()


def embed(a: FieldElement, target: ExtField) -> FieldElement:
    """Image of a under the fixed embedding of its field into target."""
    src = a.field
    if src == target:
        return a
    if src.p != target.p or target.k % src.k != 0:
        raise NoEmbedding(f"no embedding of F_{src.p}^{src.k} into "
                          f"F_{target.p}^{target.k}")
    if src.k == 1:
        return target.element(a.coeffs[0])
    key = (src.k, src.modulus)
    gen_img = target._embed_cache.get(key)
    if gen_img is None:
        for r in target.elements():
            acc = target.zero()
            for c in reversed(src.modulus):
                acc = acc * r + c
            if acc.is_zero():
                gen_img = r
                break
        else:
            raise NoEmbedding("modulus has no root in target (degree bug)")
        target._embed_cache[key] = gen_img
    acc = target.zero()
    for c in reversed(a.coeffs):
        acc = acc * gen_img + c
    return acc


_ELT_TOKEN = re.compile(r"\s*(\d+|\w|\^|\*|\+|-)\s*")


def parse_element(text: str, field: ExtField) -> FieldElement:
    """Parse the ``2+w^2`` grammar into a field element."""
    coeffs = [0] * max(field.k, 1)
    s = text.strip()
    if not s:
        raise ValueError("empty field element")
    # split on + and - keeping signs
    terms = re.findall(r"[+-]?[^+-]+", s)
    for term in terms:
        term = term.strip()
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        elif term.startswith("+"):
            term = term[1:]
        m = re.fullmatch(r"(\d+)?\*?(w(\^(\d+))?)?", term.strip())
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"bad field element term {term!r}")
        c = int(m.group(1)) if m.group(1) else 1
        e = 0
        if m.group(2):
            e = int(m.group(4)) if m.group(4) else 1
        if e > 0 and field.k == 1:
            raise ValueError("generator w not available in a prime field")
        while e >= len(coeffs):
            coeffs.append(0)
        coeffs[e] = (coeffs[e] + sign * c) % field.p
    return field.element(tuple(coeffs))
