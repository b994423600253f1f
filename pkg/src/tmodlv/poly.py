"""Polynomials over an arbitrary coefficient Ring.

A polynomial is a plain tuple of coefficient values in ascending
exponent order with no trailing zero, so tuples are canonical and
hashable and can themselves serve as elements of another Ring
(`PolyRing`), which is how A = F_q[t] and the bivariate ring
F_q[t][x] of the motive machinery are built.
"""

from __future__ import annotations

from .ffield import FqField, Ring


def ptrim(ring: Ring, coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and ring.is_zero(coeffs[-1]):
        coeffs.pop()
    return tuple(coeffs)


def pdeg(a: tuple) -> int:
    """Degree, with deg 0 = -1 by convention."""
    return len(a) - 1


def padd(ring: Ring, a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = ring.add(out[i], c)
    return ptrim(ring, out)


def pneg(ring: Ring, a: tuple) -> tuple:
    return tuple(ring.neg(c) for c in a)


def psub(ring: Ring, a: tuple, b: tuple) -> tuple:
    return padd(ring, a, pneg(ring, b))


def pmul(ring: Ring, a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [ring.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not ring.is_zero(x):
            for j, y in enumerate(b):
                out[i + j] = ring.add(out[i + j], ring.mul(x, y))
    return ptrim(ring, out)


def pscale(ring: Ring, c, a: tuple) -> tuple:
    return ptrim(ring, (ring.mul(c, x) for x in a))


def ppow(ring: Ring, a: tuple, k: int) -> tuple:
    out, base = (ring.one,), a
    while k:
        if k & 1:
            out = pmul(ring, out, base)
        base = pmul(ring, base, base)
        k >>= 1
    return out

def pconst(ring: Ring, c) -> tuple:
    return () if ring.is_zero(c) else (c,)


def peval(ring: Ring, a: tuple, x):
    out = ring.zero
    for c in reversed(a):
        out = ring.add(ring.mul(out, x), c)
    return out


def pdivmod(ring: Ring, a: tuple, b: tuple) -> tuple[tuple, tuple]:
    """Division with remainder; the leading coefficient of b must be a unit."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = ring.inv(b[-1])
    rem = list(a)
    db = pdeg(b)
    quo = [ring.zero] * max(0, len(a) - db)
    while len(rem) - 1 >= db and rem:
        c = rem[-1]
        if ring.is_zero(c):
            rem.pop()
            continue
        f = ring.mul(c, lead_inv)
        off = len(rem) - 1 - db
        quo[off] = f
        for j, bc in enumerate(b):
            rem[off + j] = ring.sub(rem[off + j], ring.mul(f, bc))
        rem.pop()
    return ptrim(ring, quo), ptrim(ring, rem)


def pgcd(field: Ring, a: tuple, b: tuple) -> tuple:
    """Monic gcd over a field."""
    while b:
        a, b = b, pdivmod(field, a, b)[1]
    if a:
        a = pscale(field, field.inv(a[-1]), a)
    return a


def pqpow(field, a: tuple, k: int = 1) -> tuple:
    """f(t) -> f(t)^(q^k) over GF(q): Frobenius on coefficients, exponents times q^k."""
    if not a:
        return ()
    step = field.q ** k
    out = [field.zero] * ((len(a) - 1) * step + 1)
    for e, c in enumerate(a):
        out[e * step] = field.qpow(c, k)
    return ptrim(field, out)


class PolyRing(Ring):
    """Ring of polynomials over `coeff` with tuple elements."""

    def __init__(self, coeff: Ring, var: str = "t"):
        self.coeff = coeff
        self.var = var
        self.zero = ()
        self.one = (coeff.one,)
        self.gen = (coeff.zero, coeff.one)

    def add(self, a, b):
        return padd(self.coeff, a, b)

    def neg(self, a):
        return pneg(self.coeff, a)

    def mul(self, a, b):
        return pmul(self.coeff, a, b)

    def is_zero(self, a):
        return not a

    def is_unit(self, a):
        return len(a) == 1 and self.coeff.is_unit(a[0])

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{self.el_str(a)} is not a unit")
        return (self.coeff.inv(a[0]),)

    def from_int(self, k):
        return pconst(self.coeff, self.coeff.from_int(k))

    def qpow(self, a, k: int = 1):
        return pqpow(self.coeff, a, k)

    def el_str(self, a) -> str:
        return poly_str(self.coeff, a, self.var)

    def __repr__(self):
        return f"{self.coeff!r}[{self.var}]"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.coeff == self.coeff and other.var == self.var

    def __hash__(self):
        return hash(("PolyRing", self.coeff, self.var))


def poly_str(ring: Ring, a: tuple, var: str = "t") -> str:
    """Canonical text form: descending exponents, zero terms and unit
    coefficients omitted (`t^3+2*t+1`)."""
    if not a:
        return "0"
    terms = []
    one = ring.one
    for e in range(len(a) - 1, -1, -1):
        c = a[e]
        if ring.is_zero(c):
            continue
        cs = ring.el_str(c)
        if any(s in cs for s in "+-") and len(cs) > 1:
            cs = f"({cs})"
        if e == 0:
            terms.append(cs)
        else:
            v = var if e == 1 else f"{var}^{e}"
            terms.append(v if c == one else f"{cs}*{v}")
    return " + ".join(terms) if terms else "0"


_IRRED_CACHE: dict = {}


def monic_irreducibles(field: FqField, d: int):
    """All monic irreducible polynomials of degree d over GF(q), sorted by
    descending-exponent coefficient vector.  Irreducibility by trial
    division against lower-degree monic irreducibles; cached per field."""
    if d <= 0:
        return []
    key = (field, d)
    got = _IRRED_CACHE.get(key)
    if got is not None:
        return got
    lower = []
    for dd in range(1, d // 2 + 1):
        lower.extend(monic_irreducibles(field, dd))
    out = []
    for poly in _monics(field, d):
        if all(pdivmod(field, poly, f)[1] for f in lower):
            out.append(poly)
    _IRRED_CACHE[key] = out
    return out


def _monics(field: FqField, d: int):
    # descending-exponent lexicographic enumeration
    q = field.q

    def rec(rem):
        if rem == 0:
            yield ()
            return
        for c in range(q):
            for tail in rec(rem - 1):
                yield (c,) + tail

    for body in rec(d):
        yield tuple(reversed(body)) + (field.one,)


def irreducible_count_oracle(q: int, d: int) -> int:
    """Independent necklace count (1/d) sum_{e|d} mu(e) q^(d/e)."""

    def mu(n):
        out, k = 1, 2
        while k * k <= n:
            if n % k == 0:
                n //= k
                if n % k == 0:
                    return 0
                out = -out
            k += 1
        return -out if n > 1 else out

    total = sum(mu(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


class RatFuncField(Ring):
    """Field of rational functions over GF(q) in one variable.

    Elements are pairs (num, den) of polynomial tuples, gcd-reduced with
    monic denominator, so representations are canonical.
    """

    def __init__(self, field: FqField, var: str = "t"):
        self.field = field
        self.var = var
        self.poly = PolyRing(field, var)
        self.zero = ((), (field.one,))
        self.one = ((field.one,), (field.one,))
        self.gen = ((field.zero, field.one), (field.one,))

    def make(self, num: tuple, den: tuple):
        F = self.field
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        g = pgcd(F, num, den)
        if pdeg(g) > 0:
            num = pdivmod(F, num, g)[0]
            den = pdivmod(F, den, g)[0]
        c = F.inv(den[-1])
        return pscale(F, c, num), pscale(F, c, den)

    def from_poly(self, a: tuple):
        return self.make(a, (self.field.one,))

    def add(self, a, b):
        F = self.field
        return self.make(
            padd(F, pmul(F, a[0], b[1]), pmul(F, b[0], a[1])), pmul(F, a[1], b[1])
        )

    def neg(self, a):
        return (pneg(self.field, a[0]), a[1])

    def mul(self, a, b):
        return self.make(pmul(self.field, a[0], b[0]), pmul(self.field, a[1], b[1]))

    def is_zero(self, a):
        return not a[0]

    def is_unit(self, a):
        return bool(a[0])

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of 0")
        return self.make(a[1], a[0])

    def from_int(self, k):
        return self.from_poly(pconst(self.field, self.field.from_int(k)))

    def qpow(self, a, k: int = 1):
        return self.make(pqpow(self.field, a[0], k), pqpow(self.field, a[1], k))

    def inf_val(self, a) -> int:
        """Valuation at infinity: deg(den) - deg(num); large for 0."""
        if not a[0]:
            return 10 ** 9
        return pdeg(a[1]) - pdeg(a[0])

    def el_str(self, a):
        ns = poly_str(self.field, a[0], self.var)
        if a[1] == (self.field.one,):
            return ns
        return f"({ns})/({poly_str(self.field, a[1], self.var)})"

    def __eq__(self, other):
        return isinstance(other, RatFuncField) and other.field == self.field and other.var == self.var

    def __hash__(self):
        return hash(("RatFuncField", self.field, self.var))
