"""Finite field arithmetic.

Elements of GF(p^r) are plain ints: the base-p digit encoding of the
residue polynomial in the formal generator x (least significant digit is
the constant term).  All arithmetic goes through the field object, so the
same int can be an element of several fields without ambiguity at the
call site.

Extensions GF(q^m) of an already-built GF(q) use the same scheme with
base-q digits whose values are codes of the base field.  Small fields
(up to 4096 elements) get lazy multiplication tables.
"""

from __future__ import annotations


class Ring:
    """Commutative ring protocol.

    Elements are opaque hashable Python values in canonical form, so
    ``==`` on values is ring equality.  Subclasses fill in `zero`, `one`
    and the arithmetic; everything generic (polynomials, Laurent series,
    matrices, group rings) is parameterized by a Ring instance.
    """

    zero = None
    one = None

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def from_int(self, k: int):
        """Image of the integer k under Z -> ring."""
        out = self.zero
        for _ in range(abs(k)):
            out = self.add(out, self.one)
        return self.neg(out) if k < 0 else out

    def el_str(self, a) -> str:
        return str(a)


class _TableArith:
    """Mixin: lazy add/mul tables for small coded rings."""

    _TABLE_LIMIT = 4096

    def _build_tables(self):
        n = self.size
        if n > self._TABLE_LIMIT:
            self._add_t = self._mul_t = self._neg_t = None
            return
        self._add_t = [[self._add_raw(a, b) for b in range(n)] for a in range(n)]
        self._mul_t = [[self._mul_raw(a, b) for b in range(n)] for a in range(n)]
        self._neg_t = [self._neg_raw(a) for a in range(n)]

    def add(self, a, b):
        if self._add_t is None:
            return self._add_raw(a, b)
        return self._add_t[a][b]

    def mul(self, a, b):
        if self._mul_t is None:
            return self._mul_raw(a, b)
        return self._mul_t[a][b]

    def neg(self, a):
        if self._neg_t is None:
            return self._neg_raw(a)
        return self._neg_t[a]

    def sub(self, a, b):
        if self._add_t is None:
            return self._add_raw(a, self._neg_raw(b))
        return self._add_t[a][self._neg_t[b]]


class FqField(_TableArith, Ring):
    """GF(p^r) presented as F_p[x]/(modulus).

    `modulus` is the coefficient tuple (ascending, length r+1, monic) of
    a degree-r irreducible over F_p; for r = 1 it defaults to x.
    Irreducibility is checked by trial division at construction.
    """

    def __init__(self, p: int, r: int = 1, modulus: tuple[int, ...] | None = None):
        if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"p = {p} is not prime")
        if r < 1:
            raise ValueError("r must be positive")
        if modulus is None:
            if r != 1:
                raise ValueError(f"GF({p}^{r}) needs an explicit modulus")
            modulus = (0, 1)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != r + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree r")
        self.p = p
        self.r = r
        self.q = p ** r
        self.size = self.q
        self.modulus = modulus
        self.zero = 0
        self.one = 1
        self._red = self._reduction_row()
        if not self._modulus_irreducible():
            raise ValueError(f"modulus {self.el_str_poly(modulus)} is reducible over F_{p}")
        self._build_tables()
        self._inv_t = None

    # -- raw digit arithmetic ------------------------------------------------

    def _digits(self, a: int) -> list[int]:
        p, out = self.p, []
        for _ in range(self.r):
            out.append(a % p)
            a //= p
        return out

    def _encode(self, digits) -> int:
        out = 0
        for d in reversed(list(digits)):
            out = out * self.p + (d % self.p)
        return out

    def _reduction_row(self):
        # x^r = -(modulus minus leading term), as digit list
        return [(-c) % self.p for c in self.modulus[:-1]]

    def _add_raw(self, a, b):
        p = self.p
        return self._encode((x + y) % p for x, y in zip(self._digits(a), self._digits(b)))

    def _mul_raw(self, a, b):
        p, r = self.p, self.r
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(len(prod) - 1, r - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j, m in enumerate(self._red):
                    prod[k - r + j] = (prod[k - r + j] + c * m) % p
        return self._encode(prod[:r])

    def _neg_raw(self, a):
        p = self.p
        return self._encode((-d) % p for d in self._digits(a))

    def is_unit(self, a) -> bool:
        return a != 0

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self._inv_t is None:
            self._inv_t = {}
        got = self._inv_t.get(a)
        if got is None:
            got = self.pow(a, self.q - 2)
            self._inv_t[a] = got
        return got

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        out, base = self.one, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def qpow(self, a, k: int = 1):
        """q-power Frobenius; the identity on GF(q) itself."""
        return a

    def elements(self):
        return range(self.q)

    def _modulus_irreducible(self) -> bool:
        if self.r == 1:
            return True
        # trial division by every monic polynomial of degree <= r/2 over F_p
        p, r = self.p, self.r
        for d in range(1, r // 2 + 1):
            for code in range(p ** d):
                div = []
                c = code
                for _ in range(d):
                    div.append(c % p)
                    c //= p
                div.append(1)
                if self._poly_divides(div):
                    return False
        return True

    def _poly_divides(self, div) -> bool:
        rem = list(self.modulus)
        dd = len(div) - 1
        p = self.p
        inv_lead = pow(div[-1], p - 2, p)
        while len(rem) - 1 >= dd:
            lead = rem[-1] % p
            if lead:
                f = (lead * inv_lead) % p
                off = len(rem) - 1 - dd
                for j, c in enumerate(div):
                    rem[off + j] = (rem[off + j] - f * c) % p
            rem.pop()
        return all(c % p == 0 for c in rem)

    # -- formatting ----------------------------------------------------------

    def el_str(self, a) -> str:
        return self.el_str_poly(self._digits(a))

    def el_str_poly(self, digits) -> str:
        terms = []
        for e in range(len(digits) - 1, -1, -1):
            c = digits[e] % self.p
            if c == 0:
                continue
            if e == 0:
                terms.append(str(c))
            elif e == 1:
                terms.append("x" if c == 1 else f"{c}*x")
            else:
                terms.append(f"x^{e}" if c == 1 else f"{c}*x^{e}")
        return "+".join(terms) if terms else "0"

    def __repr__(self):
        return f"GF({self.p}^{self.r})" if self.r > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return (
            isinstance(other, FqField)
            and other.p == self.p
            and other.r == self.r
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("FqField", self.p, self.r, self.modulus))


class ExtField(_TableArith, Ring):
    """GF(q^m) built on top of a base FqField by a degree-m irreducible.

    `modulus` is a tuple of m+1 base-field codes (ascending, monic).
    Element codes are base-q digit encodings of base-field codes.
    """

    def __init__(self, base: FqField, modulus: tuple[int, ...]):
        self.base = base
        self.m = len(modulus) - 1
        if self.m < 1 or modulus[-1] != base.one:
            raise ValueError("modulus must be monic of degree >= 1")
        self.modulus = tuple(modulus)
        self.p = base.p
        self.q = base.q
        self.size = base.q ** self.m
        self.zero = 0
        self.one = 1
        self._red = [base.neg(c) for c in modulus[:-1]]
        self._build_tables()
        self._inv_t = {}
        self._qpow_t = None

    def _digits(self, a: int) -> list[int]:
        q, out = self.q, []
        for _ in range(self.m):
            out.append(a % q)
            a //= q
        return out

    def _encode(self, digits) -> int:
        out = 0
        for d in reversed(list(digits)):
            out = out * self.q + d
        return out

    def embed(self, a):
        """Base field GF(q) into GF(q^m) as the constant digit."""
        return a

    def constant_code(self, a) -> int | None:
        """Base-field code if a is a constant, else None."""
        d = self._digits(a)
        return d[0] if all(x == 0 for x in d[1:]) else None

    def _add_raw(self, a, b):
        F = self.base
        return self._encode(F.add(x, y) for x, y in zip(self._digits(a), self._digits(b)))

    def _mul_raw(self, a, b):
        F, m = self.base, self.m
        da, db = self._digits(a), self._digits(b)
        prod = [F.zero] * (2 * m - 1)
        for i, x in enumerate(da):
            if x != F.zero:
                for j, y in enumerate(db):
                    prod[i + j] = F.add(prod[i + j], F.mul(x, y))
        for k in range(len(prod) - 1, m - 1, -1):
            c = prod[k]
            if c != F.zero:
                prod[k] = F.zero
                for j, r in enumerate(self._red):
                    prod[k - m + j] = F.add(prod[k - m + j], F.mul(c, r))
        return self._encode(prod[:m])

    def _neg_raw(self, a):
        F = self.base
        return self._encode(F.neg(d) for d in self._digits(a))

    def is_unit(self, a) -> bool:
        return a != 0

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        got = self._inv_t.get(a)
        if got is None:
            got = self.pow(a, self.size - 2)
            self._inv_t[a] = got
        return got

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        out, base = self.one, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def qpow(self, a, k: int = 1):
        """Frobenius a -> a^(q^k) over the base field."""
        if self._qpow_t is None:
            self._qpow_t = [self.pow(c, self.q) for c in range(self.size)]
        for _ in range(k % self.m if self.m > 0 else 0):
            a = self._qpow_t[a]
        return a

    def multiplicative_generator(self) -> int:
        n = self.size - 1
        facs = _prime_factors(n)
        for g in range(2, self.size):
            if all(self.pow(g, n // f) != self.one for f in facs):
                return g
        raise ArithmeticError("no generator found")  # unreachable for true fields

    def elements(self):
        return range(self.size)

    def el_str(self, a) -> str:
        digs = self._digits(a)
        terms = []
        for e in range(self.m - 1, -1, -1):
            c = digs[e]
            if c == self.base.zero:
                continue
            cs = self.base.el_str(c)
            if e == 0:
                terms.append(cs)
            else:
                v = "y" if e == 1 else f"y^{e}"
                terms.append(v if cs == "1" else f"({cs})*{v}")
        return "+".join(terms) if terms else "0"

    def __repr__(self):
        return f"GF({self.q}^{self.m})/{self.base!r}"

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ExtField", self.base, self.modulus))


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
