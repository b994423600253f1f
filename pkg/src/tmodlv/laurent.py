"""Precision-tracked Laurent series over an arbitrary coefficient Ring.

A value knows the exponent range it is exact on: coefficients are stored
from `emin` and the series is known for all exponents strictly below
`prec` (`prec = None` means exact, e.g. a polynomial).  Every operation
propagates the minimum precision of its operands; comparisons below the
common precision raise `PrecisionError` instead of silently passing.

The same class serves for k_oo = F_q((1/t)) (exponent = power of u = 1/t),
for the completions at infinite places (exponent = power of the local
uniformizer) and for the truncated rings R[[Z]]/Z^N used by nuclear
determinants (exponents >= 0, prec = N).
"""

from __future__ import annotations

from .ffield import Ring

INF = float("inf")


class PrecisionError(ArithmeticError):
    pass


class Laurent:
    __slots__ = ("ring", "emin", "coeffs", "prec")

    def __init__(self, ring: Ring, emin: int, coeffs, prec=None):
        coeffs = list(coeffs)
        p = INF if prec is None else prec
        # drop anything at or above the precision bound
        if p != INF and emin + len(coeffs) > p:
            coeffs = coeffs[: max(0, int(p) - emin)]
        while coeffs and ring.is_zero(coeffs[0]):
            coeffs.pop(0)
            emin += 1
        while coeffs and ring.is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            emin = 0
        self.ring = ring
        self.emin = emin
        self.coeffs = tuple(coeffs)
        self.prec = p

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(ring: Ring, prec=None) -> "Laurent":
        return Laurent(ring, 0, (), prec=prec)

    @staticmethod
    def one(ring: Ring, prec=None) -> "Laurent":
        return Laurent(ring, 0, (ring.one,), prec=prec)

    @staticmethod
    def monomial(ring: Ring, c, e: int, prec=None) -> "Laurent":
        return Laurent(ring, e, (c,), prec=prec)

    @staticmethod
    def from_t_poly(ring: Ring, poly: tuple, prec=None) -> "Laurent":
        """An ascending-coefficient polynomial in t as a Laurent value in
        u = 1/t (exponents <= 0)."""
        return Laurent(ring, -len(poly) + 1 if poly else 0, tuple(reversed(poly)), prec=prec)

    def to_t_poly(self) -> tuple:
        """Read a value supported in exponents <= 0 as an ascending t-polynomial.

        Raises if a known coefficient sits at a positive exponent, or if
        nothing past exponent 0 is known.
        """
        if self.prec < 1:
            raise PrecisionError("cannot certify polynomial shape below exponent 1")
        for e in self.support():
            if e > 0:
                raise ValueError("value has a known nonzero tail: not a polynomial in t")
        out = [self.ring.zero] * (1 - self.emin if self.coeffs else 0)
        for i, c in enumerate(self.coeffs):
            e = self.emin + i
            if e <= 0:
                out[-e] = c
        while out and self.ring.is_zero(out[-1]):
            out.pop()
        return tuple(out)

    # -- inspection ------------------------------------------------------

    def is_zero(self) -> bool:
        """All known coefficients vanish."""
        return not self.coeffs

    def known(self, e: int) -> bool:
        return e < self.prec

    def coeff(self, e: int):
        if e >= self.prec:
            raise PrecisionError(f"coefficient at exponent {e} unknown (precision {self.prec})")
        if e < self.emin or e >= self.emin + len(self.coeffs):
            return self.ring.zero
        return self.coeffs[e - self.emin]

    def support(self):
        return [self.emin + i for i, c in enumerate(self.coeffs) if not self.ring.is_zero(c)]

    def lead_exp(self) -> int:
        if not self.coeffs:
            raise PrecisionError("zero to known precision; no leading exponent")
        return self.emin

    def lead(self):
        return self.coeff(self.lead_exp())

    # -- arithmetic ------------------------------------------------------

    def _prec_of(self, other) -> float:
        return min(self.prec, other.prec)

    def __add__(self, other: "Laurent") -> "Laurent":
        R = self.ring
        prec = self._prec_of(other)
        if not self.coeffs:
            return Laurent(R, other.emin, other.coeffs, prec=None if prec == INF else int(prec))
        if not other.coeffs:
            return Laurent(R, self.emin, self.coeffs, prec=None if prec == INF else int(prec))
        lo = min(self.emin, other.emin)
        hi = max(self.emin + len(self.coeffs), other.emin + len(other.coeffs))
        out = [R.zero] * (hi - lo)
        for i, c in enumerate(self.coeffs):
            out[self.emin - lo + i] = c
        for i, c in enumerate(other.coeffs):
            j = other.emin - lo + i
            out[j] = R.add(out[j], c)
        return Laurent(R, lo, out, prec=None if prec == INF else int(prec))

    def __neg__(self) -> "Laurent":
        return Laurent(
            self.ring,
            self.emin,
            (self.ring.neg(c) for c in self.coeffs),
            prec=None if self.prec == INF else int(self.prec),
        )

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: "Laurent") -> "Laurent":
        R = self.ring
        # valuation lower bounds; an all-zero value is bounded by its precision
        ea = self.emin if self.coeffs else self.prec
        eb = other.emin if other.coeffs else other.prec
        # product is exact below min(Na + eb, Nb + ea)
        prec = min(self.prec + eb, other.prec + ea)
        if not self.coeffs or not other.coeffs:
            return Laurent.zero(R, prec=None if prec == INF else int(prec))
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec != INF:
            n = min(n, int(prec) - (self.emin + other.emin))
        out = [R.zero] * max(n, 0)
        for i, a in enumerate(self.coeffs):
            if R.is_zero(a):
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if not R.is_zero(b):
                    out[i + j] = R.add(out[i + j], R.mul(a, b))
        return Laurent(R, self.emin + other.emin, out, prec=None if prec == INF else int(prec))

    def scale(self, c) -> "Laurent":
        R = self.ring
        return Laurent(
            R,
            self.emin,
            (R.mul(c, x) for x in self.coeffs),
            prec=None if self.prec == INF else int(self.prec),
        )

    def shift(self, k: int) -> "Laurent":
        return Laurent(
            self.ring,
            self.emin + k,
            self.coeffs,
            prec=None if self.prec == INF else int(self.prec) + k,
        )

    def truncate(self, N: int) -> "Laurent":
        """Forget coefficients at exponents >= N; precision becomes min(prec, N)."""
        p = min(self.prec, N)
        return Laurent(self.ring, self.emin, self.coeffs, prec=int(p))

    def with_prec(self, N) -> "Laurent":
        if N is not None and N > self.prec:
            raise PrecisionError(f"cannot raise precision {self.prec} -> {N}")
        return self.truncate(N) if N is not None else self

    def split(self, cut: int) -> tuple["Laurent", "Laurent"]:
        """(part with exponents <= cut, part with exponents > cut)."""
        R = self.ring
        low, high = [], []
        for i, c in enumerate(self.coeffs):
            (low if self.emin + i <= cut else high).append((self.emin + i, c))
        p = None if self.prec == INF else int(self.prec)

        def build(items):
            if not items:
                return Laurent.zero(R, prec=p)
            e0 = items[0][0]
            arr = [R.zero] * (items[-1][0] - e0 + 1)
            for e, c in items:
                arr[e - e0] = c
            return Laurent(R, e0, arr, prec=p)

        return build(low), build(high)

    def inverse(self, work_prec: int | None = None) -> "Laurent":
        """Series inverse when the leading coefficient is a unit.

        For input exact to precision N with leading exponent e the result
        is exact to precision N - 2e.
        """
        R = self.ring
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero series")
        e = self.emin
        lead = self.coeffs[0]
        if not R.is_unit(lead):
            raise NonUnitLeadError(self, "leading coefficient is not a unit")
        if self.prec == INF:
            if len(self.coeffs) == 1:
                return Laurent.monomial(R, R.inv(lead), -e)
            if work_prec is None:
                raise PrecisionError("inverse of exact non-monomial needs work_prec")
            n, prec = work_prec + e, work_prec
        else:
            n = int(self.prec) - e  # number of known coefficients from the lead
            prec = int(self.prec) - 2 * e
        li = R.inv(lead)
        a = self.coeffs
        out = [R.zero] * n
        if n > 0:
            out[0] = li
        for k in range(1, n):
            s = R.zero
            for j in range(1, min(k, len(a) - 1) + 1):
                s = R.add(s, R.mul(a[j], out[k - j]))
            out[k] = R.neg(R.mul(li, s))
        return Laurent(R, -e, out, prec=prec)

    def qpow_coeffwise(self, k: int = 1) -> "Laurent":
        """sum c_i X^i -> sum c_i^(q^k) X^(i q^k); the q-power map when the
        exponent variable is itself an element of a characteristic-p ring."""
        R = self.ring
        step = R.q ** k if hasattr(R, "q") else None
        if step is None:
            raise TypeError("coefficient ring has no q")
        if not self.coeffs:
            p = self.prec
            return Laurent.zero(R, prec=None if p == INF else int(p) * step)
        out = [R.zero] * ((len(self.coeffs) - 1) * step + 1)
        for i, c in enumerate(self.coeffs):
            out[i * step] = R.qpow(c, k)
        p = None if self.prec == INF else int(self.prec) * step
        return Laurent(R, self.emin * step, out, prec=p)

    # -- comparisons -----------------------------------------------------

    def eq_mod(self, other: "Laurent", N: int) -> bool:
        """Coefficientwise equality for exponents < N; raises if either
        operand is not known that far."""
        if self.prec < N or other.prec < N:
            raise PrecisionError(
                f"equality mod exponent {N} undecidable at precisions {self.prec}, {other.prec}"
            )
        lo = min(self.emin, other.emin, N)
        for e in range(lo, N):
            if self.coeff(e) != other.coeff(e):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Laurent):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.emin == other.emin
            and self.coeffs == other.coeffs
            and self.prec == other.prec
        )

    def __hash__(self):
        return hash((self.emin, self.coeffs, self.prec))

    # -- formatting ------------------------------------------------------

    def text(self, var: str = "t", inverse: bool = True) -> str:
        """Canonical form `t^2 + 1 + 2*t^-1 + O(t^-5)`.

        With inverse=True the stored exponent e prints as var^-e (the
        k_oo convention, exponents in u = 1/t); otherwise as var^e.
        """
        R = self.ring
        sign = -1 if inverse else 1
        items = [(sign * (self.emin + i), c) for i, c in enumerate(self.coeffs) if not R.is_zero(c)]
        items.sort(key=lambda t: -t[0])
        terms = []
        for e, c in items:
            cs = R.el_str(c)
            if ("+" in cs or "-" in cs or "*" in cs) and len(cs) > 1:
                cs = f"({cs})"
            if e == 0:
                terms.append(cs)
            else:
                v = var if e == 1 else f"{var}^{e}"
                terms.append(v if cs == "1" else f"{cs}*{v}")
        body = " + ".join(terms) if terms else "0"
        if self.prec != INF:
            pe = sign * int(self.prec)
            body += f" + O({var}^{pe})"
        return body

    def __repr__(self):
        return f"Laurent({self.text(var='X', inverse=False)})"


class NonUnitLeadError(ZeroDivisionError):
    """Leading coefficient is not a unit.  Carries the offending value so
    callers can retry through the group-ring inversion path or report
    non-invertibility vs insufficient precision."""

    def __init__(self, value: Laurent, msg: str):
        super().__init__(msg)
        self.value = value


class LaurentRing(Ring):
    """Laurent series over `coeff` as a Ring, with a default precision used
    for `one`/`from_int`; elements are Laurent instances."""

    def __init__(self, coeff: Ring, default_prec: int | None = None):
        self.coeff = coeff
        self.default_prec = default_prec
        self.zero = Laurent.zero(coeff, prec=default_prec)
        self.one = Laurent.one(coeff, prec=default_prec)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a.is_zero()

    def is_unit(self, a):
        return bool(a.coeffs) and self.coeff.is_unit(a.coeffs[0])

    def inv(self, a):
        return a.inverse(work_prec=self.default_prec)

    def from_int(self, k):
        c = self.coeff.from_int(k)
        out = Laurent.monomial(self.coeff, c, 0, prec=self.default_prec)
        return out

    def el_str(self, a):
        return a.text(var="Z", inverse=False)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentRing)
            and other.coeff == self.coeff
            and other.default_prec == self.default_prec
        )

    def __hash__(self):
        return hash(("LaurentRing", self.coeff, self.default_prec))
