"""t-modules over A = F_q[t]: structural morphisms in the twisted
polynomial ring, Lie actions, exponential and logarithm coefficients.

A structural morphism is phi(t) = d + M_1 tau + ... + M_l tau^l with
matrix entries in A and d = t Id + N, N nilpotent.  tau is q-power
twisting: tau x = x^q tau, so multiplying twisted polynomials twists the
right factor's entries coefficientwise.  Exponential coefficients live
in M_n(k), entries exact rational functions, and solve
e_m d^(m) - d e_m = sum M_j e_(m-j)^(j) by a terminating nilpotent
fixed-point iteration.
"""

from __future__ import annotations

from .ffield import FqField
from .matrix import Mat
from .poly import PolyRing, RatFuncField, pconst, pqpow, ptrim


class TauPoly:
    """Finite list of matrix coefficients of tau^0, tau^1, ...  over a
    coefficient ring that knows qpow (A or k)."""

    __slots__ = ("ring", "n", "coeffs")

    def __init__(self, ring, n: int, coeffs):
        self.ring = ring
        self.n = n
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def tau_degree(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def zero(ring, n: int) -> "TauPoly":
        return TauPoly(ring, n, [])

    @staticmethod
    def const(ring, mat: Mat) -> "TauPoly":
        return TauPoly(ring, mat.nrows, [mat])

    def coeff(self, k: int) -> Mat:
        if k < len(self.coeffs):
            return self.coeffs[k]
        return Mat.zero(self.ring, self.n)

    def twist(self, k: int) -> "TauPoly":
        """Entrywise q^k-power of every coefficient (conjugation by tau^k)."""
        R = self.ring
        return TauPoly(R, self.n, [m.map(lambda c: R.qpow(c, k)) for m in self.coeffs])

    def __add__(self, other: "TauPoly") -> "TauPoly":
        R, n = self.ring, self.n
        top = max(len(self.coeffs), len(other.coeffs))
        return TauPoly(R, n, [self.coeff(k) + other.coeff(k) for k in range(top)])

    def __neg__(self) -> "TauPoly":
        return TauPoly(self.ring, self.n, [-m for m in self.coeffs])

    def __sub__(self, other: "TauPoly") -> "TauPoly":
        return self + (-other)

    def __mul__(self, other: "TauPoly") -> "TauPoly":
        # (A tau^i)(B tau^j) = A B^(q^i) tau^(i+j)
        R, n = self.ring, self.n
        if not self.coeffs or not other.coeffs:
            return TauPoly.zero(R, n)
        out = [Mat.zero(R, n) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b.map(lambda c: R.qpow(c, i))
        return TauPoly(R, n, out)

    def __eq__(self, other):
        return (
            isinstance(other, TauPoly)
            and other.ring == self.ring
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        return " + ".join(f"{m!r}*tau^{k}" for k, m in enumerate(self.coeffs)) or "0"


class TModuleSpec:
    """An n-dimensional t-module: matrices [d, M_1, ..., M_l] over A with
    d = t Id + N, N nilpotent."""

    def __init__(self, apoly: PolyRing, matrices: list[Mat], label: str = "tmodule"):
        self.apoly = apoly
        self.field: FqField = apoly.coeff
        self.matrices = list(matrices)
        self.label = label
        self.n = matrices[0].nrows
        self.ell = len(matrices) - 1
        N = self.nilpotent_part()
        power = N
        for _ in range(self.n):
            power = power * N
        if not power.is_zero():
            raise ValueError("d[t] - t*Id is not nilpotent")
        self._exp_cache: list[Mat] = []
        self._log_cache: list[Mat] = []

    @property
    def d(self) -> Mat:
        return self.matrices[0]

    def nilpotent_part(self) -> Mat:
        A = self.apoly
        tId = Mat.identity(A, self.n).scale(A.gen)
        return self.d - tId

    @property
    def is_drinfeld(self) -> bool:
        return self.n == 1

    def phi_t(self) -> TauPoly:
        return TauPoly(self.apoly, self.n, self.matrices)

    def phi_eval(self, a: tuple) -> TauPoly:
        """phi(a) for a in A, by Horner in the twisted ring."""
        A = self.apoly
        out = TauPoly.zero(A, self.n)
        phit = self.phi_t()
        for c in reversed(a):
            out = out * phit + TauPoly.const(
                A, Mat.identity(A, self.n).scale(pconst(self.field, c))
            )
        return out

    def d_eval(self, a: tuple) -> Mat:
        """Lie action d[a]: the tau-constant coefficient of phi(a)."""
        A = self.apoly
        out = Mat.zero(A, self.n)
        power = Mat.identity(A, self.n)
        for c in a:
            out = out + power.scale(pconst(self.field, c))
            power = power * self.d
        return out

    # -- exponential / logarithm ------------------------------------------

    def exp_coeffs(self, count: int) -> list[Mat]:
        """e_0 = Id, e_1, ..., e_(count-1) over k, satisfying
        e_m d^(m) - d e_m = sum_(j=1..min(m,l)) M_j e_(m-j)^(j)."""
        K = RatFuncField(self.field, self.apoly.var)
        n = self.n
        es = self._exp_cache
        if not es:
            es.append(Mat.identity(K, n))
        while len(es) < count:
            m = len(es)
            B = Mat.zero(K, n)
            for j in range(1, min(m, self.ell) + 1):
                Mj = self.matrices[j].map(K.from_poly, K)
                B = B + Mj * es[m - j].map(lambda c: K.qpow(c, j))
            es.append(self._solve_sylvester(K, B, m))
        return es[:count]

    def _solve_sylvester(self, K: RatFuncField, B: Mat, m: int) -> Mat:
        """Solve X (t^(q^m) Id + N') - (t Id + N) X = B over k, where
        N' = N twisted by q^m.  With c = t^(q^m) - t this is
        c X = B - X N' + N X, a contraction since N, N' are nilpotent."""
        n = self.n
        N = self.nilpotent_part().map(K.from_poly, K)
        Nm = self.nilpotent_part().map(lambda a: K.from_poly(pqpow(self.field, a, m)), K)
        c = K.sub(K.qpow(K.gen, m), K.gen)
        cinv = K.inv(c)
        X = Mat.zero(K, n)
        for _ in range(2 * n + 2):
            X2 = (B - X * Nm + N * X).scale(cinv)
            if X2 == X:
                return X
            X = X2
        raise ArithmeticError("Sylvester iteration failed to terminate")

    def log_coeffs(self, count: int) -> list[Mat]:
        """Compositional inverse of the exponential:
        l_m = -sum_(i=1..m) e_i l_(m-i)^(i)."""
        K = RatFuncField(self.field, self.apoly.var)
        n = self.n
        es = self.exp_coeffs(count)
        ls = self._log_cache
        if not ls:
            ls.append(Mat.identity(K, n))
        while len(ls) < count:
            m = len(ls)
            S = Mat.zero(K, n)
            for i in range(1, m + 1):
                S = S + es[i] * ls[m - i].map(lambda c: K.qpow(c, i))
            ls.append(-S)
        return ls[:count]

    def exp_functional_residual(self, order: int) -> bool:
        """Check Exp(d z) = phi(t)(Exp z) on coefficients up to z^(q^order)."""
        K = RatFuncField(self.field, self.apoly.var)
        es = self.exp_coeffs(order + 1)
        d = self.d.map(K.from_poly, K)
        for m in range(order + 1):
            lhs = es[m] * d.map(lambda c: K.qpow(c, m))
            rhs = Mat.zero(K, self.n)
            for j in range(0, min(m, self.ell) + 1):
                Mj = self.matrices[j].map(K.from_poly, K)
                rhs = rhs + Mj * es[m - j].map(lambda c: K.qpow(c, j))
            if lhs != rhs:
                return False
        return True

    def norm_growth_constant(self) -> int:
        """Smallest C with ||d^m|| <= q^(m+C) for -8 <= m <= 8 (sup norm at
        the infinite place, ||t|| = q)."""
        K = RatFuncField(self.field, self.apoly.var)
        d = self.d.map(K.from_poly, K)
        dinv = _mat_inverse_over_field(d)
        C = 0
        for sign in (1, -1):
            power = Mat.identity(K, self.n)
            step = d if sign == 1 else dinv
            for m in range(1, 9):
                power = power * step
                norm = max(-K.inf_val(c) for row in power.rows for c in row)
                C = max(C, norm - sign * m)
        return C

    def __repr__(self):
        return f"TModule({self.label}, n={self.n}, l={self.ell})"


def _mat_inverse_over_field(m: Mat) -> Mat:
    from .matrix import gauss_inverse

    return gauss_inverse(m)


def make_carlitz(field: FqField) -> TModuleSpec:
    """The Carlitz module phi(t) = t + tau."""
    A = PolyRing(field)
    one = Mat.identity(A, 1)
    return TModuleSpec(A, [one.scale(A.gen), one], label="carlitz")


def make_drinfeld(field: FqField, coeffs: list[tuple]) -> TModuleSpec:
    """Rank-r Drinfeld module phi(t) = t + a_1 tau + ... + a_r tau^r.

    coeffs are the a_i as A-tuples; the leading one must be a nonzero
    constant so the twist machinery stays integral.
    """
    A = PolyRing(field)
    if not coeffs or ptrim(field, coeffs[-1]) == ():
        raise ValueError("leading coefficient must be nonzero")
    mats = [Mat.identity(A, 1).scale(A.gen)]
    for a in coeffs:
        mats.append(Mat(A, [[ptrim(field, a)]]))
    return TModuleSpec(A, mats, label=f"drinfeld[{len(coeffs)}]")
