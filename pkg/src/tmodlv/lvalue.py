"""Euler factors and truncated special L-values.

The factor at a prime v is |Lie_E(M/v)|_G / |E(M/v)|_G, a ratio of monic
size polynomials of equal degree, so it lies in 1 + u F_q[G][[u]].  The
value at s = 0 is the product over all primes; it stabilizes u-adically,
and the computation includes primes up to a cutoff degree with an a
posteriori certificate: every included factor of degree beyond the
target precision must be trivial mod u^(N+1), and pushing the cutoff one
degree higher must not move the truncation.
"""

from __future__ import annotations

from .fields import ExtensionData, PrimeOfA, TamingModule, primes_up_to, reduction, xi_taming
from .grpring import is_monic
from .laurent import Laurent
from .modsize import gsize
from .tmodule import TModuleSpec


class CutoffError(ArithmeticError):
    """The cutoff rule failed to certify stabilization; carries the
    offending prime and its measured stabilization order."""

    def __init__(self, msg, prime=None, order=None):
        super().__init__(msg)
        self.prime = prime
        self.order = order


class EulerFactor:
    def __init__(self, prime: PrimeOfA, numerator: tuple, denominator: tuple, ratio: Laurent):
        self.prime = prime
        self.numerator = numerator  # |Lie_E(M/v)|_G, ascending t-coefficients
        self.denominator = denominator  # |E(M/v)|_G
        self.ratio = ratio

    def stabilization_order(self) -> int:
        """Largest s with ratio = 1 mod u^s (capped by the precision)."""
        r = self.ratio
        gr = r.ring
        s = 0
        while s < r.prec:
            c = r.coeff(s)
            if c != (gr.one if s == 0 else gr.zero):
                return s
            s += 1
        return s

    def __repr__(self):
        return f"EulerFactor({self.prime!r})"


class ThetaValue:
    def __init__(self, value: Laurent, precision: int, cutoff: int, factors: list[EulerFactor]):
        self.value = value
        self.precision = precision
        self.cutoff = cutoff
        self.factors = factors

    def __repr__(self):
        return f"Theta({self.value.text()})"


def euler_factor(
    E: TModuleSpec, X: ExtensionData, M: TamingModule, v: PrimeOfA, prec: int
) -> EulerFactor:
    lie, mod = reduction(X, M, v, E)
    num = gsize(lie)
    den = gsize(mod)
    gr = X.gr
    num_l = Laurent.from_t_poly(gr, num)
    den_l = Laurent.from_t_poly(gr, den)
    den_inv = den_l.inverse(work_prec=prec + len(den))
    ratio = (num_l * den_inv).truncate(prec)
    if len(num) != len(den) or len(num) - 1 != E.n * v.deg:
        raise ArithmeticError(f"size degree mismatch at {v!r}")
    return EulerFactor(v, num, den, ratio)


def default_cutoff(E: TModuleSpec, N: int) -> int:
    """Include primes of degree <= N + n(1 + tau-degree)."""
    return N + E.n * (1 + E.ell)


def theta0(
    E: TModuleSpec,
    X: ExtensionData,
    M: TamingModule,
    N: int,
    cutoff: int | None = None,
    certify: bool = True,
) -> ThetaValue:
    """Theta(0) for (K/k, E, M): the Euler product over all primes of
    degree <= cutoff, truncated mod u^(N+1)."""
    if N < 1:
        raise ValueError("precision must be positive")
    gr = X.gr
    D = cutoff if cutoff is not None else default_cutoff(E, N)
    prec = N + 1
    total = Laurent.one(gr, prec=prec)
    factors = []
    for v in primes_up_to(X.field, D):
        f = euler_factor(E, X, M, v, prec)
        factors.append(f)
        total = (total * f.ratio).truncate(prec)
    if certify:
        # a posteriori cutoff certificate: the next degree adds nothing
        for v in primes_up_to_degree(X.field, D + 1):
            f = euler_factor(E, X, M, v, prec)
            if f.stabilization_order() < prec:
                raise CutoffError(
                    f"cutoff {D} not stable: degree-{D + 1} prime {v!r} contributes",
                    prime=v,
                    order=f.stabilization_order(),
                )
    if not is_monic(total):
        raise ArithmeticError("theta value left 1 + u F_q[G][[u]]")
    return ThetaValue(total, N, D, factors)


def primes_up_to_degree(field, d: int):
    from .poly import monic_irreducibles

    return [PrimeOfA(field, f, _trusted=True) for f in monic_irreducibles(field, d)]


def theta_S(
    E: TModuleSpec,
    X: ExtensionData,
    S: list[PrimeOfA],
    N: int,
    cutoff: int | None = None,
) -> ThetaValue:
    """The S-incomplete value: theta0 with the xi-scaled taming module
    built from S, whose factors inside S are exactly 1."""
    M = xi_taming(X, S)
    theta = theta0(E, X, M, N, cutoff=cutoff)
    gr = X.gr
    for f in theta.factors:
        if f.prime in S and f.stabilization_order() <= N:
            raise ArithmeticError(f"factor at {f.prime!r} in S did not vanish")
    return theta


def theta_m(
    E: TModuleSpec,
    X: ExtensionData,
    S: list[PrimeOfA],
    m: int,
    N: int,
    cutoff: int | None = None,
) -> ThetaValue:
    """Theta_S(m) through the Carlitz twist: theta_S of E(m) at 0."""
    from .motive import drinfeld_twist

    if m == 0:
        return theta_S(E, X, S, N, cutoff=cutoff)
    if not E.is_drinfeld:
        raise ValueError("positive-integer values are defined for Drinfeld modules")
    tw = drinfeld_twist(E, m)
    return theta_S(tw, X, S, N, cutoff=cutoff)


def zeta_sum_oracle(field, N: int, omit: list[PrimeOfA] = ()) -> Laurent:
    """Independent oracle for the Carlitz/trivial case: the truncation of
    sum over monic a of 1/a, with the factors of omitted primes divided
    out; brute-force summation, no Euler product."""
    F = field
    total = Laurent.zero(F, prec=N + 1)
    for d in range(0, N + 1):
        for a in _monic_of_degree(F, d):
            inv = Laurent.from_t_poly(F, a).inverse(work_prec=N + 1 + 2 * d)
            total = (total + inv).truncate(N + 1)
    for v in omit:
        # multiply by (1 - 1/P) to remove the factor P/(P-1)
        pinv = Laurent.from_t_poly(F, v.poly).inverse(work_prec=N + 3 + 2 * v.deg)
        total = (total * (Laurent.one(F, prec=N + 1) - pinv)).truncate(N + 1)
    return total


def _monic_of_degree(F, d: int):
    if d == 0:
        return [(F.one,)]
    out = []
    for code in range(F.q ** d):
        body = []
        c = code
        for _ in range(d):
            body.append(c % F.q)
            c //= F.q
        out.append(tuple(body) + (F.one,))
    return out
