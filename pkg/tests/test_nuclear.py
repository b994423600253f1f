"""Nuclear determinants: finite-quotient sizes, nucleus independence,
multiplicativity, and the trace formula against theta values."""

import pytest

from tmodlv.ffield import FqField
from tmodlv.fields import PrimeOfA, TamingModule, carlitz_cyclotomic_deg1, trivial_extension, xi_taming
from tmodlv.laurent import Laurent
from tmodlv.matrix import Mat
from tmodlv.motive import carlitz_tensor
from tmodlv.nuclear import (
    AmbientQuotient,
    FiniteQuotient,
    TauSeriesOperator,
    make_theta_operator,
    nuclear_det,
    trace_check,
)
from tmodlv.tmodule import TauPoly, make_carlitz, make_drinfeld


def test_theta_operator_carlitz_coefficients():
    F = FqField(2)
    C = make_carlitz(F)
    Phi = make_theta_operator(C)
    A = C.apoly
    # phi_m = -tau * t^(m-1) = -t^(q(m-1)) tau after normal ordering
    for m in (1, 2, 3):
        phi = Phi.coeff(m)
        assert phi.tau_degree == 1
        expect = tuple([F.zero] * (2 * (m - 1)) + [F.one])
        assert phi.coeff(1)[0, 0] == expect


def test_theta_operator_rank2_first_coefficient():
    F = FqField(2)
    E = make_drinfeld(F, [(F.one,), (F.one,)])
    Phi = make_theta_operator(E)
    phi1 = Phi.coeff(1)
    assert phi1.coeff(1)[0, 0] == (F.one,)
    assert phi1.coeff(2)[0, 0] == (F.one,)


def test_nuclear_det_zero_operator_is_one():
    F = FqField(2)
    X = trivial_extension(F)
    V = AmbientQuotient(X, TamingModule(X), 1)
    A = make_carlitz(F).apoly
    Phi = TauSeriesOperator(A, 1, lambda m: TauPoly.zero(A, 1))
    det = nuclear_det(Phi, V, 5)
    assert det.eq_mod(Laurent.one(X.gr, prec=5), 5)


def test_nuclear_det_finite_scalar():
    # V = F_q, phi_1 = c, higher 0: det = 1 + cZ
    F = FqField(3)
    X = trivial_extension(F)
    gr = X.gr
    c = gr.constant(2)
    V = FiniteQuotient(gr, 1, lambda m: Mat(gr, [[c]]) if m == 1 else None)
    det = nuclear_det(None, V, 4)
    assert det.coeff(0) == gr.one and det.coeff(1) == c and det.coeff(2) == gr.zero


def test_finite_det_recovers_gsize():
    """|V|_G = t^m det(1 - t/T | V)|_(T=t): the finite nuclear det with
    phi_1 = -Theta_t equals u^m * (size polynomial)."""
    F = FqField(2)
    X = trivial_extension(F)
    E = make_carlitz(F)
    from tmodlv.fields import reduction
    from tmodlv.modsize import gsize

    v = PrimeOfA(F, (F.one, F.one, F.one))
    lie, mod = reduction(X, TamingModule(X), v, E)
    for B in (lie, mod):
        theta = B.theta_t
        V = FiniteQuotient(B.gr, B.rank, lambda m: -theta if m == 1 else None)
        det = nuclear_det(None, V, 8)
        size = Laurent.from_t_poly(B.gr, gsize(B))
        expect = (size.shift(B.rank)).truncate(8)  # t^m * ... in u-exponents
        assert det.eq_mod(expect, 8)


def test_nucleus_index_examples():
    F = FqField(2)
    X = trivial_extension(F)
    V = AmbientQuotient(X, TamingModule(X), 1)
    C = make_carlitz(F)
    A = C.apoly
    tau = TauPoly(A, 1, [Mat.zero(A, 1), Mat.identity(A, 1)])
    assert V.nucleus_index_tau([tau]) == 1
    t2tau = TauPoly(A, 1, [Mat.zero(A, 1), Mat.identity(A, 1).scale((0, 0, F.one))])
    assert V.nucleus_index_tau([t2tau]) == 3  # ceil((1+2)/(q-1)) = 3
    assert V.verify_nucleus(tau, 1)
    assert V.verify_nucleus(t2tau, 3)


def test_nucleus_independence():
    F = FqField(2)
    X = trivial_extension(F)
    V = AmbientQuotient(X, TamingModule(X), 1)
    Phi = make_theta_operator(make_carlitz(F))
    d1 = nuclear_det(Phi, V, 5)
    d2 = nuclear_det(Phi, V, 5, depth_extra=2)
    assert d1.eq_mod(d2, 5)


def test_multiplicativity_finite():
    import random

    F = FqField(3)
    X = carlitz_cyclotomic_deg1(F, PrimeOfA(F, (F.zero, F.one)))
    gr = X.gr
    rng = random.Random(17)

    def rand_mat():
        return Mat(
            gr,
            [
                [gr.make({g: rng.randrange(3) for g in gr.group.elements()}) for _ in range(2)]
                for _ in range(2)
            ],
        )

    N = 4
    for _ in range(10):
        A_by_m = {m: rand_mat() for m in range(1, N)}
        B_by_m = {m: rand_mat() for m in range(1, N)}
        # compose (1+A)(1+B) - 1 as Z-series
        C_by_m = {}
        for m in range(1, N):
            acc = A_by_m[m] + B_by_m[m]
            for i in range(1, m):
                acc = acc + A_by_m[i] * B_by_m[m - i]
            C_by_m[m] = acc
        VA = FiniteQuotient(gr, 2, lambda m, d=A_by_m: d.get(m))
        VB = FiniteQuotient(gr, 2, lambda m, d=B_by_m: d.get(m))
        VC = FiniteQuotient(gr, 2, lambda m, d=C_by_m: d.get(m))
        dA, dB, dC = (nuclear_det(None, V, N) for V in (VA, VB, VC))
        assert dC.eq_mod((dA * dB).truncate(N), N)


def test_direct_sum_multiplicativity():
    F = FqField(2)
    X = trivial_extension(F)
    gr = X.gr
    a = Mat(gr, [[gr.one]])
    b = Mat(gr, [[gr.constant(F.one)]])
    VA = FiniteQuotient(gr, 1, lambda m: a if m == 1 else None)
    VB = FiniteQuotient(gr, 1, lambda m: b if m == 2 else None)
    both = {1: Mat(gr, [[gr.one, gr.zero], [gr.zero, gr.zero]]),
            2: Mat(gr, [[gr.zero, gr.zero], [gr.zero, gr.constant(F.one)]])}
    VAB = FiniteQuotient(gr, 2, lambda m: both.get(m))
    N = 5
    dA, dB, dAB = (nuclear_det(None, V, N) for V in (VA, VB, VAB))
    assert dAB.eq_mod((dA * dB).truncate(N), N)


def test_alpha_psi_swap_scalar():
    # det(1 + a phi Z^m) = det(1 + phi a Z^m) on a scalar instance
    F = FqField(3)
    X = trivial_extension(F)
    gr = X.gr
    a = gr.constant(2)
    phi = gr.constant(1)
    V1 = FiniteQuotient(gr, 1, lambda m: Mat(gr, [[gr.mul(a, phi)]]) if m == 2 else None)
    V2 = FiniteQuotient(gr, 1, lambda m: Mat(gr, [[gr.mul(phi, a)]]) if m == 2 else None)
    assert nuclear_det(None, V1, 5).eq_mod(nuclear_det(None, V2, 5), 5)


def test_trace_formula_carlitz_q2():
    F = FqField(2)
    X = trivial_extension(F)
    res = trace_check(make_carlitz(F), X, TamingModule(X), 4)
    assert res.is_zero()


def test_trace_formula_with_xi_taming():
    F = FqField(2)
    X = trivial_extension(F)
    M = xi_taming(X, [PrimeOfA(F, (F.zero, F.one))])
    res = trace_check(make_carlitz(F), X, M, 3)
    assert res.is_zero()
