"""Extensions, embeddings, residue modules and lattice reduction at
infinity, for the built-in trivial and Carlitz-cyclotomic data."""

import pytest

from tmodlv.ffield import FqField
from tmodlv.fields import (
    ExtensionData,
    LatticeTable,
    PrimeOfA,
    TamingModule,
    carlitz_cyclotomic_deg1,
    primes_up_to,
    reduce_mod_lattice,
    reduction,
    trivial_extension,
    xi_taming,
)
from tmodlv.grpring import is_monic
from tmodlv.laurent import Laurent
from tmodlv.matrix import Mat
from tmodlv.modsize import gsize
from tmodlv.poly import PolyRing, poly_str
from tmodlv.tmodule import make_carlitz


def test_primes_and_nv():
    F = FqField(2)
    ps = primes_up_to(F, 3)
    assert [p.deg for p in ps] == [1, 1, 2, 3, 3]
    with pytest.raises(ValueError):
        PrimeOfA(F, (0, 0, 0, 0, 1))  # t^4 reducible


def test_trivial_extension_embedding():
    F = FqField(2)
    X = trivial_extension(F)
    # t maps to pi^-1, so embed of t^2+1 has exponents -2 and 0
    emb = X.embed_scalar((F.one, F.zero, F.one), 0)
    assert emb.support() == [-2, 0]
    assert X.places[0].e == 1 and X.places[0].f == 1


def test_cyclotomic_structure_q3():
    F = FqField(3)
    P = PrimeOfA(F, (F.zero, F.one))  # t
    X = carlitz_cyclotomic_deg1(F, P)
    assert X.d == 2 and X.group.order == 2
    # lambda^2 = -t: multiply lambda by lambda
    prod = X.mul_ok([X.apoly.zero, X.apoly.one], [X.apoly.zero, X.apoly.one])
    A = X.apoly
    assert prod == [(F.zero, F.neg(F.one)), A.zero]  # -t
    # sigma(lambda) = -lambda for the nontrivial element
    img = X.g_apply_ok((1,), [A.zero, A.one])
    assert img == [A.zero, (F.neg(F.one),)]
    # p does not divide |G|
    assert X.group.order % F.p != 0


def test_cyclotomic_embedding_consistency():
    F = FqField(3)
    X = carlitz_cyclotomic_deg1(F, PrimeOfA(F, (F.zero, F.one)))
    A = X.apoly
    # lambda^2 + t = 0 at the infinite place
    lam = [A.zero, A.one]
    lam2 = X.mul_ok(lam, lam)
    emb = X.embed_ok(lam2, 0)
    lam_emb = X.basis_embeddings[0][1]
    assert (lam_emb * lam_emb - emb).is_zero()
    # embedding is a ring morphism on all basis pairs
    for i in range(X.d):
        for j in range(X.d):
            ei = X.basis_embeddings[0][i]
            ej = X.basis_embeddings[0][j]
            prod = X.mul_ok(
                [A.one if k == i else A.zero for k in range(X.d)],
                [A.one if k == j else A.zero for k in range(X.d)],
            )
            assert ((ei * ej) - X.embed_ok(prod, 0)).is_zero()


def test_k_slices_roundtrip():
    F = FqField(3)
    X = carlitz_cyclotomic_deg1(F, PrimeOfA(F, (F.zero, F.one)))
    x = Laurent(F, -3, [1, 2, 0, 1, 1, 2, 1], prec=8)
    slices = X.k_slices(x, 0, 8)
    back = X.from_k_slices(slices, 0, int(x.prec))
    n = int(min(back.prec, x.prec))
    assert back.eq_mod(x, n)
    # scalar linearity: multiplying by the image of u shifts the slices
    u = X.u_embed(0, 12)
    xu = (x * u).truncate(8)
    slices_u = X.k_slices(xu, 0, 8)
    for a in range(2):
        lhs = slices_u[a]
        rhs = slices[a].shift(1)
        m = int(min(lhs.prec, rhs.prec, 3))
        assert lhs.eq_mod(rhs, m)


def test_reduction_carlitz_trivial_at_t():
    F = FqField(2)
    X = trivial_extension(F)
    E = make_carlitz(F)
    M = TamingModule(X)
    v = PrimeOfA(F, (F.zero, F.one))
    lie, mod = reduction(X, M, v, E)
    gr = X.gr
    # Lie: t acts by 0 on A/t; module: t acts by 1 (x -> tx + x^2 = x)
    assert gsize(lie) == (gr.zero, gr.one)  # t
    assert gsize(mod) == (gr.one, gr.one)  # t + 1


@pytest.mark.parametrize("q", [2, 3])
def test_reduction_ranks(q):
    from tmodlv.motive import carlitz_tensor

    F = FqField(q)
    X = trivial_extension(F)
    M = TamingModule(X)
    modules = [make_carlitz(F), carlitz_tensor(F, 2)]
    pairs = [(E, v) for E in modules for v in primes_up_to(F, 3)]
    assert len(pairs) >= 10  # 20+ across the two q values
    for E, v in pairs:
        lie, mod = reduction(X, M, v, E)
        assert lie.rank == E.n * v.deg
        assert mod.rank == E.n * v.deg
        gl, gm = gsize(lie), gsize(mod)
        assert len(gl) - 1 == lie.rank and len(gm) - 1 == mod.rank
        from tmodlv.laurent import Laurent as L

        assert is_monic(L.from_t_poly(lie.gr, gl))


def test_reduction_cyclotomic_free_rank():
    F = FqField(3)
    X = carlitz_cyclotomic_deg1(F, PrimeOfA(F, (F.zero, F.one)))
    E = make_carlitz(F)
    M = TamingModule(X)
    v = PrimeOfA(F, (F.one, F.one))  # t + 1, split/inert away from conductor
    lie, mod = reduction(X, M, v, E)
    assert lie.rank == 1 and mod.rank == 1
    f = gsize(lie)
    # Lie size is the characteristic polynomial of t on O_K/v: degree 1 over A[G]
    assert len(f) == 2


def test_xi_taming_kills_tau():
    F = FqField(2)
    X = trivial_extension(F)
    E = make_carlitz(F)
    v = PrimeOfA(F, (F.zero, F.one))
    M = xi_taming(X, [v])
    assert poly_str(F, M.xi) == "t"
    lie, mod = reduction(X, M, v, E)
    assert gsize(lie) == gsize(mod)  # identity map is an A[G]-isomorphism


def test_xi_taming_empty_set_is_ok():
    F = FqField(2)
    X = trivial_extension(F)
    M = xi_taming(X, [])
    assert M.is_all_of_ok


def test_reduce_mod_lattice_trivial():
    F = FqField(2)
    X = trivial_extension(F)
    tab = LatticeTable(X, TamingModule(X))
    # t^2 + 1 + u  ->  u
    x = (Laurent(F, -2, [1, 0, 1, 1], prec=6),)
    red = reduce_mod_lattice(x, tab, 6)
    assert red[0].support() == [1]
    again = reduce_mod_lattice(red, tab, 6)
    assert again[0] == red[0]


def test_reduce_mod_lattice_xi_scaled():
    F = FqField(2)
    X = trivial_extension(F)
    v = PrimeOfA(F, (F.zero, F.one))
    tab = LatticeTable(X, xi_taming(X, [v]))
    # constants are in the fundamental domain of t*A
    x = (Laurent(F, 0, [1], prec=6),)
    red = reduce_mod_lattice(x, tab, 6)
    assert red[0].support() == [0]
    assert 0 in tab.domain_exponents(0, 6)
    assert 1 in tab.domain_exponents(0, 6)


def test_reduce_mod_lattice_cyclotomic():
    F = FqField(3)
    X = carlitz_cyclotomic_deg1(F, PrimeOfA(F, (F.zero, F.one)))
    tab = LatticeTable(X, TamingModule(X))
    # lambda^3 = -t*lambda is in O_K: reduces to zero
    lam_emb = X.basis_embeddings[0][1]
    x = ((lam_emb * lam_emb * lam_emb).truncate(8),)
    red = reduce_mod_lattice(x, tab, 8)
    assert red[0].is_zero()
    assert tab.domain_exponents(0, 6) == [1, 2, 3, 4, 5]


def test_g_action_at_infinity_matches_ok_action():
    F = FqField(3)
    X = carlitz_cyclotomic_deg1(F, PrimeOfA(F, (F.zero, F.one)))
    A = X.apoly
    g = (1,)
    for coords in ([A.one, A.zero], [A.zero, A.one], [(F.one, F.one), (F.one,)]):
        lhs = X.embed_ok(X.g_apply_ok(g, list(coords)), 0)
        rhs = X.places[0].g_apply(g, X.embed_ok(list(coords), 0))
        assert (lhs - rhs).is_zero()
