"""Field axioms, polynomial utilities, Laurent precision arithmetic and
the division-free characteristic polynomial."""

import itertools
import random

import pytest

from tmodlv.ffield import ExtField, FqField
from tmodlv.groups import GroupSpec
from tmodlv.grpring import GroupRing
from tmodlv.laurent import Laurent, PrecisionError
from tmodlv.matrix import Mat, berkowitz_charpoly, charpoly_cofactor, det_berkowitz
from tmodlv.poly import (
    PolyRing,
    irreducible_count_oracle,
    monic_irreducibles,
    pdivmod,
    pmul,
    poly_str,
)


def small_fields():
    out = []
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61):
        out.append(FqField(p))
    for p, r in ((2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (5, 2), (7, 2)):
        base = FqField(p)
        mod = monic_irreducibles(base, r)[0]
        out.append(FqField(p, r, mod))
    return [F for F in out if F.q <= 64]


@pytest.mark.parametrize("F", small_fields(), ids=lambda F: f"q{F.q}")
def test_field_axioms_exhaustive(F):
    els = list(F.elements())
    for a, b in itertools.product(els, els):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els, els, els):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, F.zero) == a
        assert F.mul(a, F.one) == a
        assert F.add(a, F.neg(a)) == F.zero
        if a != F.zero:
            assert F.mul(a, F.inv(a)) == F.one


@pytest.mark.parametrize("F", small_fields(), ids=lambda F: f"q{F.q}")
def test_frobenius_fixes_field(F):
    for a in F.elements():
        assert F.pow(a, F.q) == a


def test_ext_field_tower():
    F4 = FqField(2, 2, monic_irreducibles(FqField(2), 2)[0])
    mod = monic_irreducibles_ext(F4, 2)
    E = ExtField(F4, mod)
    assert E.size == 16
    for a in E.elements():
        assert E.pow(a, 16) == a
        assert E.qpow(a, 2) == a  # Galois group of GF(16)/GF(4) has order 2
    g = E.multiplicative_generator()
    seen = {E.one}
    x = g
    while x != E.one:
        seen.add(x)
        x = E.mul(x, g)
    assert len(seen) == 15


def monic_irreducibles_ext(F, d):
    # first monic irreducible of degree d over an FqField, reused in tests
    return monic_irreducibles(F, d)[0]


def test_enumerate_monic_irreducibles_examples():
    F2 = FqField(2)
    P = PolyRing(F2)
    deg1 = monic_irreducibles(F2, 1)
    assert [poly_str(F2, f) for f in deg1] == ["t", "t + 1"]
    deg2 = monic_irreducibles(F2, 2)
    assert [poly_str(F2, f) for f in deg2] == ["t^2 + t + 1"]
    deg3 = monic_irreducibles(F2, 3)
    assert [poly_str(F2, f) for f in deg3] == ["t^3 + t + 1", "t^3 + t^2 + 1"]


@pytest.mark.parametrize("q,build", [(2, lambda: FqField(2)), (3, lambda: FqField(3)),
                                     (4, lambda: FqField(2, 2, monic_irreducibles(FqField(2), 2)[0]))])
def test_irreducible_counts_match_moebius_oracle(q, build):
    F = build()
    for d in range(1, 9):
        assert len(monic_irreducibles(F, d)) == irreducible_count_oracle(q, d)


def test_poly_divmod_and_degree():
    F = FqField(3)
    rng = random.Random(7)
    for _ in range(100):
        a = tuple(rng.randrange(3) for _ in range(rng.randrange(1, 7)))
        b = tuple(rng.randrange(3) for _ in range(rng.randrange(1, 5)))
        from tmodlv.poly import ptrim

        a, b = ptrim(F, a), ptrim(F, b)
        if not b:
            continue
        if not F.is_unit(b[-1]):
            continue
        q, r = pdivmod(F, a, b)
        from tmodlv.poly import padd

        assert padd(F, pmul(F, q, b), r) == a
        assert len(r) < len(b)


# -- Laurent ------------------------------------------------------------------


def test_laurent_inverse_examples():
    F = FqField(2)
    one = Laurent.one(F, prec=4)
    assert one.inverse().eq_mod(one, 4)
    t = Laurent.monomial(F, 1, -1, prec=4)  # t = u^-1
    ti = t.inverse()
    assert ti.lead_exp() == 1 and ti.lead() == 1
    x = Laurent(F, 0, [1, 1], prec=4)  # 1 + u
    xi = x.inverse()
    assert (x * xi).eq_mod(Laurent.one(F, prec=4), 4)
    assert xi.coeffs == (1, 1, 1, 1)


def test_laurent_precision_rules():
    F = FqField(3)
    a = Laurent(F, -1, [1, 2, 1], prec=3)
    b = Laurent(F, 2, [2], prec=5)
    assert (a + b).prec == 3
    assert (a * b).prec == 4  # min(3 + 2, 5 + (-1))
    with pytest.raises(PrecisionError):
        a.coeff(3)
    with pytest.raises(PrecisionError):
        a.eq_mod(a, 4)


def test_laurent_associativity_and_inverse_random():
    F = FqField(5)
    rng = random.Random(11)
    for _ in range(60):
        xs = []
        for _ in range(3):
            emin = rng.randrange(-3, 2)
            coeffs = [rng.randrange(5) for _ in range(5)]
            xs.append(Laurent(F, emin, coeffs, prec=emin + 5))
        x, y, z = xs
        lhs, rhs = (x * y) * z, x * (y * z)
        n = int(min(lhs.prec, rhs.prec))
        assert lhs.eq_mod(rhs, n)
        if x.coeffs and F.is_unit(x.coeffs[0]):
            xi = x.inverse()
            n = int(min((x * xi).prec, 20))
            assert (x * xi).eq_mod(Laurent.one(F, prec=n), n)


def test_to_t_poly_roundtrip():
    F = FqField(3)
    poly = (1, 2, 0, 1)  # 1 + 2t + t^3
    lau = Laurent.from_t_poly(F, poly)
    assert lau.to_t_poly() == poly
    assert lau.prec == float("inf")


# -- Berkowitz ---------------------------------------------------------------


def test_berkowitz_trivial_cases():
    F = FqField(5)
    z = Mat.zero(F, 2)
    assert berkowitz_charpoly(z) == (0, 0, 1)  # X^2
    i2 = Mat.identity(F, 2)
    assert berkowitz_charpoly(i2) == (1, F.neg(2), 1)  # (X-1)^2


def test_berkowitz_matches_cofactor_over_group_ring():
    F = FqField(3)
    G = GroupSpec((2,))
    R = GroupRing(F, G)
    rng = random.Random(5)
    els = [R.make({g: c for g, c in zip(G.elements(), (rng.randrange(3), rng.randrange(3)))}) for _ in range(1)]

    def rand_el():
        return R.make({g: rng.randrange(3) for g in G.elements()})

    for n in (1, 2, 3, 4):
        for _ in range(30 if n <= 3 else 12):
            m = Mat(R, [[rand_el() for _ in range(n)] for _ in range(n)])
            assert berkowitz_charpoly(m) == charpoly_cofactor(m)


def test_det_multiplicative_over_group_ring():
    F = FqField(3)
    R = GroupRing(F, GroupSpec((2, 2)))
    rng = random.Random(13)

    def rand_el():
        return R.make({g: rng.randrange(3) for g in R.group.elements()})

    for _ in range(25):
        a = Mat(R, [[rand_el() for _ in range(3)] for _ in range(3)])
        b = Mat(R, [[rand_el() for _ in range(3)] for _ in range(3)])
        assert det_berkowitz(a * b) == R.mul(det_berkowitz(a), det_berkowitz(b))
