"""Anderson motives for the built-in families and the conversion back to
t-modules, which is how Carlitz tensor powers and the twists
E(m) = E (x) C^(x)m are produced.

A motive here is a free module over F_q[t][x] (x the motive variable)
with a semilinear map tau(v) = T sigma(v), where sigma raises the
t-coefficients to the q-th power and fixes x.  The attached t-module has
underlying space M/TM, which is A-free; its structural matrices are read
off by repeatedly splitting t * (basis lift) into a reduced part plus
tau of smaller vectors.  Two facts drive the algorithm: the A-span of
tau(M) is exactly T M, and base-q digit splitting of t-exponents peels
one tau at a time (q-th roots are trivial on F_q coefficients).

The quotient M/TM is finite-dimensional in the s = x - t direction:
det T is a unit times s^D, so M/TM is the cokernel of T on the free
A-module (A[s]/s^trunc)^r for a computable trunc, and Smith normal form
over A provides coordinates, basis lifts and the A-freeness certificate.
"""

from __future__ import annotations

from .ffield import FqField
from .matrix import Mat, adjugate_charpoly, det_berkowitz
from .poly import PolyRing, padd, pconst, pdivmod, pmul, ppow, pqpow, pscale, ptrim
from .smith import smith_normal_form
from .tmodule import TModuleSpec


class MotiveSpec:
    """Rank-r motive: tau-matrix T over F_q[t][x], columns the tau-images
    of the basis."""

    def __init__(self, apoly: PolyRing, rank: int, tau_mat: Mat, label: str):
        self.apoly = apoly
        self.rank = rank
        self.tau_mat = tau_mat
        self.label = label

    def __repr__(self):
        return f"Motive({self.label}, rank={self.rank})"


def biv_ring(apoly: PolyRing) -> PolyRing:
    return PolyRing(apoly, "x")


def spoly(apoly: PolyRing) -> tuple:
    """s = x - t as a bivariate element (ascending x-coefficients)."""
    return (apoly.neg(apoly.gen), apoly.one)


def carlitz_motive(field: FqField, m: int = 1) -> MotiveSpec:
    A = PolyRing(field)
    B = biv_ring(A)
    T = Mat(B, [[ppow(A, spoly(A), m)]])
    return MotiveSpec(A, 1, T, label=f"carlitz^{m}")


def drinfeld_motive(E: TModuleSpec) -> MotiveSpec:
    """Motive of phi(t) = t + a_1 tau + ... + a_r tau^r on the basis
    1, tau, ..., tau^(r-1); the leading a_r must be a nonzero constant."""
    if not E.is_drinfeld:
        raise ValueError("motive construction only for Drinfeld modules")
    A = E.apoly
    F = E.field
    B = biv_ring(A)
    coeffs = [E.matrices[j][0, 0] for j in range(1, E.ell + 1)]
    lead = coeffs[-1]
    if len(lead) != 1:
        raise ValueError("supported family needs a constant leading coefficient")
    lead_inv = F.inv(lead[0])
    r = E.ell
    cols = []
    for j in range(r - 1):
        col = [B.zero] * r
        col[j + 1] = B.one
        cols.append(col)
    # tau^r = a_r^(-1) ((x - t) * 1 - a_1 tau - ... - a_(r-1) tau^(r-1))
    last = [B.zero] * r
    last[0] = tuple(pscale(F, lead_inv, g) for g in spoly(A))
    for i in range(1, r):
        c = ptrim(F, tuple(F.neg(F.mul(lead_inv, x)) for x in coeffs[i - 1]))
        last[i] = (c,) if c else B.zero
    cols.append(last)
    T = Mat(B, list(zip(*cols)))
    return MotiveSpec(A, r, T, label=f"motive[{E.label}]")


def tensor_with_carlitz(M: MotiveSpec, m: int) -> MotiveSpec:
    """M (x) C^(x)m: multiply the tau-matrix by (x - t)^m."""
    if m == 0:
        return M
    A = M.apoly
    sm = ppow(A, spoly(A), m)
    T = M.tau_mat.map(lambda f: pmul(A, sm, f))
    return MotiveSpec(A, M.rank, T, label=f"{M.label}(x)carlitz^{m}")


def unit_times_spower(A: PolyRing, f: tuple):
    """(c, D) if f = c (x-t)^D with c a nonzero constant, else None."""
    F = A.coeff
    D = len(f) - 1
    if D < 0:
        return None
    lead = f[-1]
    if len(lead) != 1 or not F.is_unit(lead[0]):
        return None
    c = lead[0]
    if tuple(pscale(F, c, g) for g in ppow(A, spoly(A), D)) == f:
        return c, D
    return None


# -- conversion to a t-module -------------------------------------------------


def motive_to_tmodule(M: MotiveSpec, max_tau: int = 24) -> TModuleSpec:
    """Extract the t-module with motive M.

    Fails loudly when M is outside the supported family: det T must be a
    unit times a power of x - t and the cokernel must be A-free.
    """
    A = M.apoly
    F: FqField = A.coeff
    if M.rank == 1:
        got = unit_times_spower(A, M.tau_mat[0, 0])
        if got is not None:
            return _rank_one_normal_form(M, *got)
    red = _MotiveReduction(M)
    n = red.n
    tau_coeffs: list[list[list[tuple]]] = []

    def bump(k):
        while len(tau_coeffs) <= k:
            tau_coeffs.append([[A.zero] * n for _ in range(n)])

    for i in range(n):
        # the structural action is the motive variable: shift by one x-power
        v = [((A.zero,) + ent if ent else ()) for ent in red.lifts[i]]
        queue = [(v, A.one, 0)]
        while queue:
            vec, mult, k = queue.pop(0)
            if k > max_tau:
                raise ArithmeticError("tau-degree bound exceeded: motive outside family")
            b = red.reduce(vec)
            bump(k)
            for j in range(n):
                if b[j]:
                    tau_coeffs[k][i][j] = A.add(
                        tau_coeffs[k][i][j], pmul(F, mult, pqpow(F, b[j], k))
                    )
            rem = red.subtract_lift(vec, b)
            if all(not g for ent in rem for g in ent):
                continue
            u = red.tau_preimage(rem)
            for e in range(F.q):
                w = [tuple(_digit(F, g, e) for g in ent) for ent in u]
                w = [_xtrim(ent) for ent in w]
                if any(ent for ent in w):
                    mono = ptrim(F, tuple([F.zero] * (e * F.q ** k) + [F.one]))
                    queue.append((w, pmul(F, mult, mono), k + 1))
    mats = [Mat(A, tau_coeffs[k]) for k in range(len(tau_coeffs))]
    return TModuleSpec(A, mats, label=f"tmodule[{M.label}]")


def _rank_one_normal_form(M: MotiveSpec, c, D: int) -> TModuleSpec:
    """Quotient basis 1, s, ..., s^(D-1): t Id + superdiagonal N plus a
    single tau entry in the lower-left corner."""
    A = M.apoly
    F = A.coeff
    if D == 0:
        raise ValueError("motive has trivial cokernel: no t-module attached")
    n = D
    d = Mat(
        A,
        [
            [A.gen if i == j else (A.one if j == i + 1 else A.zero) for j in range(n)]
            for i in range(n)
        ],
    )
    m1 = Mat(
        A,
        [
            [pconst(F, F.inv(c)) if (i == n - 1 and j == 0) else A.zero for j in range(n)]
            for i in range(n)
        ],
    )
    return TModuleSpec(A, [d, m1], label=f"tmodule[{M.label}]")


def _digit(F: FqField, h: tuple, e: int) -> tuple:
    """The w with h = sum_e t^e sigma(w_e), for this digit e: pick
    t-exponents congruent to e mod q and divide them by q."""
    q = F.q
    out: list = []
    for j, c in enumerate(h):
        if j % q == e and c != F.zero:
            k = (j - e) // q
            while len(out) <= k:
                out.append(F.zero)
            out[k] = c
    return ptrim(F, out)


def _xtrim(ent) -> tuple:
    ent = list(ent)
    while ent and not ent[-1]:
        ent.pop()
    return tuple(ent)


class _MotiveReduction:
    """Coordinates for M/TM plus exact division by T.

    Vectors are x-basis bivariate entries (tuples of A-tuples).  The
    truncated model expands entries in s = x - t and cuts at s^trunc,
    which is exact because s^trunc M lies inside T M.
    """

    def __init__(self, M: MotiveSpec):
        A = M.apoly
        F: FqField = A.coeff
        self.A, self.F, self.r = A, F, M.rank
        r = M.rank
        det = det_berkowitz(M.tau_mat)
        got = unit_times_spower(A, det)
        if got is None:
            raise ValueError("det(tau-matrix) is not a unit times (x-t)^D: outside family")
        self.det_c, self.det_D = got
        self.adj = adjugate_charpoly(M.tau_mat)
        adj_s = [[_to_s_basis(A, self.adj[i, j]) for j in range(r)] for i in range(r)]
        minval = min(
            (_s_valuation(e) for row in adj_s for e in row if e),
            default=0,
        )
        self.trunc = max(1, self.det_D - minval)
        Ts = [[_to_s_basis(A, M.tau_mat[i, j]) for j in range(r)] for i in range(r)]
        K = r * self.trunc
        rows = [[A.zero] * K for _ in range(K)]
        for i in range(r):
            for j in range(r):
                for a, coeff in enumerate(Ts[i][j]):
                    if not coeff:
                        continue
                    for k in range(self.trunc - a):
                        rows[i * self.trunc + k + a][j * self.trunc + k] = coeff
        diag, U, Uinv = smith_normal_form(Mat(A, rows))
        for i, dgl in enumerate(diag):
            if dgl and not A.is_unit(dgl):
                raise ValueError("cokernel of the motive is not A-free: outside family")
        self.free_pos = [i for i, dgl in enumerate(diag) if not dgl]
        self.n = len(self.free_pos)
        self.U = U
        self._spow_cache = [ppow(A, spoly(A), a) for a in range(self.trunc)]
        self.lifts = []
        for pos in self.free_pos:
            coords = [Uinv[i, pos] for i in range(K)]
            self.lifts.append(self._coords_to_vec(coords))

    # vec: list of r x-basis entries --------------------------------------

    def _vec_coords(self, vec) -> list:
        A = self.A
        out = [A.zero] * (self.r * self.trunc)
        for j, ent in enumerate(vec):
            sexp = _to_s_basis(A, ent)
            for a in range(min(len(sexp), self.trunc)):
                out[j * self.trunc + a] = sexp[a]
        return out

    def _coords_to_vec(self, coords) -> list:
        A = self.A
        out = []
        for j in range(self.r):
            ent: tuple = ()
            for a in range(self.trunc):
                c = coords[j * self.trunc + a]
                if c:
                    ent = _badd(A, ent, tuple(pmul(A.coeff, c, g) for g in self._spow_cache[a]))
            out.append(ent)
        return out

    def reduce(self, vec) -> list:
        img = self.U.apply(self._vec_coords(vec))
        return [img[p] for p in self.free_pos]

    def subtract_lift(self, vec, b) -> list:
        A, F = self.A, self.F
        out = list(vec)
        for j, coeff in enumerate(b):
            if not coeff:
                continue
            for e in range(self.r):
                scaled = tuple(pmul(F, coeff, g) for g in self.lifts[j][e])
                out[e] = _bsub(A, out[e], scaled)
        return out

    def tau_preimage(self, rem) -> list:
        """u with T sigma-free division: u = adj(T) rem / (c (x-t)^D)."""
        A, F = self.A, self.F
        cinv = F.inv(self.det_c)
        sD = ppow(A, spoly(A), self.det_D)
        out = []
        for i in range(self.r):
            acc: tuple = ()
            for j in range(self.r):
                e = self.adj[i, j]
                if e and rem[j]:
                    acc = _badd(A, acc, pmul(A, e, rem[j]))
            if not acc:
                out.append(())
                continue
            quo, r0 = pdivmod(A, acc, sD)
            if r0:
                raise ArithmeticError("remainder not divisible by T: reduction broke")
            out.append(tuple(ptrim(F, tuple(F.mul(cinv, c) for c in g)) for g in quo))
        return out


def _badd(A: PolyRing, a: tuple, b: tuple) -> tuple:
    return padd(A, a, b)


def _bsub(A: PolyRing, a: tuple, b: tuple) -> tuple:
    from .poly import psub

    return psub(A, a, b)


def _to_s_basis(A: PolyRing, f: tuple) -> tuple:
    """x-basis -> s-basis coefficients of f(t, s + t), by Horner."""
    F = A.coeff
    out: list = []
    for h in reversed(f):
        new = [()] * (len(out) + 1)
        for a, g in enumerate(out):
            if g:
                new[a + 1] = padd(F, new[a + 1], g)
                new[a] = padd(F, new[a], pmul(F, g, A.gen))
        new[0] = padd(F, new[0], h)
        out = new
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def _s_valuation(ent) -> int:
    for a, c in enumerate(ent):
        if c:
            return a
    return 10 ** 9


# -- public constructors -------------------------------------------------------


def carlitz_tensor(field: FqField, m: int) -> TModuleSpec:
    """The m-th Carlitz tensor power as an m-dimensional t-module."""
    if m < 1:
        raise ValueError("tensor power needs m >= 1")
    return motive_to_tmodule(carlitz_motive(field, m))


def drinfeld_twist(E: TModuleSpec, m: int) -> TModuleSpec:
    """E(m) = E (x) C^(x)m, of dimension 1 + m r for rank-r Drinfeld E."""
    if m == 0:
        return E
    if not E.is_drinfeld:
        raise ValueError("twisting is implemented for Drinfeld modules")
    if E.ell == 1 and E.matrices[1][0, 0] == (E.field.one,):
        return carlitz_tensor(E.field, m + 1)
    return motive_to_tmodule(tensor_with_carlitz(drinfeld_motive(E), m))
