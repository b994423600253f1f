"""G-sizes of finite A[G]-modules, equivariant lattice indices, and
Fitting-ideal membership.

A finite module enters either with an explicit F_q[G]-free presentation
(rank m and the m x m t-action matrix over the group ring) or as a raw
F_q-space carrying commuting t- and G-action matrices.  The G-size is
the characteristic polynomial of the t-action: Berkowitz over the group
ring in the free case, per-character over the component fields in the
projective case (which needs p coprime to |G|).
"""

from __future__ import annotations

from .ffield import FqField, Ring
from .grpring import CharacterTable, GroupRing, gr_laurent_inverse, monic_part
from .groups import GroupSpec
from .laurent import Laurent, PrecisionError
from .matrix import Mat, berkowitz_charpoly
from .poly import pdivmod, ptrim


class FiniteFqGModule:
    """A finite A[G]-module that is projective over F_q[G].

    free presentation: `rank`, `theta_t` (rank x rank over F_q[G]).
    raw presentation: `dim` (over F_q), `t_mat`, `g_mats[g]` (dim x dim
    over F_q); `to_free()` upgrades it when an F_q[G]-basis exists.
    """

    def __init__(
        self,
        gr: GroupRing,
        *,
        rank: int | None = None,
        theta_t: Mat | None = None,
        t_mat: Mat | None = None,
        g_mats: dict | None = None,
        tau_mat: Mat | None = None,
    ):
        self.gr = gr
        self.rank = rank
        self.theta_t = theta_t
        self.t_mat = t_mat
        self.g_mats = g_mats
        self.tau_mat = tau_mat

    @property
    def is_free_presented(self) -> bool:
        return self.theta_t is not None

    @property
    def dim(self) -> int:
        if self.t_mat is not None:
            return self.t_mat.nrows
        return (self.rank or 0) * self.gr.group.order

    def is_zero(self) -> bool:
        return self.dim == 0

    def to_free(self) -> "FiniteFqGModule":
        """Find an F_q[G]-basis of a raw module and express the t-action
        over the group ring.  Raises if the module is not free."""
        if self.is_free_presented:
            return self
        gr = self.gr
        F: FqField = gr.field
        G = gr.group
        if G.is_trivial():
            theta = self.t_mat.map(gr.constant, gr)
            return FiniteFqGModule(
                gr, rank=self.t_mat.nrows, theta_t=theta, t_mat=self.t_mat, g_mats=self.g_mats
            )
        D = self.t_mat.nrows
        if D % G.order:
            raise ValueError("dimension not divisible by |G|: not F_q[G]-free")
        m = D // G.order
        basis = _free_basis_vectors(F, G, self.g_mats, D, m)
        if basis is None:
            raise ValueError("no F_q[G]-basis found: module not presented as F_q[G]-free")
        # columns of full: G-translates of basis vectors, in (g, j) order
        gl = list(G.elements())
        cols = []
        for j in range(m):
            for g in gl:
                cols.append(_apply_g(F, self.g_mats, g, basis[j]) if g != G.identity else basis[j])
        full = Mat(F, list(zip(*cols)))
        from .matrix import gauss_inverse

        full_inv = gauss_inverse(full)
        rows = []
        for j in range(m):
            img = self.t_mat.apply(basis[j])
            coords = full_inv.apply(img)
            row = []
            for i in range(m):
                comp = {}
                for gi, g in enumerate(gl):
                    c = coords[i * len(gl) + gi]
                    if not F.is_zero(c):
                        comp[g] = c
                row.append(gr.make(comp))
            rows.append(row)
        # theta rows: t * b_j = sum_i theta[j][i] b_i; store as matrix acting on
        # column coordinate vectors: theta[i][j]
        theta = Mat(gr, list(zip(*rows)))
        return FiniteFqGModule(gr, rank=m, theta_t=theta, t_mat=self.t_mat, g_mats=self.g_mats)

    def direct_sum(self, other: "FiniteFqGModule") -> "FiniteFqGModule":
        gr = self.gr
        a, b = self.to_free(), other.to_free()
        n1, n2 = a.rank, b.rank
        rows = []
        for i in range(n1 + n2):
            row = []
            for j in range(n1 + n2):
                if i < n1 and j < n1:
                    row.append(a.theta_t[i, j])
                elif i >= n1 and j >= n1:
                    row.append(b.theta_t[i - n1, j - n1])
                else:
                    row.append(gr.zero)
            rows.append(row)
        return FiniteFqGModule(gr, rank=n1 + n2, theta_t=Mat(gr, rows))


def _apply_g(F, g_mats, g, vec):
    return g_mats[g].apply(vec)


def _free_basis_vectors(F: FqField, G: GroupSpec, g_mats, D: int, m: int):
    """Greedy search for vectors whose G-translates give an F_q-basis."""
    if m == 0:
        return []
    gl = list(G.elements())
    chosen: list = []
    span_rows: list = []  # row-echelon accumulation

    def translates(v):
        return [g_mats[g].apply(v) if g != G.identity else list(v) for g in gl]

    def try_add(v):
        block = translates(v)
        rows = [r[:] for r in span_rows]
        added = []
        for w in block:
            w = _reduce_against(F, rows, w)
            if any(not F.is_zero(c) for c in w):
                _insert_row(F, rows, w)
                added.append(w)
            else:
                return None
        return rows

    candidates = [[F.one if i == j else F.zero for i in range(D)] for j in range(D)]
    import random as _random

    rng = _random.Random(20260809)
    for _ in range(200):
        candidates.append([rng.randrange(F.q) for _ in range(D)])
    for v in candidates:
        got = try_add(v)
        if got is not None:
            chosen.append(list(v))
            span_rows = got
            if len(chosen) == m:
                return chosen
    return None


def _reduce_against(F: FqField, rows, v):
    v = list(v)
    for r in rows:
        piv = next(i for i, c in enumerate(r) if not F.is_zero(c))
        if not F.is_zero(v[piv]):
            f = F.mul(v[piv], F.inv(r[piv]))
            v = [F.sub(a, F.mul(f, b)) for a, b in zip(v, r)]
    return v


def _insert_row(F: FqField, rows, v):
    rows.append(v)
    rows.sort(key=lambda r: next(i for i, c in enumerate(r) if not F.is_zero(c)))


def gsize(B: FiniteFqGModule) -> tuple:
    """The G-size |B|_G: the unique monic generator of Fitt^0_{A[G]}(B),
    as an ascending t-coefficient tuple over the group ring.

    Free case: the Berkowitz characteristic polynomial of the t-action.
    Raw projective case (p coprime to |G|): characteristic polynomials of
    the character components, reassembled through psi.
    """
    gr = B.gr
    if B.is_zero():
        return (gr.one,)
    if gr.group.is_trivial() and B.t_mat is not None:
        # the group ring is the field: run Berkowitz on field codes
        return tuple(gr.constant(c) for c in berkowitz_charpoly(B.t_mat))
    if B.is_free_presented or B.g_mats is None:
        if B.theta_t is None:
            raise ValueError("module carries no action data")
        return berkowitz_charpoly(B.theta_t)
    try:
        Bf = B.to_free()
        return berkowitz_charpoly(Bf.theta_t)
    except ValueError:
        return _gsize_components(B)


def _gsize_components(B: FiniteFqGModule) -> tuple:
    gr = B.gr
    tab = gr.chartab()
    if tab.split.P.orders:
        raise ValueError("non-free module with wild group: free presentation required")
    big = tab.big
    comps = []
    for cls in tab.classes:
        basis = _component_basis(tab, cls, B)
        T = _restrict(big, B.t_mat, tab, basis)
        comps.append(berkowitz_charpoly(T))
    deg = max(len(c) for c in comps)
    out = []
    P = tab.comp_ring
    for d in range(deg):
        codes = []
        for c in comps:
            v = c[d] if d < len(c) else big.zero
            codes.append(P.constant(v))
        out.append(tab.psi_inv_const(codes, gr))
    return ptrim(gr, out)


def _component_basis(tab: CharacterTable, cls, B: FiniteFqGModule):
    """Basis of the chi-isotypic part of B tensored up to the big field."""
    big = tab.big
    G = B.gr.group
    D = B.t_mat.nrows
    F = B.gr.field
    dinv = big.inv(big.embed(F.from_int(G.order % F.p))) if G.order > 1 else big.one
    proj = Mat.zero(big, D)
    for g in G.elements():
        gm = B.g_mats[g] if g != G.identity else Mat.identity(F, D)
        _, gd = tab.split.project(g)
        w = big.mul(dinv, cls.values[tab.split.Delta.inv(gd)])
        proj = proj + gm.map(lambda c: big.mul(big.embed(c), w), big)
    cols = [[proj[i, j] for i in range(D)] for j in range(D)]
    basis = []
    rows: list = []
    for v in cols:
        w = _reduce_against(big, rows, v)
        if any(not big.is_zero(c) for c in w):
            _insert_row(big, rows, w)
            basis.append(v)
    return basis


def _restrict(big, t_mat: Mat, tab: CharacterTable, basis):
    """Matrix of the (big-field-extended) t-action on span(basis)."""
    F = t_mat.ring
    D = t_mat.nrows
    if not basis:
        return Mat(big, [])
    # solve coordinates by elimination: [basis | image]
    imgs = []
    for v in basis:
        img = [big.zero] * D
        for i in range(D):
            s = big.zero
            for j in range(D):
                c = t_mat[i, j]
                if not F.is_zero(c) and not big.is_zero(v[j]):
                    s = big.add(s, big.mul(big.embed(c), v[j]))
            img[i] = s
        imgs.append(img)
    coords = _solve_in_span(big, basis, imgs)
    return Mat(big, list(zip(*coords)))


def _solve_in_span(big, basis, imgs):
    """Coordinates of each img in span(basis), by Gauss elimination."""
    D = len(basis[0])
    k = len(basis)
    # augmented columns
    rows = [[basis[j][i] for j in range(k)] + [img[i] for img in imgs] for i in range(D)]
    pivots = []
    r = 0
    for c in range(k):
        pr = None
        for i in range(r, D):
            if not big.is_zero(rows[i][c]):
                pr = i
                break
        if pr is None:
            raise ArithmeticError("basis vectors dependent")
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = big.inv(rows[r][c])
        rows[r] = [big.mul(inv, x) for x in rows[r]]
        for i in range(D):
            if i != r and not big.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [big.sub(x, big.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(r)
        r += 1
    for i in range(r, D):
        if any(not big.is_zero(x) for x in rows[i][k:]):
            raise ArithmeticError("image not inside the span")
    return [[rows[j][k + s] for j in range(k)] for s in range(len(imgs))]


# -- lattice index ------------------------------------------------------------


def lattice_index(L1, L2, prec: int) -> Laurent:
    """[L1 : L2]_G = det(X)^+ for X the change of basis over k_oo[G]
    expressing the basis of L2 in the basis of L1."""
    if L1.ambient is not L2.ambient and L1.ambient != L2.ambient:
        raise ValueError("lattices live in different ambient spaces")
    d1 = L1.gr_det(prec)
    d2 = L2.gr_det(prec)
    ratio = d2 * gr_laurent_inverse(d1, work_prec=prec)
    return monic_part(ratio)[0]


# -- Fitting membership --------------------------------------------------------


def fitting_contains(candidate: Laurent, B: FiniteFqGModule) -> bool:
    """Whether candidate lies in Fitt^0_{A[G]}(B).

    The candidate's monic part must read as a polynomial at the working
    precision; membership is then componentwise divisibility by the
    (classically monic) components of the size polynomial.
    """
    gr: GroupRing = candidate.ring
    candidate = _with_work_prec(candidate)
    cplus, _unit = monic_part(candidate)
    if cplus.prec < 1:
        raise PrecisionError("precision too low to read the candidate as a polynomial")
    try:
        cpoly = cplus.to_t_poly()
    except ValueError:
        return False  # certified non-polynomial tail: not in A[G]
    if B.is_zero():
        return True  # Fitt^0(0) is the unit ideal
    f = gsize(B)
    tab = gr.chartab()
    fcomps = _poly_components(tab, f)
    ccomps = _poly_components(tab, cpoly)
    P = tab.comp_ring
    for fc, cc in zip(fcomps, ccomps):
        if not fc:
            continue
        _, rem = pdivmod(P, cc, fc)
        if rem:
            return False
    return True


def fitting_equals(candidate: Laurent, B: FiniteFqGModule) -> bool:
    """Equality of principal ideals (candidate) = Fitt^0(B): mutual
    divisibility, i.e. the monic part of the candidate equals the size
    at the working precision."""
    gr: GroupRing = candidate.ring
    cplus, _ = monic_part(_with_work_prec(candidate))
    try:
        cpoly = cplus.to_t_poly()
    except ValueError:
        return False
    f = gsize(B) if not B.is_zero() else (gr.one,)
    return cpoly == f


def _with_work_prec(x: Laurent, pad: int = 12) -> Laurent:
    if x.prec != float("inf"):
        return x
    span = (len(x.coeffs) + abs(x.emin) + 1) if x.coeffs else 1
    return x.truncate(span + pad)


def _poly_components(tab: CharacterTable, poly: tuple) -> list[tuple]:
    comps = [[] for _ in tab.classes]
    for c in poly:
        for i, comp in enumerate(tab.psi_const(c)):
            comps[i].append(comp)
    P = tab.comp_ring
    return [ptrim(P, c) for c in comps]
