"""The arithmetic data layer: explicit O_K over A = F_q[t] with G-action,
primes of A, residue modules with t- and tau-structure, and the infinite
completions K_oo.

The base field of the extension is always k = F_q(t), so O_K is given by
an A-basis w_0..w_(d-1) with a multiplication table and G-action matrices
over A.  Built-ins: the trivial extension and the Carlitz cyclotomic
field K = k(lambda) for a degree-one prime P, with lambda^(q-1) = -P and
F_q^x acting by lambda -> c lambda.  Both have a single infinite place
with exact basis embeddings: Laurent series in the local uniformizer pi
with finite support, so all completion arithmetic stays exact until a
series inverse or exponential forces a precision window.

Elements of K_oo are tuples of pi-Laurents indexed by infinite place;
module points of an n-dimensional t-module are n-tuples of those.
"""

from __future__ import annotations

from .ffield import FqField
from .groups import GroupSpec
from .grpring import GroupRing
from .laurent import Laurent
from .matrix import Mat
from .modsize import FiniteFqGModule
from .poly import PolyRing, monic_irreducibles, pconst, pdivmod, pmul, ptrim
from .tmodule import TModuleSpec


class PrimeOfA:
    """A monic irreducible of A; Nv = P since F = k."""

    def __init__(self, field: FqField, poly: tuple, _trusted: bool = False):
        poly = ptrim(field, poly)
        if not poly or poly[-1] != field.one:
            raise ValueError("prime must be monic")
        self.field = field
        self.poly = poly
        self.deg = len(poly) - 1
        if not _trusted:
            A = PolyRing(field)
            for dd in range(1, self.deg // 2 + 1):
                for f in monic_irreducibles(field, dd):
                    if not pdivmod(field, poly, f)[1]:
                        raise ValueError(f"{A.el_str(poly)} is not irreducible")

    def __eq__(self, other):
        return isinstance(other, PrimeOfA) and other.poly == self.poly

    def __hash__(self):
        return hash(("PrimeOfA", self.poly))

    def __repr__(self):
        return PolyRing(self.field).el_str(self.poly)


def primes_up_to(field: FqField, deg: int) -> list[PrimeOfA]:
    out = []
    for d in range(1, deg + 1):
        for f in monic_irreducibles(field, d):
            out.append(PrimeOfA(field, f, _trusted=True))
    return out


class Place:
    """An infinite place of K: ramification e, residue degree f, and the
    G-action as a root-of-unity scaling of the uniformizer."""

    def __init__(self, field: FqField, e: int, f: int, pi_scale: dict):
        if f != 1:
            raise NotImplementedError("built-in places have residue degree 1")
        self.field = field
        self.e = e
        self.f = f
        self.pi_scale = pi_scale  # group element -> code of c with g(pi) = c*pi

    def g_apply(self, g, x: Laurent) -> Laurent:
        c = self.pi_scale[g]
        F = self.field
        if c == F.one:
            return x
        out = [F.mul(F.pow(c, x.emin + i), v) for i, v in enumerate(x.coeffs)]
        return Laurent(F, x.emin, out, prec=None if x.prec == float("inf") else int(x.prec))


class ExtensionData:
    """O_K = A w_0 + ... + A w_(d-1) with G-action, plus infinite places."""

    def __init__(
        self,
        field: FqField,
        group: GroupSpec,
        mult_table,  # mult_table[i][j] = list of d A-polys
        g_action: dict,  # g -> Mat over A, columns are images of basis vectors
        places: list[Place],
        basis_embeddings,  # basis_embeddings[place_index][i] = exact pi-Laurent
        t_embeddings,  # t_embeddings[place_index] = exact pi-Laurent for t
        label: str,
    ):
        self.field = field
        self.group = group
        self.apoly = PolyRing(field)
        self.d = len(mult_table)
        self.mult_table = mult_table
        self.g_action = g_action
        self.places = places
        self.basis_embeddings = basis_embeddings
        self.t_embeddings = t_embeddings
        self.label = label
        self.gr = GroupRing(field, group)
        self._coord_solver: dict = {}
        self.validate()

    # -- structure checks ---------------------------------------------------

    def validate(self):
        A, F = self.apoly, self.field
        d = self.d
        if self.group.order not in (d,):
            raise ValueError("data layer expects [K:k] = |G| (F = k)")
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    lhs = self._mul_coords(self._mul_coords(_unit_vec(A, d, i), _unit_vec(A, d, j)), _unit_vec(A, d, k))
                    rhs = self._mul_coords(_unit_vec(A, d, i), self._mul_coords(_unit_vec(A, d, j), _unit_vec(A, d, k)))
                    if lhs != rhs:
                        raise ValueError("multiplication table not associative")
        for g in self.group.elements():
            M = self.g_action[g]
            for i in range(d):
                for j in range(d):
                    img = self._mul_coords(
                        [M[r, i] for r in range(d)], [M[r, j] for r in range(d)]
                    )
                    direct = M.apply(self._mul_coords(_unit_vec(A, d, i), _unit_vec(A, d, j)))
                    if img != list(direct):
                        raise ValueError("G-action is not a ring automorphism")
        assert sum(p.e * p.f for p in self.places) == d

    def _mul_coords(self, a: list, b: list) -> list:
        A, F = self.apoly, self.field
        out = [A.zero] * self.d
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = pmul(F, x, y)
                for k, c in enumerate(self.mult_table[i][j]):
                    if c:
                        out[k] = A.add(out[k], pmul(F, xy, c))
        return out

    def mul_ok(self, a: list, b: list) -> list:
        return self._mul_coords(a, b)

    def g_apply_ok(self, g, a: list) -> list:
        return list(self.g_action[g].apply(a))

    # -- embeddings ----------------------------------------------------------

    def embed_scalar(self, a: tuple, place_idx: int, prec=None) -> Laurent:
        """Image of a in A at one infinite place."""
        t = self.t_embeddings[place_idx]
        F = self.field
        out = Laurent.zero(F)
        power = Laurent.one(F)
        for c in a:
            if c != F.zero:
                out = out + power.scale(c)
            power = power * t
        return out.truncate(prec) if prec is not None else out

    def embed_ok(self, coords: list, place_idx: int, prec=None) -> Laurent:
        out = Laurent.zero(self.field)
        for i, a in enumerate(coords):
            if a:
                out = out + self.embed_scalar(a, place_idx) * self.basis_embeddings[place_idx][i]
        return out.truncate(prec) if prec is not None else out

    def embed(self, coords: list, prec=None) -> tuple:
        return tuple(self.embed_ok(coords, p, prec) for p in range(len(self.places)))

    def g_apply_kinf(self, g, x: tuple) -> tuple:
        # built-ins have a single place fixed by G, acting through pi
        return tuple(pl.g_apply(g, xp) for pl, xp in zip(self.places, x))

    def zero_kinf(self, prec=None) -> tuple:
        return tuple(Laurent.zero(self.field, prec=prec) for _ in self.places)

    # -- k_oo coordinates (slicing pi-exponents) ------------------------------

    def u_embed(self, place_idx: int, prec_pi: int) -> Laurent:
        """The pi-expansion of u = 1/t at this place."""
        return self.t_embeddings[place_idx].truncate(prec_pi).inverse()

    def k_slices(self, x: Laurent, place_idx: int, prec: int) -> list[Laurent]:
        """Coordinates of x in the k_oo-basis pi^0, ..., pi^(e-1):
        x = sum_a slice_a(u) pi^a with slices in F_q((u)).

        Greedy pi-adic elimination against powers of the embedded u.
        """
        e = self.places[place_idx].e
        F = self.field
        P = e * (prec + 2) + 2 * e
        u_pi = self.u_embed(place_idx, P)
        u_inv = self.t_embeddings[place_idx].truncate(P)
        slices: list[dict] = [dict() for _ in range(e)]
        residual = x.truncate(min(P, x.prec) if x.prec != float("inf") else P)
        powers: dict[int, Laurent] = {0: Laurent.one(F, prec=P)}

        def upow(k: int) -> Laurent:
            if k not in powers:
                if k > 0:
                    powers[k] = (upow(k - 1) * u_pi).truncate(P)
                else:
                    powers[k] = (upow(k + 1) * u_inv).truncate(P)
            return powers[k]

        while residual.coeffs:
            E = residual.lead_exp()
            c = residual.lead()
            a = E % e
            k = (E - a) // e
            pw = upow(k)
            f = F.mul(c, F.inv(pw.lead()))
            slices[a][k] = F.add(slices[a].get(k, F.zero), f)
            residual = residual - pw.shift(a).scale(f)
        out = []
        xprec = x.prec
        for a in range(e):
            sl_prec = prec if xprec == float("inf") else min(prec, (int(xprec) - a + e - 1) // e)
            if slices[a]:
                lo = min(slices[a])
                arr = [slices[a].get(kk, F.zero) for kk in range(lo, max(slices[a]) + 1)]
                out.append(Laurent(F, lo, arr, prec=sl_prec))
            else:
                out.append(Laurent.zero(F, prec=sl_prec))
        return out

    def from_k_slices(self, slices: list[Laurent], place_idx: int, prec_pi: int) -> Laurent:
        """Inverse of k_slices: evaluate sum_a slice_a(u-image) pi^a."""
        F = self.field
        big = prec_pi + 2 * self.places[place_idx].e + 2
        u_pi = self.u_embed(place_idx, big)
        out = Laurent.zero(F, prec=prec_pi)
        for a, sl in enumerate(slices):
            if sl.is_zero():
                continue
            acc = _compose_into_pi(sl, u_pi, big)
            out = out + acc.shift(a).truncate(prec_pi)
        return out.truncate(prec_pi)


def _compose_into_pi(sl: Laurent, u_as_pi: Laurent, prec: int) -> Laurent:
    """Substitute the pi-expansion of u into a u-series (negative
    exponents go through the exact series inverse)."""
    F = sl.ring
    if sl.is_zero():
        return Laurent.zero(F, prec=prec)
    lo = sl.emin
    out = Laurent.zero(F, prec=prec)
    if lo < 0:
        inv = u_as_pi.truncate(prec + 2 * abs(u_as_pi.lead_exp())).inverse()
        power = Laurent.one(F, prec=prec + 2 * abs(lo) * abs(u_as_pi.lead_exp()))
        for _ in range(-lo):
            power = power * inv
    else:
        power = Laurent.one(F, prec=prec)
        for _ in range(lo):
            power = (power * u_as_pi).truncate(prec)
    cur = lo
    for i, c in enumerate(sl.coeffs):
        e = sl.emin + i
        while cur < e:
            power = (power * u_as_pi).truncate(prec)
            cur += 1
        if c != F.zero:
            out = out + power.scale(c)
    return out


def _unit_vec(A: PolyRing, d: int, i: int) -> list:
    out = [A.zero] * d
    out[i] = A.one
    return out


# -- built-in extensions -------------------------------------------------------


def trivial_extension(field: FqField) -> ExtensionData:
    A = PolyRing(field)
    G = GroupSpec(())
    mult = [[[A.one]]]
    gact = {(): Mat.identity(A, 1)}
    place = Place(field, 1, 1, {(): field.one})
    basis_emb = [[Laurent.one(field)]]
    t_emb = [Laurent.monomial(field, field.one, -1)]
    return ExtensionData(field, G, mult, gact, [place], basis_emb, t_emb, "trivial")


def carlitz_cyclotomic_deg1(field: FqField, P: PrimeOfA) -> ExtensionData:
    """K = k(lambda), lambda^(q-1) = -P, O_K = A[lambda], G = F_q^x by
    lambda -> c lambda; tame everywhere since p does not divide q - 1."""
    q = field.q
    if q < 3:
        raise ValueError("carlitz cyclotomic extension needs q >= 3")
    if P.deg != 1:
        raise ValueError("only degree-one conductors are built in")
    F = field
    A = PolyRing(F)
    d = q - 1
    minusP = tuple(F.neg(c) for c in P.poly)
    # lambda^i * lambda^j = lambda^(i+j), reduced by lambda^(q-1) = -P
    mult = []
    for i in range(d):
        row = []
        for j in range(d):
            k = i + j
            col = [A.zero] * d
            if k < d:
                col[k] = A.one
            else:
                col[k - d] = minusP
            row.append(col)
        mult.append(row)
    # the group: F_q^x is cyclic of order q-1; fix the smallest generator
    gen = _fq_generator(F)
    G = GroupSpec((d,))
    gact = {}
    for k in range(d):
        c = F.pow(gen, k)
        cols = []
        for i in range(d):
            col = [A.zero] * d
            col[i] = pconst(F, F.pow(c, i))
            cols.append(col)
        gact[(k,)] = Mat(A, list(zip(*cols)))
    pi_scale = {(k,): F.inv(F.pow(gen, k)) for k in range(d)}
    place = Place(F, d, 1, pi_scale)
    basis_emb = [[Laurent.monomial(F, F.one, -i) for i in range(d)]]
    # t = -lambda^(q-1) - c0 = -pi^(1-q)... in pi: -pi^-(q-1) - c0
    c0 = P.poly[0]
    t_emb = [
        Laurent(F, -(d), [F.neg(F.one)] + [F.zero] * (d - 1) + [F.neg(c0)], prec=None)
    ]
    return ExtensionData(F, G, mult, gact, [place], basis_emb, t_emb, f"k(lambda_{P!r})")


def _fq_generator(F: FqField):
    n = F.q - 1
    for g in range(1, F.q):
        k, x = 1, g
        while x != F.one:
            x = F.mul(x, g)
            k += 1
        if k == n:
            return g
    raise ArithmeticError("no generator of F_q^x")


# -- taming modules ------------------------------------------------------------


class TamingModule:
    """xi * O_K for xi in A; xi = 1 is O_K itself (every built-in
    extension is tame, so O_K is taming)."""

    def __init__(self, ext: ExtensionData, xi: tuple | None = None):
        self.ext = ext
        F = ext.field
        self.xi = ptrim(F, xi) if xi else (F.one,)
        if not self.xi:
            raise ValueError("xi must be nonzero")

    @property
    def is_all_of_ok(self) -> bool:
        return len(self.xi) == 1 and self.xi[0] == self.ext.field.one

    def xi_deg(self) -> int:
        return len(self.xi) - 1

    def __repr__(self):
        return f"{PolyRing(self.ext.field).el_str(self.xi)}*O_K"


def xi_taming(ext: ExtensionData, S: list[PrimeOfA]) -> TamingModule:
    """xi = product of the primes in S; on xi*O_K / v the tau-action dies
    for every v in S, killing the Euler factors there."""
    F = ext.field
    xi = (F.one,)
    for v in S:
        xi = pmul(F, xi, v.poly)
    return TamingModule(ext, xi)


# -- reduction at finite primes --------------------------------------------------


class ResidueData:
    """O_K / v as an F_q-space of dimension d*deg(v) with multiplication,
    Frobenius, t- and G-action matrices; basis w_i t^j."""

    def __init__(self, ext: ExtensionData, v: PrimeOfA):
        self.ext = ext
        self.v = v
        F = ext.field
        d, dv = ext.d, v.deg
        self.dim = d * dv
        self.idx = {(i, j): i * dv + j for i in range(d) for j in range(dv)}
        # t^k mod v for k up to the Frobenius range, by incremental shift
        self._tpow = [()] * (F.q * dv + dv + 1)
        cur = (F.one,)
        top = tuple(F.neg(c) for c in v.poly[:-1])  # t^dv = -(lower part)
        for k in range(len(self._tpow)):
            self._tpow[k] = cur
            shifted = (F.zero,) + cur
            if len(shifted) > dv:
                lead = shifted[-1]
                shifted = shifted[:-1]
                if lead != F.zero:
                    shifted = tuple(F.add(x, F.mul(lead, y)) for x, y in zip(shifted, top))
            cur = ptrim(F, shifted)

    def _reduce_apoly(self, a: tuple) -> tuple:
        if len(a) <= self.v.deg:
            return a
        if len(a) <= len(self._tpow):
            F = self.ext.field
            out = [F.zero] * self.v.deg
            for k, c in enumerate(a):
                if c == F.zero:
                    continue
                for i, x in enumerate(self._tpow[k]):
                    out[i] = F.add(out[i], F.mul(c, x))
            return ptrim(F, out)
        return pdivmod(self.ext.field, a, self.v.poly)[1]

    def element(self, coords: list) -> list:
        """O_K coordinate vector (A-polys) -> residue vector (F_q codes)."""
        F = self.ext.field
        out = [F.zero] * self.dim
        for i, a in enumerate(coords):
            r = self._reduce_apoly(a)
            for j, c in enumerate(r):
                out[self.idx[(i, j)]] = c
        return out

    def mult_matrix(self, coords: list) -> Mat:
        """Matrix of multiplication by an O_K element on O_K/v."""
        F = self.ext.field
        d, dv = self.ext.d, self.v.deg
        cols = []
        for i in range(d):
            for j in range(dv):
                # (w_i t^j) * element
                shifted = [ptrim(F, (F.zero,) * j + a) for a in coords]
                prod = self.ext.mul_ok(shifted, _unit_vec(self.ext.apoly, d, i))
                cols.append(self.element(prod))
        return Mat(F, list(zip(*cols)))

    def t_matrix(self) -> Mat:
        A = self.ext.apoly
        one = _unit_vec(A, self.ext.d, 0)
        tvec = [pmul(self.ext.field, A.gen, c) for c in one]
        return self.mult_matrix(tvec)

    def frobenius_matrix(self) -> Mat:
        """The q-power map on O_K/v (F_q-linear, G-equivariant)."""
        F = self.ext.field
        d, dv = self.ext.d, self.v.deg
        cols = []
        for i in range(d):
            wq = self._ok_power_mod(i)
            for j in range(dv):
                # (w_i t^j)^q = t^(qj) * w_i^q
                shifted = [ptrim(F, (F.zero,) * (F.q * j) + a) for a in wq]
                cols.append(self.element(shifted))
        return Mat(F, list(zip(*cols)))

    def _ok_power_mod(self, i: int) -> list:
        """w_i^q as O_K coordinates (exact, before residue reduction)."""
        A = self.ext.apoly
        base = _unit_vec(A, self.ext.d, i)
        out = _unit_vec(A, self.ext.d, 0)
        for _ in range(self.ext.field.q):
            out = self.ext.mul_ok(out, base)
        # that computed w_i^(q); q multiplications of the unit give power q
        return out

    def g_matrix(self, g) -> Mat:
        F = self.ext.field
        d, dv = self.ext.d, self.v.deg
        cols = []
        for i in range(d):
            img = self.ext.g_apply_ok(g, _unit_vec(self.ext.apoly, d, i))
            for j in range(dv):
                shifted = [ptrim(F, (F.zero,) * j + a) for a in img]
                cols.append(self.element(shifted))
        return Mat(F, list(zip(*cols)))


def reduction(
    ext: ExtensionData, M: TamingModule, v: PrimeOfA, E: TModuleSpec
) -> tuple[FiniteFqGModule, FiniteFqGModule]:
    """(Lie_E(M/v), E(M/v)) as raw F_q[G]-modules with t-action matrices.

    For v dividing xi the residue model carries the twisted tau-action
    xi^(q-1) x^q, which vanishes; otherwise M/v = O_K/v through the
    inclusion.
    """
    F = ext.field
    res = ResidueData(ext, v)
    frob = res.frobenius_matrix()
    _, r = pdivmod(F, M.xi, v.poly)
    if not M.is_all_of_ok and not r:
        # v divides xi: tau picks up xi^(q-1), which is 0 mod v
        tau1 = Mat.zero(F, res.dim)
    elif not M.is_all_of_ok:
        scale = res.mult_matrix(_scalar_coords(ext, _apow(F, M.xi, F.q - 1)))
        tau1 = scale * frob
    else:
        tau1 = frob
    n = E.n
    dim = res.dim * n
    gr = ext.gr

    def assemble(matrices_by_tau):
        rows = [[F.zero] * dim for _ in range(dim)]
        for k, Mk in enumerate(matrices_by_tau):
            tk = Mat.identity(F, res.dim)
            for _ in range(k):
                tk = tau1 * tk
            for r_ in range(n):
                for c_ in range(n):
                    a = Mk[r_, c_]
                    if not a:
                        continue
                    blk = res.mult_matrix(_scalar_coords(ext, a)) * tk
                    for ii in range(res.dim):
                        for jj in range(res.dim):
                            val = blk[ii, jj]
                            if val != F.zero:
                                rows[r_ * res.dim + ii][c_ * res.dim + jj] = F.add(
                                    rows[r_ * res.dim + ii][c_ * res.dim + jj], val
                                )
        return Mat(F, rows)

    g_mats = {}
    for g in ext.group.elements():
        gm = res.g_matrix(g)
        rows = [[F.zero] * dim for _ in range(dim)]
        for b in range(n):
            for ii in range(res.dim):
                for jj in range(res.dim):
                    rows[b * res.dim + ii][b * res.dim + jj] = gm[ii, jj]
        g_mats[g] = Mat(F, rows)

    lie_mat = assemble([E.d])
    mod_mat = assemble(E.matrices)
    lie = FiniteFqGModule(gr, t_mat=lie_mat, g_mats=g_mats).to_free()
    mod = FiniteFqGModule(gr, t_mat=mod_mat, g_mats=g_mats).to_free()
    return lie, mod


def _scalar_coords(ext: ExtensionData, a: tuple) -> list:
    out = [ext.apoly.zero] * ext.d
    out[0] = a
    return out


def _apow(F: FqField, a: tuple, k: int) -> tuple:
    from .poly import ppow

    return ppow(F, a, k)


# -- the lattice at infinity -----------------------------------------------------


class LatticeTable:
    """Greedy reduction data for the lattice xi*O_K inside K_oo: per place
    and residue class of pi-exponent, which basis generator leads there."""

    def __init__(self, ext: ExtensionData, M: TamingModule):
        self.ext = ext
        self.M = M
        F = ext.field
        self.table = []  # per place: dict residue -> (gen index, lead exp, lead coeff)
        self.gen_embeds = []  # per place: list of exact embeddings of xi*w_i
        xi_coords = _scalar_coords(ext, M.xi)
        for p, place in enumerate(ext.places):
            gens = []
            for i in range(ext.d):
                coords = ext.mul_ok(xi_coords, _unit_vec(ext.apoly, ext.d, i))
                gens.append(ext.embed_ok(coords, p))
            self.gen_embeds.append(gens)
            tab = {}
            for i, gl in enumerate(gens):
                lead = gl.lead_exp()
                cls = lead % place.e
                if cls in tab:
                    raise ValueError("lattice generators collide in leading exponents")
                tab[cls] = (i, lead, gl.lead())
            self.table.append(tab)

    def reduce_elem(self, x: Laurent, p: int, prec: int) -> Laurent:
        """Subtract lattice vectors until only fundamental-domain exponents
        remain below prec."""
        ext, F = self.ext, self.ext.field
        place = ext.places[p]
        tab = self.table[p]
        t_emb = ext.t_embeddings[p]
        x = x.truncate(prec)
        while True:
            target = None
            for i, c in enumerate(x.coeffs):
                e = x.emin + i
                if c == F.zero:
                    continue
                cls = e % place.e
                info = tab.get(cls)
                if info is not None and e <= info[1]:
                    target = (e, c, info)
                    break
            if target is None:
                return x
            e, c, (gi, lead, _lcoef) = target
            j = (lead - e) // place.e
            gen = self.gen_embeds[p][gi]
            for _ in range(j):
                gen = gen * t_emb
            x = (x - gen.scale(F.mul(c, F.inv(gen.lead())))).truncate(prec)

    def domain_exponents(self, p: int, upper: int) -> list[int]:
        """Fundamental-domain pi-exponents strictly below the U-level
        `upper` (exponents the greedy reduction cannot touch)."""
        place = self.ext.places[p]
        tab = self.table[p]
        out = []
        lo = min(info[1] for info in tab.values()) + 1
        for e in range(lo, upper):
            info = tab.get(e % place.e)
            if info is None or e > info[1]:
                out.append(e)
        return out


def reduce_mod_lattice(vec: tuple, table: LatticeTable, prec: int) -> tuple:
    """Reduce one K_oo element (tuple over places)."""
    return tuple(table.reduce_elem(x, p, prec) for p, x in enumerate(vec))


def reduce_vec_mod_lattice(vecs: list, table: LatticeTable, prec: int) -> list:
    """Reduce an n-dimensional point coordinatewise."""
    return [reduce_mod_lattice(v, table, prec) for v in vecs]
