"""Nuclear operators on filtered compact modules and their determinants.

A filtered module is either finite (filtration {0}) or an ambient
quotient (K_oo/M)^n with neighborhoods U_i = (t^-i O_(K_oo))^n.  An
operator enters as a Z-series of locally contracting maps; for the
L-value operator the coefficients are the tau-polynomial matrices
phi_m = (d - phi(t)) d^(m-1).

The determinant mod Z^N is the ordinary determinant of 1 + Phi on the
finite quotient V/U at a common nucleus U, computed by Berkowitz over
the truncated series ring.  G-equivariance is handled per character
component; for the built-in extensions the G-action is diagonal on the
fundamental-domain coordinates, so components are coordinate subsets.
"""

from __future__ import annotations

from .ffield import FqField
from .fields import ExtensionData, LatticeTable, TamingModule, reduce_mod_lattice
from .grpring import GroupRing
from .laurent import Laurent, LaurentRing, PrecisionError
from .matrix import Mat, berkowitz_charpoly
from .poly import PolyRing, pdeg
from .tmodule import TauPoly, TModuleSpec


class TauSeriesOperator:
    """Phi = sum phi_m Z^m with phi_m tau-polynomial matrices over A,
    produced on demand."""

    def __init__(self, apoly: PolyRing, n: int, coeff_fn, label: str = "Phi"):
        self.apoly = apoly
        self.n = n
        self._fn = coeff_fn
        self._cache: dict[int, TauPoly] = {}
        self.label = label

    def coeff(self, m: int) -> TauPoly:
        if m not in self._cache:
            phi = self._fn(m)
            if phi.coeffs and not phi.coeff(0).is_zero():
                raise ValueError("operator coefficient has a tau^0 term: not locally contracting")
            self._cache[m] = phi
        return self._cache[m]


def make_theta_operator(E: TModuleSpec) -> TauSeriesOperator:
    """phi_m = (d - phi(t)) d^(m-1): the expansion of
    (1 - phi(t)/T)/(1 - d/T) - 1."""
    A = E.apoly
    head = TauPoly(A, E.n, [Mat.zero(A, E.n)] + [-M for M in E.matrices[1:]])
    dpows: list[Mat] = [Mat.identity(A, E.n)]

    def coeff(m: int) -> TauPoly:
        while len(dpows) < m:
            dpows.append(dpows[-1] * E.d)
        return head * TauPoly.const(A, dpows[m - 1])

    return TauSeriesOperator(A, E.n, coeff, label=f"theta[{E.label}]")


class AmbientQuotient:
    """(K_oo/M)^n with the filtration U_i = (t^-i O_(K_oo))^n."""

    def __init__(self, ext: ExtensionData, M: TamingModule, n: int):
        self.ext = ext
        self.M = M
        self.n = n
        self.table = LatticeTable(ext, M)
        tab = ext.gr.chartab()
        if tab.split.P.orders:
            raise NotImplementedError("wild p-part at infinity is not algorithmized")
        if tab.M != 1:
            raise NotImplementedError("ambient components need F_q-valued characters")

    # coordinates of V/U_depth: (module coord, place, pi-exponent)
    def coords(self, depth: int):
        out = []
        for c in range(self.n):
            for p, place in enumerate(self.ext.places):
                for e in self.table.domain_exponents(p, depth * place.e):
                    out.append((c, p, e))
        return out

    def lift(self, coord) -> list:
        c, p, e = coord
        F = self.ext.field
        vec = [self.ext.zero_kinf() for _ in range(self.n)]
        mono = tuple(
            Laurent.monomial(F, F.one, e) if pp == p else Laurent.zero(F)
            for pp in range(len(self.ext.places))
        )
        vec[c] = mono
        return vec

    def project(self, vecs: list, depth: int, coords) -> list:
        F = self.ext.field
        index = {cc: i for i, cc in enumerate(coords)}
        out = [F.zero] * len(coords)
        for c in range(self.n):
            for p, place in enumerate(self.ext.places):
                x = vecs[c][p]
                if x.prec < depth * place.e:
                    raise PrecisionError(
                        f"projection at depth {depth} needs precision {depth * place.e}, have {x.prec}"
                    )
                for i, v in enumerate(x.coeffs):
                    e = x.emin + i
                    if v == F.zero:
                        continue
                    if e >= depth * place.e:
                        continue  # inside U
                    key = (c, p, e)
                    if key not in index:
                        raise ArithmeticError(f"unreduced coordinate {key}")
                    out[index[key]] = v
        return out

    def char_of_coord(self, coord):
        """The character of Delta the coordinate line transforms by, as the
        tuple of its values on the cyclic generators of Delta."""
        c, p, e = coord
        ext = self.ext
        tab = ext.gr.chartab()
        delta = tab.split.Delta
        vals = []
        for i in range(len(delta.orders)):
            gen_d = tuple(1 if j == i else 0 for j in range(len(delta.orders)))
            g = tab.split.combine(tuple(0 for _ in tab.split.P.orders), gen_d)
            vals.append(ext.field.pow(ext.places[p].pi_scale[g], e))
        return tuple(vals)

    def char_of_class(self, cls):
        tab = self.ext.gr.chartab()
        delta = tab.split.Delta
        vals = []
        for i in range(len(delta.orders)):
            gen_d = tuple(1 if j == i else 0 for j in range(len(delta.orders)))
            vals.append(cls.values[gen_d])
        return tuple(vals)

    def apply_tau_poly(self, phi: TauPoly, vecs: list, prec: int) -> list:
        """phi(x) = sum_k M_k x^(q^k), entries acting through the embedding."""
        ext = self.ext
        F = ext.field
        out = [ext.zero_kinf(prec=prec) for _ in range(self.n)]
        twisted = vecs
        for k, Mk in enumerate(phi.coeffs):
            if k > 0:
                twisted = [tuple(x.qpow_coeffwise(1) for x in v) for v in twisted]
            if Mk.is_zero():
                continue
            for i in range(self.n):
                acc = list(out[i])
                for j in range(self.n):
                    a = Mk[i, j]
                    if not a:
                        continue
                    for p in range(len(ext.places)):
                        emb = ext.embed_scalar(a, p)
                        acc[p] = (acc[p] + emb * twisted[j][p]).truncate(prec)
                out[i] = tuple(acc)
        return out

    def nucleus_index_tau(self, ops: list[TauPoly]) -> int:
        """Valuation bound: phi(U_j) inside U_(j+1) once
        j (q^k - 1) >= 1 + deg D_k for every tau^k coefficient."""
        F = self.ext.field
        i0 = 1
        for phi in ops:
            for k in range(1, phi.tau_degree + 1):
                Dk = phi.coeff(k)
                deg = max((pdeg(Dk[i, j]) for i in range(self.n) for j in range(self.n)), default=-1)
                if deg < 0:
                    continue
                need = -(-(1 + deg) // (F.q ** k - 1))  # ceil
                i0 = max(i0, need)
        return i0

    def verify_nucleus(self, phi: TauPoly, i0: int, span: int = 2) -> bool:
        """Constructive check on quotient generators: phi(U_j) in U_(j+1)
        for j in [i0, i0+span]."""
        ext = self.ext
        for j in range(i0, i0 + span + 1):
            for p, place in enumerate(ext.places):
                for offset in range(place.e):
                    coord = (0, p, j * place.e + offset)
                    for c in range(self.n):
                        vec = self.lift((c, p, j * place.e + offset))
                        prec = (j + 4) * place.e + 8
                        img = self.apply_tau_poly(phi, vec, prec)
                        for cc in range(self.n):
                            x = img[cc][p]
                            if x.coeffs and x.lead_exp() < (j + 1) * place.e:
                                return False
        return True


class SLocalizedQuotient:
    """(K_S/M_S)^n for the trivial extension and S = {oo, v}: coordinates
    are the fundamental-domain tail at infinity together with residues
    mod v^depth, with the diagonal A[1/v]-lattice reduced jointly (the
    polynomial subtracted at infinity is subtracted from the v-residue
    too).  Supports exactly what the localization lemma needs."""

    def __init__(self, ext: ExtensionData, M: TamingModule, n: int, v):
        if ext.d != 1:
            raise NotImplementedError("S-localization is built for the trivial extension")
        self.ext = ext
        self.M = M
        self.n = n
        self.v = v
        self.table = LatticeTable(ext, M)

    def coords(self, depth: int):
        out = []
        dv = self.v.deg
        for c in range(self.n):
            for e in self.table.domain_exponents(0, depth):
                out.append((c, "oo", e))
            for j in range(depth * dv):
                out.append((c, "v", j))
        return out

    def lift(self, coord, prec: int):
        c, kind, e = coord
        F = self.ext.field
        inf = [Laurent.zero(F, prec=prec) for _ in range(self.n)]
        vpart = [() for _ in range(self.n)]
        if kind == "oo":
            inf[c] = Laurent.monomial(F, F.one, e, prec=prec)
        else:
            vpart[c] = tuple([F.zero] * e + [F.one])
        return inf, vpart

    def apply_tau_poly(self, phi: TauPoly, state, depth: int, prec: int):
        """Apply at both places: Laurent arithmetic at infinity, polynomial
        arithmetic mod v^depth at v."""
        from .poly import pdivmod, pmul, pqpow, ppow

        F = self.ext.field
        inf, vpart = state
        mod = ppow(F, self.v.poly, depth)
        out_inf = [Laurent.zero(F, prec=prec) for _ in range(self.n)]
        out_v = [() for _ in range(self.n)]
        tw_inf, tw_v = list(inf), list(vpart)
        for k, Mk in enumerate(phi.coeffs):
            if k > 0:
                tw_inf = [x.qpow_coeffwise(1) for x in tw_inf]
                tw_v = [pdivmod(F, pqpow(F, x, 1), mod)[1] for x in tw_v]
            if Mk.is_zero():
                continue
            for i in range(self.n):
                for j in range(self.n):
                    a = Mk[i, j]
                    if not a:
                        continue
                    emb = self.ext.embed_scalar(a, 0)
                    out_inf[i] = (out_inf[i] + emb * tw_inf[j]).truncate(prec)
                    out_v[i] = pdivmod(F, padd_local(F, out_v[i], pmul(F, a, tw_v[j])), mod)[1]
        return out_inf, out_v

    def reduce(self, state, depth: int, prec: int):
        """Subtract the diagonal lattice: clear nonnegative exponents at
        infinity and apply the same polynomial shift to the v-part."""
        from .poly import pdivmod, pmul, ppow

        F = self.ext.field
        inf, vpart = state
        mod = ppow(F, self.v.poly, depth)
        out_inf, out_v = [], []
        xi = self.M.xi
        for c in range(self.n):
            x = inf[c]
            sub = {}
            while True:
                target = None
                for i, cc in enumerate(x.coeffs):
                    e = x.emin + i
                    if cc != F.zero and e <= -(len(xi) - 1):
                        target = (e, cc)
                        break
                if target is None:
                    break
                e, cc = target
                # subtract cc * xi * t^j with matching lead: xi lead exp is -(deg xi)
                j = -(len(xi) - 1) - e
                gen = self.ext.embed_scalar(xi, 0)
                t_emb = self.ext.t_embeddings[0]
                for _ in range(j):
                    gen = gen * t_emb
                f = F.mul(cc, F.inv(gen.lead()))
                x = (x - gen.scale(f)).truncate(prec)
                poly = pmul(F, xi, tuple([F.zero] * j + [F.one]))
                sub[j] = F.add(sub.get(j, F.zero), f)
            out_inf.append(x)
            shift = ()
            for j, f in sub.items():
                from .poly import padd, pscale

                shift = padd(F, shift, pscale(F, f, pmul(F, xi, tuple([F.zero] * j + [F.one]))))
            out_v.append(pdivmod(F, padd_local(F, vpart[c], tuple(F.neg(cv) for cv in shift)), mod)[1])
        return out_inf, out_v

    def project(self, state, depth: int, coords, prec: int):
        F = self.ext.field
        inf, vpart = state
        index = {cc: i for i, cc in enumerate(coords)}
        out = [F.zero] * len(coords)
        for c in range(self.n):
            x = inf[c]
            for i, v in enumerate(x.coeffs):
                e = x.emin + i
                if v == F.zero or e >= depth:
                    continue
                out[index[(c, "oo", e)]] = v
            for j, v in enumerate(vpart[c]):
                if v != F.zero:
                    out[index[(c, "v", j)]] = v
        return out


def padd_local(F, a, b):
    from .poly import padd

    return padd(F, a, b)


def nuclear_det_slocal(Phi: TauSeriesOperator, V: SLocalizedQuotient, N: int, depth_extra: int = 0) -> Laurent:
    """Nuclear determinant on the S-localized quotient (trivial group)."""
    ext = V.ext
    F = ext.field
    ops = [Phi.coeff(m) for m in range(1, N)]
    amb = AmbientQuotient(ext, V.M, V.n)
    i0 = amb.nucleus_index_tau(ops) + 1 + depth_extra
    depth = i0 + 1
    coords = V.coords(depth)
    window = depth + 6
    mats: dict[int, Mat] = {}
    for m in range(1, N):
        cols = []
        for coord in coords:
            state = V.lift(coord, window)
            img = V.apply_tau_poly(ops[m - 1], state, depth, window)
            img = V.reduce(img, depth, window)
            cols.append(V.project(img, depth, coords, window))
        mats[m] = Mat(F, list(zip(*cols)))
    det = _component_det(mats, F, N, len(coords))
    gr = ext.gr
    return Laurent(gr, det.emin, [gr.constant(c) for c in det.coeffs], prec=N)


class FiniteQuotient:
    """A finite module with U = 0: an F_q[G]-free presentation plus the
    operator coefficients as matrices over the group ring."""

    def __init__(self, gr: GroupRing, rank: int, coeff_fn):
        self.gr = gr
        self.rank = rank
        self.coeff = coeff_fn  # m -> Mat over gr (phi_m on the free basis)


def _component_det(matrices_by_m: dict[int, Mat], ring, N: int, k: int) -> Laurent:
    """det(Id + sum_m A_m Z^m) over ring[[Z]]/Z^N for component matrices."""
    LR = LaurentRing(ring, N)
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            coeffs = {0: ring.one} if i == j else {}
            for m, Am in matrices_by_m.items():
                v = Am[i, j]
                if not ring.is_zero(v):
                    coeffs[m] = ring.add(coeffs.get(m, ring.zero), v)
            if coeffs:
                lo = min(coeffs)
                arr = [coeffs.get(e, ring.zero) for e in range(lo, max(coeffs) + 1)]
                row.append(Laurent(ring, lo, arr, prec=N))
            else:
                row.append(Laurent.zero(ring, prec=N))
        rows.append(row)
    cp = berkowitz_charpoly(Mat(LR, rows))
    # det = (-1)^k charpoly(0); over the Z-series ring the constant term
    det = cp[0]
    if k % 2 == 1:
        det = -det
    return det


def nuclear_det(Phi, V, N: int, depth_extra: int = 0) -> Laurent:
    """The nuclear determinant det(1 + Phi | V) mod Z^N, returned as a
    Laurent value over F_q[G] in u = 1/t (the series variable Z is
    evaluated at u)."""
    if isinstance(V, FiniteQuotient):
        return _nuclear_det_free(V, N)
    return _nuclear_det_ambient(Phi, V, N, depth_extra)


def _nuclear_det_free(V: FiniteQuotient, N: int) -> Laurent:
    gr = V.gr
    tab = gr.chartab()
    P = tab.comp_ring
    per_class: list[dict[int, Mat]] = [dict() for _ in tab.classes]
    for m in range(1, N):
        Mm = V.coeff(m)
        if Mm is None:
            continue
        for ci in range(len(tab.classes)):
            rows = []
            for i in range(V.rank):
                row = []
                for j in range(V.rank):
                    row.append(tab.psi_const(Mm[i, j])[ci])
                rows.append(row)
            per_class[ci][m] = Mat(P, rows)
    dets = [_component_det(per_class[ci], P, N, V.rank) for ci in range(len(tab.classes))]
    return tab.psi_inv_laurent(dets, gr)


class MapSeriesOperator:
    """Phi = sum phi_m Z^m with each phi_m an arbitrary coordinate-level
    map on an ambient quotient: apply_fn(m, vecs, prec) -> vecs.  Nucleus
    indices cannot be read off valuations, so they are certified by
    applying the maps to filtration generators."""

    def __init__(self, apply_fn, nucleus_hint: int = 1, label: str = "Phi"):
        self.apply = apply_fn
        self.nucleus_hint = nucleus_hint
        self.label = label


def _verify_nucleus_map(V: AmbientQuotient, Phi: MapSeriesOperator, m: int, i0: int, span: int = 2) -> bool:
    ext = V.ext
    for j in range(i0, i0 + span + 1):
        for p, place in enumerate(ext.places):
            for offset in range(place.e):
                for c in range(V.n):
                    vec = V.lift((c, p, j * place.e + offset))
                    prec = (j + 4) * place.e + 8
                    img = Phi.apply(m, vec, prec)
                    img = [reduce_mod_lattice(v, V.table, prec) for v in img]
                    for cc in range(V.n):
                        x = img[cc][p]
                        if x.coeffs and x.lead_exp() < (j + 1) * place.e:
                            return False
    return True


def _nuclear_det_ambient(Phi, V: AmbientQuotient, N: int, depth_extra: int) -> Laurent:
    ext = V.ext
    F: FqField = ext.field
    if isinstance(Phi, TauSeriesOperator):
        ops = [Phi.coeff(m) for m in range(1, N)]
        i0 = V.nucleus_index_tau(ops) + depth_extra
        for phi in ops:
            if not V.verify_nucleus(phi, i0):
                raise ArithmeticError("nucleus verification failed")

        def apply_m(m, vec, prec):
            return V.apply_tau_poly(ops[m - 1], vec, prec)

    else:
        i0 = Phi.nucleus_hint + depth_extra
        for _ in range(6):
            if all(_verify_nucleus_map(V, Phi, m, i0) for m in range(1, N)):
                break
            i0 += 1
        else:
            raise ArithmeticError("no nucleus index certified for the map operator")
        apply_m = Phi.apply
    depth = i0 + 1
    coords = V.coords(depth)
    maxe = max(place.e for place in ext.places)
    window = (depth + 2) * maxe + 2
    mats: dict[int, Mat] = {}
    for m in range(1, N):
        cols = []
        for coord in coords:
            img = apply_m(m, V.lift(coord), window)
            img = [reduce_mod_lattice(v, V.table, window) for v in img]
            cols.append(V.project(img, depth, coords))
        mats[m] = Mat(F, list(zip(*cols)))
    gr = ext.gr
    tab = gr.chartab()
    dets = []
    for cls in tab.classes:
        want = V.char_of_class(cls)
        idx = [i for i, cc in enumerate(coords) if V.char_of_coord(cc) == want]
        sub = {
            m: Mat(F, [[mats[m][i, j] for j in idx] for i in idx]) for m in mats
        }
        comp_det = _component_det(sub, F, N, len(idx))
        P = tab.comp_ring
        dets.append(
            Laurent(
                P,
                comp_det.emin,
                [P.constant(c) for c in comp_det.coeffs],
                prec=N,
            )
        )
    return tab.psi_inv_laurent(dets, gr)


def trace_check(
    E: TModuleSpec, X: ExtensionData, M: TamingModule, N: int, cutoff: int | None = None
) -> Laurent:
    """Residual of the trace formula: theta0 minus the nuclear determinant
    of (1 - phi(t)/T)/(1 - d/T) - 1 on (K_oo/M)^n, mod u^(N+1)."""
    from .lvalue import theta0

    theta = theta0(E, X, M, N, cutoff=cutoff)
    Phi = make_theta_operator(E)
    V = AmbientQuotient(X, M, E.n)
    det = nuclear_det(Phi, V, N + 1)
    return (theta.value - det).truncate(N + 1)
