"""The group ring F_q[G] for finite abelian G and its character theory.

Elements are canonical sorted tuples of (group element, nonzero field
code) pairs.  For G = P x Delta (Sylow split at p = char F_q) the ring
of Laurent series F_q[G]((u)) decomposes through the characters of
Delta as a direct sum of F(chi)[P]((u)) over Galois conjugacy classes
of characters, F(chi) = GF(q^(orbit size)); all monicity questions,
unit tests and inversions are run componentwise through that map and
reassembled by the inverse (orbit-trace) formula.

The monic/unit algorithms exploit that F[P] is local with nilpotent
augmentation ideal: reduce modulo the ideal to the classical field
case, then lift corrections Hensel style until the residual dies.
"""

from __future__ import annotations

from .ffield import ExtField, Ring
from .groups import GroupSpec, SylowSplit
from .laurent import Laurent, PrecisionError
from .poly import monic_irreducibles


class GroupRing(Ring):
    def __init__(self, field: Ring, group: GroupSpec):
        self.field = field
        self.group = group
        self.zero = ()
        self.one = ((group.identity, field.one),)
        self._chartab = None

    def make(self, mapping) -> tuple:
        items = [(g, c) for g, c in mapping.items() if not self.field.is_zero(c)]
        items.sort(key=lambda t: t[0])
        return tuple(items)

    def to_dict(self, a) -> dict:
        return dict(a)

    def constant(self, c) -> tuple:
        return () if self.field.is_zero(c) else ((self.group.identity, c),)

    def basis_elem(self, g) -> tuple:
        return ((tuple(g), self.field.one),)

    def constant_code(self, a):
        """Field code if supported on the identity only, else None."""
        if not a:
            return self.field.zero
        if len(a) == 1 and a[0][0] == self.group.identity:
            return a[0][1]
        return None

    def add(self, a, b):
        F = self.field
        out = dict(a)
        for g, c in b:
            s = F.add(out.get(g, F.zero), c)
            if F.is_zero(s):
                out.pop(g, None)
            else:
                out[g] = s
        return self.make(out)

    def neg(self, a):
        F = self.field
        return tuple((g, F.neg(c)) for g, c in a)

    def mul(self, a, b):
        F, G = self.field, self.group
        out: dict = {}
        for g, c in a:
            for h, d in b:
                k = G.mul(g, h)
                s = F.add(out.get(k, F.zero), F.mul(c, d))
                if F.is_zero(s):
                    out.pop(k, None)
                else:
                    out[k] = s
        return self.make(out)

    def scale(self, c, a):
        F = self.field
        return self.make({g: F.mul(c, d) for g, d in a})

    def group_translate(self, g, a):
        G = self.group
        return self.make({G.mul(g, h): c for h, c in a})

    def aug(self, a):
        """Augmentation: sum of all coefficients."""
        F = self.field
        s = F.zero
        for _, c in a:
            s = F.add(s, c)
        return s

    def qpow(self, a, k: int = 1):
        F, G = self.field, self.group
        q = F.q
        return self.make({G.pow(g, q ** k): F.qpow(c, k) for g, c in a})

    def from_int(self, k):
        return self.constant(self.field.from_int(k))

    # -- units ---------------------------------------------------------------

    def chartab(self) -> "CharacterTable":
        if self._chartab is None:
            self._chartab = CharacterTable(self.field, self.group)
        return self._chartab

    def is_unit(self, a) -> bool:
        """Unit iff every character component has nonzero augmentation.

        For a pure p-group (Delta trivial) this is the usual local-ring
        test; for general abelian G it runs through psi_Delta.
        """
        if not a:
            return False
        tab = self.chartab()
        for comp in tab.psi_const(a):
            if tab.comp_ring.field.is_zero(tab.comp_ring.aug(comp)):
                return False
        return True

    def inv(self, a):
        tab = self.chartab()
        comps = [local_inv(tab.comp_ring, y) for y in tab.psi_const(a)]
        return tab.psi_inv_const(comps, self)

    def el_str(self, a) -> str:
        if not a:
            return "0"
        F, G = self.field, self.group
        if G.is_trivial():
            return F.el_str(a[0][1])
        terms = []
        for g, c in a:
            cs = F.el_str(c)
            if "+" in cs and len(cs) > 1:
                cs = f"({cs})"
            terms.append(f"{cs}*{G.el_str(g)}")
        return " + ".join(terms)

    def __eq__(self, other):
        return (
            isinstance(other, GroupRing)
            and other.field == self.field
            and other.group == self.group
        )

    def __hash__(self):
        return hash(("GroupRing", self.field, self.group))

    def __repr__(self):
        return f"{self.field!r}[{self.group!r}]"


def local_inv(ring: GroupRing, a):
    """Inverse in the local ring F[P]: write a = u(1 + n) with u the
    augmentation (a unit of F) times identity plus nilpotent remainder."""
    F = ring.field
    u = ring.aug(a)
    if F.is_zero(u):
        raise ZeroDivisionError("augmentation zero: not a unit of F[P]")
    ui = F.inv(u)
    n = ring.sub(ring.scale(ui, a), ring.one)  # nilpotent
    out, term = ring.one, ring.one
    for _ in range(ring.group.order + 2):
        term = ring.neg(ring.mul(term, n))
        if not term:
            break
        out = ring.add(out, term)
    return ring.scale(ui, out)


class CharClass:
    """A Galois conjugacy class of characters of Delta: the chosen
    representative's exponent tuple, the orbit size m (so values generate
    GF(q^m)), and cached values on Delta."""

    __slots__ = ("exps", "size", "values")

    def __init__(self, exps, size, values):
        self.exps = exps
        self.size = size
        self.values = values  # dict: delta element -> big field code

    def __repr__(self):
        return f"chi{self.exps}[m={self.size}]"


class CharacterTable:
    """Characters of the prime-to-p part Delta of G, with values in one
    common field GF(q^M), M = ord of q modulo exp(Delta).  Per-class value
    fields GF(q^m) embed in it; reassembly uses the orbit trace."""

    def __init__(self, field: Ring, group: GroupSpec):
        base = field
        p = base.p
        self.field = base
        self.group = group
        self.split = group.sylow_split(p)
        delta = self.split.Delta
        E = delta.exponent if delta.orders else 1
        M = 1
        if E > 1:
            while (base.q ** M - 1) % E != 0:
                M += 1
        self.M = M
        if M == 1:
            self.big = base
            self._embed = lambda c: c
        else:
            mod = monic_irreducibles(base, M)[0]
            self.big = ExtField(base, mod)
            self._embed = self.big.embed
        self.comp_ring = GroupRing(self.big, self.split.P)
        self.classes = self._build_classes(E)

    def _build_classes(self, E: int) -> list[CharClass]:
        delta = self.split.Delta
        if delta.order == 1:
            return [CharClass((), 1, {(): self.big.one})]
        big = self.big
        if self.M == 1:
            # find an element of order E inside GF(q) itself
            zeta = None
            for c in range(1, big.q):
                if _mult_order(big, c) == E:
                    zeta = c
                    break
        else:
            g = big.multiplicative_generator()
            zeta = big.pow(g, (big.size - 1) // E)
        q = self.field.q
        orders = delta.orders
        seen = set()
        classes = []
        for a in delta.elements():
            if a in seen:
                continue
            orbit = []
            b = a
            while b not in seen:
                seen.add(b)
                orbit.append(b)
                b = tuple((x * q) % n for x, n in zip(b, orders))
            rep = min(orbit)
            values = {}
            for d in delta.elements():
                e = sum(x * y * (E // n) for x, y, n in zip(rep, d, orders)) % E
                values[d] = big.pow(zeta, e)
            classes.append(CharClass(rep, len(orbit), values))
        classes.sort(key=lambda c: c.exps)
        assert sum(c.size for c in classes) == delta.order
        return classes

    # -- psi on group ring constants ------------------------------------

    def psi_const(self, a) -> list[tuple]:
        """Components of an F_q[G] element in each GF(q^M)[P]."""
        big, P = self.big, self.comp_ring
        out = []
        for cls in self.classes:
            comp: dict = {}
            for g, c in a:
                gp, gd = self.split.project(g)
                v = big.mul(self._embed(c), cls.values[gd])
                s = big.add(comp.get(gp, big.zero), v)
                if big.is_zero(s):
                    comp.pop(gp, None)
                else:
                    comp[gp] = s
            out.append(P.make(comp))
        return out

    def psi_inv_const(self, comps: list[tuple], target: GroupRing) -> tuple:
        """Inverse of psi: orbit-trace reassembly.

        coefficient at g = |Delta|^(-1) sum over classes of
        Tr_(q^m / q)(y_chi[g_P] * chi(g_Delta^(-1))).
        """
        big = self.big
        delta = self.split.Delta
        F = self.field
        dinv = F.inv(F.from_int(delta.order % F.p)) if delta.order > 1 else F.one
        dicts = [dict(c) for c in comps]
        out = {}
        for g in self.group.elements():
            gp, gd = self.split.project(g)
            gdi = delta.inv(gd)
            total = big.zero
            for cls, comp in zip(self.classes, dicts):
                y = comp.get(gp)
                if y is None:
                    continue
                z = big.mul(y, cls.values[gdi])
                tr = big.zero
                for j in range(cls.size):
                    tr = big.add(tr, big.qpow(z, j))
                total = big.add(total, tr)
            c = self._down(total)
            c = F.mul(dinv, c)
            if not F.is_zero(c):
                out[tuple(g)] = c
        return target.make(out)

    def _down(self, a):
        """Big field code -> base field code; must be a constant."""
        if self.M == 1:
            return a
        c = self.big.constant_code(a)
        if c is None:
            raise ArithmeticError("psi inverse produced a non-rational value")
        return c

    def idempotent(self, cls: CharClass, target: GroupRing) -> tuple:
        """The class idempotent e_chi-hat as an element of F_q[Delta] < F_q[G]."""
        comps = [
            self.comp_ring.one if c is cls else self.comp_ring.zero for c in self.classes
        ]
        return self.psi_inv_const(comps, target)

    # -- psi on Laurent series -------------------------------------------

    def psi_laurent(self, x: Laurent) -> list[Laurent]:
        n = len(self.classes)
        cols = [[] for _ in range(n)]
        for c in x.coeffs:
            for i, comp in enumerate(self.psi_const(c)):
                cols[i].append(comp)
        prec = None if x.prec == float("inf") else int(x.prec)
        return [Laurent(self.comp_ring, x.emin, col, prec=prec) for col in cols]

    def psi_inv_laurent(self, comps: list[Laurent], target: GroupRing) -> Laurent:
        prec = min(c.prec for c in comps)
        emins = [c.emin for c in comps if c.coeffs]
        if not emins:
            return Laurent.zero(target, prec=None if prec == float("inf") else int(prec))
        lo = min(emins)
        hi = int(prec) if prec != float("inf") else max(
            c.emin + len(c.coeffs) for c in comps
        )
        out = []
        for e in range(lo, hi):
            codes = [c.coeff(e) for c in comps]
            out.append(self.psi_inv_const(codes, target))
        return Laurent(target, lo, out, prec=None if prec == float("inf") else int(prec))


def _mult_order(field, c) -> int:
    k, x = 1, c
    while x != field.one:
        x = field.mul(x, c)
        k += 1
        if k > field.size:
            raise ArithmeticError("not a unit")
    return k


# -- monicity ---------------------------------------------------------------


class NotAUnitError(ArithmeticError):
    """The value has no unit coefficient within known precision.  `reason`
    distinguishes a certified non-unit from plain insufficient precision."""

    def __init__(self, msg, reason: str):
        super().__init__(msg)
        self.reason = reason


def _component_lead(tab: CharacterTable, y: Laurent) -> int:
    """Least exponent whose coefficient is a unit of F[P] (nonzero
    augmentation); earlier coefficients are then nilpotent."""
    P = tab.comp_ring
    F = tab.big
    for i, c in enumerate(y.coeffs):
        if not F.is_zero(P.aug(c)):
            return y.emin + i
    if y.prec == float("inf") and y.coeffs:
        raise NotAUnitError("no unit coefficient: certified non-unit", reason="non_unit")
    raise NotAUnitError(
        f"no unit coefficient below precision {y.prec}",
        reason="insufficient_precision" if y.coeffs or y.prec != float("inf") else "zero",
    )


def _resid(tab: CharacterTable, y: Laurent) -> Laurent:
    P = tab.comp_ring
    prec = None if y.prec == float("inf") else int(y.prec)
    return Laurent(tab.big, y.emin, (P.aug(c) for c in y.coeffs), prec=prec)


def _lift(tab: CharacterTable, y: Laurent) -> Laurent:
    P = tab.comp_ring
    prec = None if y.prec == float("inf") else int(y.prec)
    return Laurent(P, y.emin, (P.constant(c) for c in y.coeffs), prec=prec)


def _nilpotency_index(split: SylowSplit) -> int:
    s = 1
    for n in split.P.orders:
        s += n - 1
    return s


def _monic_part_component(tab: CharacterTable, y: Laurent) -> tuple[Laurent, Laurent]:
    """Factor y = m * w in F(chi)[P]((u)): m monic (lead 1 at the unit-lead
    exponent), w a polynomial in t = 1/u with unit constant term.

    Hensel lifting along powers of the augmentation ideal: solve the
    correction equation m_bar*dw + dm*c_bar = r exactly at each step, with
    dw supported in exponents <= 0 and dm above the leading exponent.  With
    trivial p-part the first residual already vanishes and no precision is
    spent beyond the leading-coefficient normalization.
    """
    big, P = tab.big, tab.comp_ring
    i0 = _component_lead(tab, y)
    if y.prec - i0 < 1:
        raise PrecisionError(
            f"precision {y.prec} too low past the unit lead {i0} to determine the unit factor"
        )
    yb = _resid(tab, y)
    cbar = yb.coeff(i0)
    cbar_inv = big.inv(cbar)
    mbar = yb.scale(cbar_inv)  # classical monic part over the residue field
    mbar_inv_lift = None
    m = _lift(tab, mbar)
    w = Laurent.monomial(P, P.constant(cbar), 0, prec=None if y.prec == float("inf") else int(y.prec) - i0)
    guard = _nilpotency_index(tab.split) + 2
    for _ in range(guard):
        r = y - m * w
        if r.is_zero():
            return m, w
        if mbar_inv_lift is None:
            mbar_inv_lift = _lift(tab, mbar.inverse())
        rho = r * mbar_inv_lift
        dw, rho_hi = rho.split(0)
        dm = _lift(tab, mbar) * rho_hi
        dm = dm.scale(P.constant(cbar_inv))
        w = w + dw
        m = m + dm
    raise ArithmeticError("monic decomposition did not stabilize (non-unit input?)")


def monic_part(x: Laurent) -> tuple[Laurent, tuple]:
    """Unique factorization x = x_plus * unit of a unit of F_q((u))[G] into
    its monic representative and a polynomial unit of F_q[t][G].

    Returns (x_plus as Laurent over the group ring, unit as an ascending
    t-coefficient tuple over the group ring).  Exact inputs are processed
    at a finite working precision; when the factorization closes exactly
    in F_q[t][G] the monic part is handed back exact.
    """
    R: GroupRing = x.ring
    if x.prec == float("inf"):
        from .poly import pmul

        span = (len(x.coeffs) + abs(x.emin) + 1) if x.coeffs else 1
        xplus, unit = monic_part(x.truncate(span + 12))
        try:
            mpoly = xplus.to_t_poly()
        except (ValueError, PrecisionError):
            return xplus, unit
        if all(e <= 0 for e in x.support()) and pmul(R, mpoly, unit) == x.to_t_poly():
            return Laurent.from_t_poly(R, mpoly), unit
        return xplus, unit
    tab = R.chartab()
    if not tab.split.P.orders:
        return _monic_assemble(tab, R, x)
    # Wild p-part: flat precision tracking over-penalizes the Hensel loop.
    # Run zero-padded, then assign the analytic stabilization bound: an input
    # perturbation of order N multiplies the value by 1 + eps with
    # val(eps) >= N - (s-1)(i0 - e0), which is itself monic, so the unit is
    # exact and the monic part is determined strictly below that bound.
    N = int(x.prec)
    M = N - _wild_loss(tab, x)
    i0s = [_component_lead(tab, y) for y in tab.psi_laurent(x)]
    if M < max(i0s) + 2:
        raise PrecisionError(
            f"precision {N} too low for a stabilized monic part (need past {max(i0s) + _wild_loss(tab, x) + 2})"
        )
    xp, unit = _monic_assemble(tab, R, _pad(x, N))
    return xp.truncate(M), unit


def _wild_loss(tab: "CharacterTable", x: Laurent) -> int:
    """(s-1) * (unit-lead exponent - leading exponent), maximized over
    components: the stabilization loss of the wild monic decomposition."""
    s = _nilpotency_index(tab.split)
    if s <= 1:
        return 0
    loss = 0
    for y in tab.psi_laurent(x):
        if not y.coeffs:
            continue
        i0 = _component_lead(tab, y)
        loss = max(loss, (s - 1) * (i0 - y.emin))
    return loss


def _pad(x: Laurent, N: int) -> Laurent:
    """Treat the known coefficients as exact out to a padded window so the
    Hensel loop cannot erode below the stabilization depth."""
    tab: CharacterTable = x.ring.chartab()
    s = _nilpotency_index(tab.split)
    depth = (max(0, -x.emin) + 8) * (s + 2) + 8
    xt = x.truncate(N)
    return Laurent(x.ring, xt.emin, xt.coeffs, prec=N + depth)


def _monic_assemble(tab: CharacterTable, R: GroupRing, x: Laurent) -> tuple[Laurent, tuple]:
    comps = tab.psi_laurent(x)
    ms, ws = [], []
    for y in comps:
        m, w = _monic_part_component(tab, y)
        ms.append(m)
        ws.append(w)
    xplus = tab.psi_inv_laurent(ms, R)
    # unit: exponents <= 0 in u; exponent -d is the t^d coefficient
    deg = max((-w.emin if w.coeffs else 0) for w in ws)
    unit = []
    for d in range(deg + 1):
        codes = [w.coeff(-d) for w in ws]
        unit.append(tab.psi_inv_const(codes, R))
    while unit and unit[-1] == R.zero:
        unit.pop()
    return xplus, tuple(unit)


def is_monic(x: Laurent) -> bool:
    """Componentwise test for membership in t^n (1 + u F(chi)[P][[u]]).

    Requires at least one coefficient of known precision past the leading
    one, and raises NotAUnitError when no component lead can be found.
    """
    R: GroupRing = x.ring
    tab = R.chartab()
    for y in tab.psi_laurent(x):
        i0 = _component_lead(tab, y)
        if y.prec != float("inf") and y.prec < i0 + 2:
            raise PrecisionError(
                f"monicity needs one coefficient past the lead (lead {i0}, precision {y.prec})"
            )
        if y.emin < i0:
            return False  # nonzero nilpotent junk below the unit lead
        if y.coeff(i0) != tab.comp_ring.one:
            return False
    return True


def gr_laurent_inverse(x: Laurent, work_prec: int | None = None) -> Laurent:
    """Inverse of a unit of F_q((u))[G] at common precision.

    Componentwise: classical inversion of the residue series over the
    field, then Newton steps z <- z + z(1 - yz) across the nilpotent
    augmentation filtration.  In the wild case the computation runs
    zero-padded and the result carries the analytic bound N - 2D, where
    u^(-D) bounds the valuation of the inverse.
    """
    R: GroupRing = x.ring
    if R.group.is_trivial():
        return x.inverse(work_prec=work_prec)
    tab = R.chartab()
    wild = bool(tab.split.P.orders)
    if x.prec == float("inf"):
        if work_prec is None:
            raise PrecisionError("inverse of an exact group-ring series needs work_prec")
        span = (len(x.coeffs) + abs(x.emin) + 1) if x.coeffs else 1
        x = x.truncate(max(work_prec, span) + 4)
    N = int(x.prec)
    s = _nilpotency_index(tab.split)
    comps = tab.psi_laurent(x)
    loss = 0
    for y in comps:
        i0 = _component_lead(tab, y)  # raises if no unit coefficient
        e0 = y.emin if y.coeffs else i0
        loss = max(loss, 2 * (i0 + (s - 1) * (i0 - e0)))
    M = N - loss
    if wild:
        comps = tab.psi_laurent(_pad(x, N))
    outs = []
    guard = s.bit_length() + 3
    for y in comps:
        yb = _resid(tab, y)
        z = _lift(tab, yb.inverse(work_prec=work_prec))
        one = Laurent.one(tab.comp_ring, prec=None)
        for _ in range(guard):
            r = one - y * z
            if r.is_zero():
                break
            z = z + z * r
        outs.append(z)
    out = tab.psi_inv_laurent(outs, R)
    return out.truncate(M) if wild else out
