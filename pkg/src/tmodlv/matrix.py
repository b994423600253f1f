"""Dense matrices over an arbitrary Ring, with the Berkowitz
characteristic polynomial (division free, so it works over group rings
and truncated series rings that have zero divisors) and Gaussian
elimination reserved for coefficient fields."""

from __future__ import annotations

from .ffield import Ring


class Mat:
    __slots__ = ("ring", "rows")

    def __init__(self, ring: Ring, rows):
        self.ring = ring
        self.rows = tuple(tuple(r) for r in rows)

    @staticmethod
    def zero(ring: Ring, n: int, m: int | None = None) -> "Mat":
        m = n if m is None else m
        return Mat(ring, [[ring.zero] * m for _ in range(n)])

    @staticmethod
    def identity(ring: Ring, n: int) -> "Mat":
        return Mat(
            ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
        )

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __add__(self, other: "Mat") -> "Mat":
        R = self.ring
        return Mat(
            R,
            [
                [R.add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other: "Mat") -> "Mat":
        R = self.ring
        return Mat(
            R,
            [
                [R.sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __neg__(self) -> "Mat":
        R = self.ring
        return Mat(R, [[R.neg(a) for a in row] for row in self.rows])

    def __mul__(self, other: "Mat") -> "Mat":
        R = self.ring
        if self.ncols != other.nrows:
            raise ValueError("matrix shape mismatch")
        bt = list(zip(*other.rows))
        out = []
        for row in self.rows:
            orow = []
            for col in bt:
                s = R.zero
                for a, b in zip(row, col):
                    if not (R.is_zero(a) or R.is_zero(b)):
                        s = R.add(s, R.mul(a, b))
                orow.append(s)
            out.append(orow)
        return Mat(R, out)

    def scale(self, c) -> "Mat":
        R = self.ring
        return Mat(R, [[R.mul(c, a) for a in row] for row in self.rows])

    def apply(self, vec):
        R = self.ring
        out = []
        for row in self.rows:
            s = R.zero
            for a, x in zip(row, vec):
                if not (R.is_zero(a) or R.is_zero(x)):
                    s = R.add(s, R.mul(a, x))
            out.append(s)
        return out

    def map(self, f, ring: Ring | None = None) -> "Mat":
        return Mat(ring or self.ring, [[f(a) for a in row] for row in self.rows])

    def transpose(self) -> "Mat":
        return Mat(self.ring, list(zip(*self.rows)))

    def power(self, k: int) -> "Mat":
        out, base = Mat.identity(self.ring, self.nrows), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        R = self.ring
        return all(R.is_zero(a) for row in self.rows for a in row)

    def __eq__(self, other):
        return isinstance(other, Mat) and other.ring == self.ring and other.rows == self.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        R = self.ring
        body = "; ".join(", ".join(R.el_str(a) for a in row) for row in self.rows)
        return f"Mat[{body}]"


def berkowitz_charpoly(m: Mat) -> tuple:
    """Coefficients of det(X*Id - m), ascending in X, computed without any
    division in the ground ring.

    The classical Berkowitz recursion: the coefficient vector of a k x k
    leading principal block is the previous vector multiplied by a lower
    triangular Toeplitz matrix built from -a, -R C, -R A C, ... where a is
    the new pivot, R/C the fringe row/column and A the previous block.
    """
    R = m.ring
    n = m.nrows
    if n != m.ncols:
        raise ValueError("characteristic polynomial of a non-square matrix")
    if n == 0:
        return (R.one,)
    # descending coefficient vectors, starting from the 1x1 top-left block
    vec = [R.one, R.neg(m[0, 0])]
    for k in range(1, n):
        a = m[k, k]
        row = [m[k, j] for j in range(k)]
        col = [m[j, k] for j in range(k)]
        block = [[m[i, j] for j in range(k)] for i in range(k)]
        # diags = [1, -a, -R C, -R A C, -R A^2 C, ...]
        diags = [R.one, R.neg(a)]
        cur = col
        for _ in range(k):
            s = R.zero
            for x, y in zip(row, cur):
                if not (R.is_zero(x) or R.is_zero(y)):
                    s = R.add(s, R.mul(x, y))
            diags.append(R.neg(s))
            nxt = []
            for i in range(k):
                t = R.zero
                for j in range(k):
                    x = block[i][j]
                    if not (R.is_zero(x) or R.is_zero(cur[j])):
                        t = R.add(t, R.mul(x, cur[j]))
                nxt.append(t)
            cur = nxt
        new = []
        for i in range(k + 2):
            s = R.zero
            for j in range(min(i, k) + 1):
                if i - j <= k + 1:
                    d = diags[i - j]
                    if j < len(vec) and not (R.is_zero(d) or R.is_zero(vec[j])):
                        s = R.add(s, R.mul(d, vec[j]))
            new.append(s)
        vec = new
    return tuple(reversed(vec))


def det_berkowitz(m: Mat):
    """Determinant via the characteristic polynomial: det = (-1)^n charpoly(0)."""
    c0 = berkowitz_charpoly(m)[0]
    return c0 if m.nrows % 2 == 0 else m.ring.neg(c0)


def charpoly_cofactor(m: Mat) -> tuple:
    """Oracle: det(X*Id - m) by cofactor expansion over Ring[X].

    Exponential cost; only for cross-checking Berkowitz on tiny matrices.
    """
    from .poly import PolyRing, pconst

    R = m.ring
    P = PolyRing(R, "X")
    n = m.nrows
    xid_minus = [
        [
            P.sub(P.gen if i == j else P.zero, pconst(R, m[i, j]))
            for j in range(n)
        ]
        for i in range(n)
    ]

    def expand(rows, cols):
        if not rows:
            return P.one
        i = rows[0]
        total = P.zero
        for idx, j in enumerate(cols):
            a = xid_minus[i][j]
            if P.is_zero(a):
                continue
            sub = expand(rows[1:], cols[:idx] + cols[idx + 1 :])
            term = P.mul(a, sub)
            total = P.add(total, term if idx % 2 == 0 else P.neg(term))
        return total

    return expand(list(range(n)), list(range(n)))


def adjugate_charpoly(m: Mat) -> Mat:
    """Adjugate via Cayley-Hamilton, division free:
    adj(A) = (-1)^(n-1) (A^(n-1) + c_(n-1) A^(n-2) + ... + c_1 Id)
    for charpoly X^n + c_(n-1) X^(n-1) + ... + c_0."""
    R = m.ring
    n = m.nrows
    if n == 0:
        return m
    cp = berkowitz_charpoly(m)
    B = Mat.identity(R, n)  # Horner accumulation of the degree-(n-1) part
    for i in range(n - 1, 0, -1):
        B = m * B + Mat.identity(R, n).scale(cp[i])
    return B if (n - 1) % 2 == 0 else -B


def gauss_inverse(m: Mat, pivot_ok=None) -> Mat:
    """Inverse by Gauss-Jordan elimination; requires unit pivots.

    `pivot_ok(a)` selects usable pivots (defaults to ring.is_unit); over
    Laurent-series coefficients pass a test that also bounds how much
    precision the pivot inverse burns.
    """
    R = m.ring
    n = m.nrows
    ok = pivot_ok or R.is_unit
    a = [list(row) for row in m.rows]
    inv = [list(row) for row in Mat.identity(R, n).rows]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if ok(a[r][col]):
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError(f"no unit pivot in column {col}")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        pi = R.inv(a[col][col])
        a[col] = [R.mul(pi, x) for x in a[col]]
        inv[col] = [R.mul(pi, x) for x in inv[col]]
        for r in range(n):
            if r != col and not R.is_zero(a[r][col]):
                f = a[r][col]
                a[r] = [R.sub(x, R.mul(f, y)) for x, y in zip(a[r], a[col])]
                inv[r] = [R.sub(x, R.mul(f, y)) for x, y in zip(inv[r], inv[col])]
    return Mat(R, inv)
