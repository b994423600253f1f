"""Smith normal form over the PID A = F_q[t], tracking the left
transform and its inverse (the right transform is not needed: cokernel
coordinates only use row operations)."""

from __future__ import annotations

from .matrix import Mat
from .poly import PolyRing, pdeg, pdivmod, pscale


def smith_normal_form(m: Mat) -> tuple[list, Mat, Mat]:
    """Return (diag, U, Uinv) with U m W = diag(diag) for some unimodular
    W, U unimodular and Uinv its inverse.  diag entries are canonical:
    zero or monic."""
    A: PolyRing = m.ring
    F = A.coeff
    K = m.nrows
    if K != m.ncols:
        raise ValueError("smith form implemented for square matrices only")
    a = [list(row) for row in m.rows]
    U = [list(r) for r in Mat.identity(A, K).rows]
    Ui = [list(r) for r in Mat.identity(A, K).rows]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]

    def row_sub(i, j, f):
        # row_i -= f * row_j ; Uinv col_j += f * col_i
        a[i] = [A.sub(x, A.mul(f, y)) for x, y in zip(a[i], a[j])]
        U[i] = [A.sub(x, A.mul(f, y)) for x, y in zip(U[i], U[j])]
        for r in Ui:
            r[j] = A.add(r[j], A.mul(f, r[i]))

    def col_sub(i, j, f):
        # col_i -= f * col_j (untracked)
        for r in a:
            r[i] = A.sub(r[i], A.mul(f, r[j]))

    def row_scale(i, c):
        a[i] = [pscale(F, c, x) for x in a[i]]
        U[i] = [pscale(F, c, x) for x in U[i]]
        ci = F.inv(c)
        for r in Ui:
            r[i] = pscale(F, ci, r[i])

    for k in range(K):
        while True:
            # minimal-degree nonzero pivot in the trailing block
            best = None
            for i in range(k, K):
                for j in range(k, K):
                    if a[i][j] and (best is None or pdeg(a[i][j]) < pdeg(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            bi, bj = best
            if bi != k:
                row_swap(k, bi)
            if bj != k:
                col_swap(k, bj)
            piv = a[k][k]
            dirty = False
            for i in range(k + 1, K):
                if a[i][k]:
                    q, _ = pdivmod(F, a[i][k], piv)
                    row_sub(i, k, q)
                    if a[i][k]:
                        dirty = True
            for j in range(k + 1, K):
                if a[k][j]:
                    q, _ = pdivmod(F, a[k][j], piv)
                    col_sub(j, k, q)
                    if a[k][j]:
                        dirty = True
            if not dirty:
                break
        if a[k][k] and not F.is_unit(a[k][k][-1]):
            raise ArithmeticError("pivot lost monic normalization")
        if a[k][k]:
            lead = a[k][k][-1]
            if lead != F.one:
                row_scale(k, F.inv(lead))
    diag = [a[i][i] for i in range(K)]
    return diag, Mat(A, U), Mat(A, Ui)
