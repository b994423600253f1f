"""Finite abelian groups as products of cyclic factors.

Elements are exponent tuples; the group knows how to split itself as
P x Delta (p-part times prime-to-p part) via CRT on each factor, which
is the decomposition monicity and the character theory run on.
"""

from __future__ import annotations

import itertools
from math import gcd


class GroupSpec:
    def __init__(self, orders: tuple[int, ...]):
        orders = tuple(int(n) for n in orders if int(n) > 1)
        self.orders = orders
        self.order = 1
        for n in orders:
            self.order *= n
        self.identity = tuple(0 for _ in orders)

    @property
    def exponent(self) -> int:
        e = 1
        for n in self.orders:
            e = e * n // gcd(e, n)
        return e

    def elements(self):
        return itertools.product(*(range(n) for n in self.orders))

    def mul(self, a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def inv(self, a):
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def pow(self, a, k: int):
        return tuple((x * k) % n for x, n in zip(a, self.orders))

    def el_str(self, a) -> str:
        return "g(" + ",".join(str(x) for x in a) + ")"

    def is_trivial(self) -> bool:
        return self.order == 1

    def sylow_split(self, p: int) -> "SylowSplit":
        return SylowSplit(self, p)

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and other.orders == self.orders

    def __hash__(self):
        return hash(("GroupSpec", self.orders))

    def __repr__(self):
        if not self.orders:
            return "1"
        return " x ".join(f"Z/{n}" for n in self.orders)


class SylowSplit:
    """G = P x Delta for a fixed prime p.

    Each cyclic factor Z/n with n = p^a * m splits by CRT; an element maps
    to its residues mod p^a and mod m, and back by the precomputed CRT
    coefficients.  Factors equal to 1 are dropped from P and Delta, and
    index maps remember where each surviving factor came from.
    """

    def __init__(self, group: GroupSpec, p: int):
        self.group = group
        self.p = p
        p_orders, d_orders = [], []
        self._parts = []  # per original factor: (p_power, coprime, idx_in_P, idx_in_D)
        for n in group.orders:
            pa = 1
            while n % p == 0:
                pa *= p
                n //= p
            m = n
            pi = di = None
            if pa > 1:
                pi = len(p_orders)
                p_orders.append(pa)
            if m > 1:
                di = len(d_orders)
                d_orders.append(m)
            self._parts.append((pa, m, pi, di))
        self.P = GroupSpec(tuple(p_orders))
        self.Delta = GroupSpec(tuple(d_orders))

    def project(self, g) -> tuple[tuple, tuple]:
        """g -> (g_P, g_Delta)."""
        gp, gd = [], []
        for x, (pa, m, pi, di) in zip(g, self._parts):
            if pi is not None:
                gp.append(x % pa)
            if di is not None:
                gd.append(x % m)
        return tuple(gp), tuple(gd)

    def combine(self, gp, gd) -> tuple:
        """(g_P, g_Delta) -> g by CRT on each factor."""
        out = []
        for i, (pa, m, pi, di) in enumerate(self._parts):
            a = gp[pi] if pi is not None else 0
            b = gd[di] if di is not None else 0
            n = pa * m
            if pa == 1:
                out.append(b % n)
            elif m == 1:
                out.append(a % n)
            else:
                # x = a mod pa, x = b mod m
                inv = pow(m, -1, pa)
                x = (b + m * ((a - b) * inv % pa)) % n
                out.append(x)
        return tuple(out)
