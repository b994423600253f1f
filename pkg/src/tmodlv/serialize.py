"""Canonical text forms and the small parsers the CLI needs.

Conventions: F_q elements print as F_p-polynomials in x (`x^2+2`),
A-elements as `t^3+2*t+1` with descending exponents, Laurent values as
`t^2 + 1 + 2*t^-1 + O(t^-5)`, group elements as `g(a1,...,ak)` and
group-ring elements as coefficient-tagged sums.  Parsers accept the same
shapes back (whitespace-insensitive).
"""

from __future__ import annotations

import re

from .ffield import FqField
from .grpring import GroupRing
from .laurent import Laurent
from .poly import ptrim


class ParseError(ValueError):
    pass


def parse_fq(field: FqField, text: str) -> int:
    """`x^2+2` style F_q element (plain integers for the prime field)."""
    text = text.replace(" ", "")
    if not text:
        raise ParseError("empty field element")
    digits = [0] * field.r
    for term in _split_terms(text):
        sign, body = term
        m = re.fullmatch(r"(\d+)?(?:\*?x(?:\^(\d+))?)?", body)
        if not m or (m.group(1) is None and "x" not in body):
            raise ParseError(f"bad field element term {body!r}")
        c = int(m.group(1)) if m.group(1) else 1
        e = 0 if "x" not in body else int(m.group(2) or 1)
        if e >= field.r:
            raise ParseError(f"exponent {e} exceeds field degree {field.r - 1}")
        digits[e] = (digits[e] + sign * c) % field.p
    return field._encode(digits)


def parse_apoly(field: FqField, text: str) -> tuple:
    """`t^3+2*t+1` style A-element; coefficients may be F_q expressions in
    parentheses."""
    text = text.replace(" ", "")
    if not text:
        raise ParseError("empty polynomial")
    coeffs: dict[int, int] = {}
    for sign, body in _split_terms(text):
        m = re.fullmatch(r"(?:\(([^()]*)\)|(\d+))?\*?(t(?:\^(\d+))?)?", body)
        if not m or (not m.group(1) and not m.group(2) and not m.group(3)):
            raise ParseError(f"bad polynomial term {body!r}")
        if m.group(1) is not None:
            c = parse_fq(field, m.group(1))
        elif m.group(2) is not None:
            c = field.from_int(int(m.group(2)))
        else:
            c = field.one
        e = 0
        if m.group(3):
            e = int(m.group(4) or 1)
        cur = coeffs.get(e, field.zero)
        c = field.mul(c, field.one) if sign > 0 else field.neg(c)
        coeffs[e] = field.add(cur, c)
    top = max(coeffs) if coeffs else 0
    return ptrim(field, [coeffs.get(e, field.zero) for e in range(top + 1)])


def parse_gr_laurent(gr: GroupRing, text: str) -> Laurent:
    """A polynomial-shaped value over the group ring, as a Laurent value in
    u = 1/t (negative t-exponents allowed): terms `coeff*t^e` where coeff
    is an integer, an F_q element in parens, or a group-ring sum in parens
    (`(1*g(0)+2*g(1))`)."""
    text = text.replace(" ", "")
    F = gr.field
    items: dict[int, tuple] = {}
    for sign, body in _split_terms(text):
        m = re.fullmatch(r"(?:\(([^()]*(?:\([^()]*\)[^()]*)*)\)|(\d+))?\*?(t(?:\^(-?\d+))?)?", body)
        if not m or (not m.group(1) and not m.group(2) and not m.group(3)):
            raise ParseError(f"bad term {body!r}")
        if m.group(1) is not None:
            c = _parse_gr_elem(gr, m.group(1))
        elif m.group(2) is not None:
            c = gr.from_int(int(m.group(2)))
        else:
            c = gr.one
        e = 0
        if m.group(3):
            e = int(m.group(4) or 1)
        if sign < 0:
            c = gr.neg(c)
        items[-e] = gr.add(items.get(-e, gr.zero), c)  # u-exponent = -t-exponent
    items = {e: c for e, c in items.items() if c != gr.zero}
    if not items:
        return Laurent.zero(gr)
    lo, hi = min(items), max(items)
    return Laurent(gr, lo, [items.get(e, gr.zero) for e in range(lo, hi + 1)])


def _parse_gr_elem(gr: GroupRing, text: str) -> tuple:
    if "g(" not in text:
        return gr.constant(parse_fq(gr.field, text))
    out = gr.zero
    for sign, body in _split_terms(text):
        m = re.fullmatch(r"(?:(\d+|\([^()]*\))\*?)?g\(([\d,]*)\)", body)
        if not m:
            raise ParseError(f"bad group-ring term {body!r}")
        cs = m.group(1)
        if cs is None:
            c = gr.field.one
        elif cs.startswith("("):
            c = parse_fq(gr.field, cs[1:-1])
        else:
            c = gr.field.from_int(int(cs))
        exps = tuple(int(x) for x in m.group(2).split(",") if x != "")
        if len(exps) != len(gr.group.orders):
            raise ParseError(f"group element {body!r} has wrong arity")
        g = tuple(e % n for e, n in zip(exps, gr.group.orders))
        term = gr.scale(c if sign > 0 else gr.field.neg(c), gr.basis_elem(g))
        out = gr.add(out, term)
    return out


def _split_terms(text: str):
    out = []
    depth = 0
    cur = ""
    sign = 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur:
            out.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif ch in "+-" and depth == 0 and not cur:
            sign = 1 if ch == "+" else (-sign if sign else -1)
            if ch == "-":
                sign = -1
        else:
            cur += ch
    if cur:
        out.append((sign, cur))
    if not out:
        raise ParseError("no terms")
    return out


def gr_poly_str(gr: GroupRing, poly: tuple) -> str:
    """Ascending t-coefficient tuple over the group ring, canonical text."""
    from .poly import poly_str

    return poly_str(gr, poly, "t")
