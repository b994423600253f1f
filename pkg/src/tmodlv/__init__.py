"""Exact arithmetic for special L-values of Drinfeld modules and
t-modules over F_q[t]: group-ring Laurent series, monic decompositions,
G-sizes, Euler products, nuclear determinants and the identity checkers
built on them, behind a small service and CLI."""

__version__ = "0.1.0"
