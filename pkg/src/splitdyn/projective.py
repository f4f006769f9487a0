"""Points of P^1(Q): a Fraction or the infinity sentinel.

Nonconstant polynomial maps send INFINITY to INFINITY; no other arithmetic
on the sentinel is defined.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("splitdyn-infinity")


INFINITY = _Infinity()

ProjPoint = Union[Fraction, _Infinity]


def is_infinity(x) -> bool:
    return x is INFINITY


def parse_point(text: str) -> ProjPoint:
    text = text.strip()
    if text in ("inf", "Inf", "oo", "infinity"):
        return INFINITY
    return Fraction(text)


def format_point(x: ProjPoint) -> str:
    return "inf" if is_infinity(x) else str(x)


def apply_poly(f, x: ProjPoint) -> ProjPoint:
    """Evaluate a nonconstant polynomial on P^1(Q)."""
    if is_infinity(x):
        return INFINITY
    return f(x)
