"""Dense univariate polynomials over exact rationals.

Coefficients are stored lowest degree first as `fractions.Fraction` values
with trailing zeros stripped; the zero polynomial has an empty tuple.  All
values are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .constants import ITERATE_DEGREE_CAP


def Q(x) -> Fraction:
    """Coerce ints / strings / Fractions to Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


class DegreeCapError(RuntimeError):
    """Raised when an operation would exceed a configured degree cap."""


class UniPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [Q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    # --- structure -----------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self) -> Fraction:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({format_poly(self)!r})"

    # --- ring operations -------------------------------------------------
    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    if cb:
                        out[i + j] += ca * cb
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative power")
        result = one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "UniPoly":
        return self * Q(c)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = 1 / self.lead
        return UniPoly([c * inv for c in self.coeffs])

    # --- evaluation / composition -----------------------------------------
    def __call__(self, x):
        """Horner evaluation; accepts Fraction/int/float/complex."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "UniPoly") -> "UniPoly":
        """self O inner by Horner over the polynomial ring."""
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + constant(c)
        return acc

    def iterate(self, k: int, degree_cap: int = ITERATE_DEGREE_CAP) -> "UniPoly":
        """k-fold self-composition; f^0 = X."""
        if k < 0:
            raise ValueError("iterate needs k >= 0")
        if not self.is_constant() and self.degree**k > degree_cap:
            raise DegreeCapError(
                f"deg(f)^k = {self.degree}^{k} exceeds cap {degree_cap}"
            )
        out = identity()
        for _ in range(k):
            out = self.compose(out)
        return out

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift(self, a) -> "UniPoly":
        """self(X + a)."""
        return self.compose(UniPoly([Q(a), 1]))

    # --- euclidean structure --------------------------------------------------
    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        dq = len(rem) - len(div)
        if dq < 0:
            return UniPoly(), self
        quot = [Fraction(0)] * (dq + 1)
        inv = 1 / other.lead
        for i in range(dq, -1, -1):
            c = rem[i + len(div) - 1] * inv
            quot[i] = c
            if c:
                for j, d in enumerate(div):
                    rem[i + j] -= c * d
        return UniPoly(quot), UniPoly(rem[: len(div) - 1])

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[0]

    def divides_exactly(self, other: "UniPoly") -> bool:
        """True iff self | other with zero remainder."""
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()


def constant(c) -> UniPoly:
    return UniPoly([Q(c)])


def zero() -> UniPoly:
    return UniPoly()


def one() -> UniPoly:
    return UniPoly([1])


def identity() -> UniPoly:
    """The polynomial X."""
    return UniPoly([0, 1])


def monomial(n: int, c=1) -> UniPoly:
    return UniPoly([0] * n + [Q(c)])


def compose(f: UniPoly, g: UniPoly) -> UniPoly:
    return f.compose(g)


def iterate(f: UniPoly, k: int, degree_cap: int = ITERATE_DEGREE_CAP) -> UniPoly:
    return f.iterate(k, degree_cap)


def derivative(f: UniPoly) -> UniPoly:
    return f.derivative()


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def squarefree_part(f: UniPoly) -> UniPoly:
    if f.is_constant():
        return f
    return (f // poly_gcd(f, f.derivative())).monic()


def resultant(a: UniPoly, b: UniPoly) -> Fraction:
    """Res(a, b) over Q through the Euclidean remainder sequence."""
    if a.is_zero() or b.is_zero():
        return Fraction(0)
    sign = 1
    result = Fraction(1)
    while True:
        da, db = a.degree, b.degree
        if db == 0:
            return sign * result * b.lead**da
        r = a % b
        if r.is_zero():
            return Fraction(0)
        result *= b.lead ** (da - r.degree)
        if da % 2 and db % 2:
            sign = -sign
        a, b = b, r


# --- integer clearings ------------------------------------------------------


@dataclass(frozen=True)
class IntPoly:
    """Primitive integer polynomial plus the content split off from it.

    ``content * primitive`` reproduces the original polynomial exactly; the
    content is a positive integer for integer input and a positive rational
    when denominators were cleared from a UniPoly.
    """

    coeffs: tuple[int, ...]
    content: Fraction = Fraction(1)

    def __post_init__(self):
        if self.coeffs and math.gcd(*[abs(c) for c in self.coeffs]) != 1:
            raise ValueError("IntPoly coefficients must be primitive")
        if self.content <= 0:
            raise ValueError("content must be positive")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    def to_unipoly(self, with_content: bool = False) -> UniPoly:
        p = UniPoly(self.coeffs)
        return p.scale(self.content) if with_content else p

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def int_poly(coeffs: Iterable[int]) -> IntPoly:
    """Primitive part + integer content of an integer-coefficient polynomial."""
    cs = [int(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValueError("zero polynomial has no primitive part")
    g = math.gcd(*[abs(c) for c in cs])
    return IntPoly(tuple(c // g for c in cs), Fraction(g))


def clear_denominators(f: UniPoly) -> IntPoly:
    """Primitive integer form of a nonzero rational polynomial."""
    if f.is_zero():
        raise ValueError("zero polynomial has no primitive part")
    lcm = 1
    for c in f.coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in f.coeffs]
    g = math.gcd(*[abs(c) for c in ints])
    return IntPoly(tuple(c // g for c in ints), Fraction(g, lcm))


def eisenstein(q: IntPoly, p: int) -> bool:
    """Eisenstein criterion at p on the primitive part."""
    if q.degree < 1:
        raise ValueError("eisenstein needs a nonconstant polynomial")
    if q.lead % p == 0:
        return False
    if any(c % p for c in q.coeffs[:-1]):
        return False
    return q.coeffs[0] % (p * p) != 0


# --- characteristic polynomial / pushforward --------------------------------


def _charpoly_hessenberg(m: list[list[Fraction]]) -> UniPoly:
    """Characteristic polynomial det(xI - M) via Hessenberg reduction."""
    n = len(m)
    h = [row[:] for row in m]
    for k in range(1, n - 1):
        pivot = None
        for i in range(k, n):
            if h[i][k - 1]:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != k:
            h[pivot], h[k] = h[k], h[pivot]
            for row in h:
                row[pivot], row[k] = row[k], row[pivot]
        inv = 1 / h[k][k - 1]
        for i in range(k + 1, n):
            t = h[i][k - 1] * inv
            if t:
                for j in range(k - 1, n):
                    h[i][j] -= t * h[k][j]
                for row in h:
                    row[k] += t * row[i]
    # Cohen alg. 2.2.4: p_m = (x - h[m][m]) p_{m-1} - sum_i h[i][m] prod h[j][j-1] p_{i-1}
    polys = [one()]
    for mi in range(1, n + 1):
        p = UniPoly([-h[mi - 1][mi - 1], 1]) * polys[mi - 1]
        prod = Fraction(1)
        for i in range(mi - 1, 0, -1):
            prod *= h[i][i - 1]
            c = h[i - 1][mi - 1] * prod
            if c:
                p = p - polys[i - 1] * c
        polys.append(p)
    return polys[n]


def pushforward_by(q: UniPoly, g: UniPoly) -> UniPoly:
    """Monic polynomial whose roots (with multiplicity) are g(alpha) over
    the roots alpha of q: the characteristic polynomial of multiplication
    by g on Q[y]/(q), equal to Res_y(q(y), x - g(y)) up to a scalar."""
    if q.is_zero() or q.is_constant():
        raise ValueError("pushforward needs deg q >= 1")
    qm = q.monic()
    n = qm.degree
    gr = g % qm
    cols = []
    # columns of the multiplication-by-g matrix in the basis 1, y, .., y^(n-1)
    basis = one()
    for j in range(n):
        col = (gr * basis) % qm
        cols.append([col.coeff(i) for i in range(n)])
        basis = UniPoly([0] + list(basis.coeffs))
    matrix = [[cols[j][i] for j in range(n)] for i in range(n)]
    return _charpoly_hessenberg(matrix)


def pushforward(
    q: UniPoly, f: UniPoly, n_steps: int, degree_cap: int | None = None
) -> UniPoly:
    """Roots of the result are f^N(alpha) over roots alpha of q.

    f^N is reduced modulo q at every step so the intermediate degree never
    exceeds deg q * deg f.
    """
    from .constants import PUSHFORWARD_DEGREE_CAP

    cap = PUSHFORWARD_DEGREE_CAP if degree_cap is None else degree_cap
    if q.is_zero():
        raise ValueError("pushforward needs a nonzero q")
    if q.degree > cap:
        raise DegreeCapError(f"deg q = {q.degree} exceeds cap {cap}")
    if n_steps < 0:
        raise ValueError("pushforward needs N >= 0")
    if q.degree == 0:
        raise ValueError("pushforward needs deg q >= 1")
    qm = q.monic()
    g = identity() % qm
    for _ in range(n_steps):
        g = f.compose(g) % qm
    return pushforward_by(qm, g)


# --- compositional (de)composition ------------------------------------------


def decompose(f: UniPoly, e: int) -> Optional[tuple[UniPoly, UniPoly]]:
    """Find f = u O v with deg v = e, v monic and v(0) = 0.

    The normalization pins down the affine ambiguity, so the output is
    deterministic; returns None when no such decomposition exists.
    """
    d = f.degree
    if not (2 <= e < d) or d % e != 0:
        raise ValueError(f"need 2 <= e < deg f and e | deg f (e={e}, deg={d})")
    k = d // e
    lc = f.lead
    v_coeffs = [Fraction(0)] * e + [Fraction(1)]  # X^e, constant term stays 0
    for j in range(1, e):
        v = UniPoly(v_coeffs)
        w = v**k * lc
        delta = f.coeff(d - j) - w.coeff(d - j)
        v_coeffs[e - j] = delta / (lc * k)
    v = UniPoly(v_coeffs)
    u = compose_right_divide(f, v)
    if u is None:
        return None
    return u, v


def compose_right_divide(a: UniPoly, v: UniPoly) -> Optional[UniPoly]:
    """Solve u O v = a for the outer factor u, given the inner v."""
    if v.is_constant():
        return None
    if a.is_constant():
        return None
    if a.degree % v.degree != 0:
        return None
    k = a.degree // v.degree
    lv = v.lead
    rem = a
    u_coeffs = [Fraction(0)] * (k + 1)
    for j in range(k, -1, -1):
        c = rem.coeff(v.degree * j) / lv**j
        u_coeffs[j] = c
        if c:
            rem = rem - v**j * c
    return UniPoly(u_coeffs) if rem.is_zero() else None


def _int_nth_root(m: int, n: int) -> int:
    """Floor of the n-th root of m >= 0 (exact integer Newton)."""
    if m < 2:
        return m
    x = 1 << ((m.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + m // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def _rational_nth_roots(r: Fraction, n: int) -> list[Fraction]:
    """All rational x with x^n = r."""
    if n <= 0:
        raise ValueError("n must be positive")
    if r == 0:
        return [Fraction(0)]
    if r < 0 and n % 2 == 0:
        return []
    num, den = abs(r.numerator), r.denominator
    rn = _int_nth_root(num, n)
    rd = _int_nth_root(den, n)
    if rn**n != num or rd**n != den:
        return []
    base = Fraction(rn, rd)
    if r < 0:
        return [-base]
    return [base, -base] if n % 2 == 0 else [base]


def compose_left_divide(a: UniPoly, w: UniPoly) -> Optional[UniPoly]:
    """Solve w O v = a for the inner factor v, given the outer w."""
    if w.is_constant() or a.is_constant():
        return None
    if a.degree % w.degree != 0:
        return None
    dv = a.degree // w.degree
    dw = w.degree
    for b_top in _rational_nth_roots(a.lead / w.lead, dw):
        v_coeffs = [Fraction(0)] * dv + [b_top]
        mult = dw * w.lead * b_top ** (dw - 1)
        ok = True
        for t in range(1, dv + 1):
            v = UniPoly(v_coeffs)
            cur = w.compose(v)
            delta = a.coeff(a.degree - t) - cur.coeff(a.degree - t)
            v_coeffs[dv - t] += delta / mult
        v = UniPoly(v_coeffs)
        if w.compose(v) == a:
            return v
    return None


# --- large-number helpers -----------------------------------------------------


def log_int(n: int) -> float:
    """Natural log of |n| for arbitrarily large integers (n != 0)."""
    n = abs(n)
    if n == 0:
        raise ValueError("log of zero")
    bits = n.bit_length()
    if bits <= 900:
        return math.log(n)
    shift = bits - 53
    return math.log(n >> shift) + shift * math.log(2)


def coefficient_height(q: IntPoly) -> float:
    """max log|c| over the primitive integer coefficients (affine height)."""
    return max(log_int(c) for c in q.coeffs if c != 0)


# --- text form ------------------------------------------------------------------


class PolyParseError(ValueError):
    """Parse failure; carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(f: UniPoly, var: str = "x") -> str:
    """Canonical text: monomials in decreasing degree with explicit signs."""
    if f.is_zero():
        return "0"
    parts = []
    for i in range(f.degree, -1, -1):
        c = f.coeff(i)
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = _format_coeff(mag)
        else:
            xpow = var if i == 1 else f"{var}^{i}"
            body = xpow if mag == 1 else f"{_format_coeff(mag)}*{xpow}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise PolyParseError("expected an integer", start)
        return int(self.text[start : self.pos])

    def expect(self, ch: str):
        if self.peek() != ch:
            raise PolyParseError(f"expected {ch!r}", self.pos)
        self.pos += 1


def parse_poly(text: str, var: str = "x") -> UniPoly:
    """Parse `2*x^3 - 1/2*x + 1` style text into a UniPoly."""
    toks = _Tokens(text)
    coeffs: dict[int, Fraction] = {}
    first = True
    while True:
        ch = toks.peek()
        if ch == "":
            if first:
                raise PolyParseError("empty polynomial", toks.pos)
            break
        sign = 1
        if ch in "+-":
            toks.pos += 1
            sign = -1 if ch == "-" else 1
        elif not first:
            raise PolyParseError("expected '+' or '-'", toks.pos)
        coef, power = _parse_term(toks, var)
        coeffs[power] = coeffs.get(power, Fraction(0)) + sign * coef
        first = False
    out = [Fraction(0)] * (max(coeffs, default=0) + 1)
    for power, c in coeffs.items():
        out[power] = c
    return UniPoly(out)


def _parse_term(toks: _Tokens, var: str) -> tuple[Fraction, int]:
    ch = toks.peek()
    coef = Fraction(1)
    have_coef = False
    if ch.isdigit():
        num = toks.take_int()
        den = 1
        if toks.peek() == "/":
            toks.pos += 1
            den = toks.take_int()
            if den == 0:
                raise PolyParseError("zero denominator", toks.pos)
        coef = Fraction(num, den)
        have_coef = True
        if toks.peek() == "*":
            toks.pos += 1
        elif toks.peek() != var:
            return coef, 0
    if toks.peek() == var:
        toks.pos += 1
        power = 1
        if toks.peek() == "^":
            toks.pos += 1
            power = toks.take_int()
        return coef, power
    if have_coef:
        return coef, 0
    raise PolyParseError(f"expected a coefficient or {var!r}", toks.pos)
