"""Exact factorization of rational polynomials into irreducibles.

Pipeline: Yun squarefree decomposition over Q, then per squarefree part a
Zassenhaus round: factor modulo a good small prime, Hensel-lift the factors
past the Landau-Mignotte coefficient bound, and recombine subsets by exact
trial division over Z.  No numeric steps anywhere.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .constants import FACTOR_DEGREE_CAP
from .intfactor import primes_up_to
from .polynomials import (
    DegreeCapError,
    IntPoly,
    UniPoly,
    clear_denominators,
    int_poly,
    poly_gcd,
)

# --- dense GF(p) arithmetic (lists of ints, lowest degree first) -------------


def _gf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _gf_trim(out)


def _gf_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError
    a = a[:]
    inv = pow(b[-1], -1, p)
    dq = len(a) - len(b)
    if dq < 0:
        return [], _gf_trim(a)
    q = [0] * (dq + 1)
    for i in range(dq, -1, -1):
        c = a[i + len(b) - 1] * inv % p
        q[i] = c
        if c:
            for j, d in enumerate(b):
                a[i + j] = (a[i + j] - c * d) % p
    return _gf_trim(q), _gf_trim(a[: len(b) - 1])


def _gf_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        a, b = b, _gf_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _gf_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _gf_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _gf_divmod(_gf_mul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = _gf_divmod(_gf_mul(base, base, p), mod, p)[1]
    return result


def _gf_deriv(a: list[int], p: int) -> list[int]:
    return _gf_trim([i * c % p for i, c in enumerate(a)][1:])


def _gf_monic(a: list[int], p: int) -> list[int]:
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _distinct_degree(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Split monic squarefree f into products of irreducibles of equal degree."""
    out = []
    h = [0, 1]  # X
    k = 0
    f = f[:]
    while len(f) - 1 >= 2 * (k + 1):
        k += 1
        h = _gf_powmod(h, p, f, p)
        diff = h[:]
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        g = _gf_gcd(f, _gf_trim(diff), p)
        if len(g) > 1:
            out.append((g, k))
            f = _gf_divmod(f, g, p)[0]
            h = _gf_divmod(h, f, p)[1]
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _equal_degree_split(f: list[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    """Cantor-Zassenhaus splitting of a product of degree-d irreducibles (p odd)."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = _gf_trim([rng.randrange(p) for _ in range(n)] + [1])
        if len(a) < 2:
            continue
        g = _gf_gcd(f, a, p)
        if not 1 < len(g) < len(f):
            b = _gf_powmod(a, (p**d - 1) // 2, f, p)
            b = b[:] if b else [0]
            b[0] = (b[0] - 1) % p
            g = _gf_gcd(f, _gf_trim(b), p)
        if 1 < len(g) < len(f):
            rest = _gf_divmod(f, g, p)[0]
            return _equal_degree_split(g, d, p, rng) + _equal_degree_split(rest, d, p, rng)


def _factor_mod_p(f: list[int], p: int, rng: random.Random) -> list[list[int]]:
    """Monic irreducible factors of monic squarefree f mod p."""
    out = []
    for part, d in _distinct_degree(f, p):
        out.extend(_equal_degree_split(part, d, p, rng))
    return sorted(out)


# --- Hensel lifting ----------------------------------------------------------


def _poly_mul_mod(a: list[int], b: list[int], m: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % m
    return _gf_trim(out)


def _poly_sub_mod(a: list[int], b: list[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)]
    return _gf_trim(out)


def _poly_add_mod(a: list[int], b: list[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)]
    return _gf_trim(out)


def _hensel_pair(
    f: list[int], g: list[int], h: list[int], s: list[int], t: list[int], p: int, k: int
) -> tuple[list[int], list[int]]:
    """Quadratically lift f = g*h (mod p), s*g + t*h = 1 (mod p) to mod p^k.

    g stays monic throughout (von zur Gathen & Gerhard alg. 15.10).
    """
    m = p
    target = p**k
    while m < target:
        m2 = min(m * m, target)  # f is only known mod p^k
        # e = (te)h + (se)g mod m^2, so the g-correction is (te rem g)
        e = _poly_sub_mod(f, _poly_mul_mod(g, h, m2), m2)
        _, r = _gf_divmod_ring(_poly_mul_mod(t, e, m2), g, m2)
        g1 = _poly_add_mod(g, r, m2)
        # recompute the cofactor by exact monic division: unique mod m2 and
        # keeps deg h correct (additive update formulas let junk terms leak in)
        h1, rem = _gf_divmod_ring([c % m2 for c in f], g1, m2)
        assert not rem, "Hensel invariant broken: f not divisible by lifted factor"
        # refresh Bezout: delta_s = (sb rem h1), delta_t = tb + (sb div h1) g1
        b = _poly_sub_mod(
            _poly_add_mod(_poly_mul_mod(s, g1, m2), _poly_mul_mod(t, h1, m2), m2), [1], m2
        )
        cq, cr = _gf_divmod_ring(_poly_mul_mod(s, b, m2), h1, m2)
        s1 = _poly_sub_mod(s, cr, m2)
        t1 = _poly_sub_mod(
            t, _poly_add_mod(_poly_mul_mod(t, b, m2), _poly_mul_mod(cq, g1, m2), m2), m2
        )
        g, h, s, t = g1, h1, s1, t1
        m = m2
    return [c % target for c in g], [c % target for c in h]


def _gf_divmod_ring(a: list[int], b: list[int], m: int) -> tuple[list[int], list[int]]:
    """Division in (Z/m)[X] valid because b is monic."""
    assert b and b[-1] == 1, "ring division needs a monic divisor"
    a = a[:]
    dq = len(a) - len(b)
    if dq < 0:
        return [], _gf_trim(a)
    q = [0] * (dq + 1)
    for i in range(dq, -1, -1):
        c = a[i + len(b) - 1] % m
        q[i] = c
        if c:
            for j, d in enumerate(b):
                a[i + j] = (a[i + j] - c * d) % m
    return _gf_trim(q), _gf_trim(a[: len(b) - 1])


def _gf_ext_euclid(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    """s, t with s*a + t*b = 1 mod p for coprime a, b."""
    r0, r1 = a[:], b[:]
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _gf_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub_mod(s0, _gf_mul(q, s1, p), p)
        t0, t1 = t1, _poly_sub_mod(t0, _gf_mul(q, t1, p), p)
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0], [c * inv % p for c in t0]


def _hensel_tree(f: list[int], parts: list[list[int]], p: int, k: int) -> list[list[int]]:
    """Lift the coprime monic factorization f = prod(parts) mod p to p^k."""
    if len(parts) == 1:
        return [[c % p**k for c in f]]
    mid = len(parts) // 2
    g = [1]
    for fac in parts[:mid]:
        g = _gf_mul(g, fac, p)
    h = [1]
    for fac in parts[mid:]:
        h = _gf_mul(h, fac, p)
    s, t = _gf_ext_euclid(g, h, p)
    g_lift, h_lift = _hensel_pair(f, g, h, s, t, p, k)
    return _hensel_tree(g_lift, parts[:mid], p, k) + _hensel_tree(
        h_lift, parts[mid:], p, k
    )


# --- Zassenhaus driver --------------------------------------------------------


def _mignotte_exponent(f: IntPoly, p: int) -> int:
    """k with p^k > 2 * Landau-Mignotte bound for factors of f."""
    n = f.degree
    norm2_sq = sum(c * c for c in f.coeffs)
    bound = (math.isqrt(norm2_sq) + 1) * 2**n * abs(f.lead)
    k = 1
    pk = p
    while pk <= 2 * bound:
        pk *= p
        k += 1
    return k


def _symmetric(c: int, m: int) -> int:
    c %= m
    return c - m if c > m // 2 else c


def _zassenhaus_squarefree(f: IntPoly) -> list[IntPoly]:
    """Irreducible integer factors of a primitive squarefree f, deg >= 1."""
    if f.degree == 1:
        return [f]
    rng = random.Random(0x5EED ^ f.degree)
    fu = f.to_unipoly()
    for p in primes_up_to(2000)[1:]:  # odd primes
        if f.lead % p == 0:
            continue
        fp = _gf_monic([c % p for c in f.coeffs], p)
        if len(_gf_gcd(fp, _gf_deriv(fp, p), p)) == 1:
            break
    else:  # pragma: no cover - would need >300 ramified primes
        raise RuntimeError("no good prime below 2000")

    modular = _factor_mod_p(fp, p, rng)
    if len(modular) == 1:
        return [f]
    k = _mignotte_exponent(f, p)
    pk = p**k
    lifted = _hensel_tree(_gf_monic([c % pk for c in f.coeffs], pk), modular, p, k)

    result: list[IntPoly] = []
    remaining = fu
    pool = list(range(len(lifted)))
    size = 1
    while 2 * size <= len(pool):
        found = True
        while found and 2 * size <= len(pool):
            found = False
            for subset in _subsets(pool, size):
                cand = [remaining.lead.numerator % pk]
                for idx in subset:
                    cand = _poly_mul_mod(cand, lifted[idx], pk)
                cand_int = [_symmetric(c, pk) for c in cand]
                try:
                    g = int_poly(cand_int)
                except ValueError:
                    continue
                gu = g.to_unipoly()
                if gu.divides_exactly(remaining):
                    result.append(_positive_lead(g))
                    remaining = remaining // gu
                    pool = [i for i in pool if i not in subset]
                    found = True
                    break
        size += 1
    if remaining.degree >= 1:
        result.append(_positive_lead(clear_denominators(remaining)))
    return result


def _subsets(pool: list[int], size: int):
    import itertools

    return itertools.combinations(pool, size)


def _positive_lead(g: IntPoly) -> IntPoly:
    if g.lead < 0:
        return IntPoly(tuple(-c for c in g.coeffs), g.content)
    return g


def squarefree_decomposition(f: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: f (up to constant) = prod f_i^i with f_i squarefree."""
    out = []
    a = f.monic()
    d = a.derivative()
    g = poly_gcd(a, d)
    c = a // g
    w = d // g - c.derivative()
    i = 1
    while not c.is_constant():
        y = poly_gcd(c, w)
        if not y.is_constant():
            out.append((y, i))
        c = c // y
        w = w // y - c.derivative()
        i += 1
    return out


def factor_poly(f: UniPoly) -> tuple[Fraction, list[tuple[IntPoly, int]]]:
    """Factor nonzero f over Q: returns (content, [(irreducible, multiplicity)]).

    content * prod(factor^multiplicity) == f exactly; factors are primitive
    integer polynomials with positive leading coefficients.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if f.degree > FACTOR_DEGREE_CAP:
        raise DegreeCapError(f"degree {f.degree} exceeds cap {FACTOR_DEGREE_CAP}")
    if f.is_constant():
        return f.coeff(0), []

    factors: list[tuple[IntPoly, int]] = []
    for part, mult in squarefree_decomposition(f):
        prim = clear_denominators(part)
        for irr in sorted(
            _zassenhaus_squarefree(_positive_lead(IntPoly(prim.coeffs))),
            key=lambda g: (g.degree, g.coeffs),
        ):
            factors.append((IntPoly(irr.coeffs), mult))

    content = f.lead
    for g, mult in factors:
        content /= Fraction(g.lead) ** mult
    return content, factors


def is_irreducible(f: UniPoly) -> bool:
    if f.degree < 1:
        return False
    _, factors = factor_poly(f)
    return len(factors) == 1 and factors[0][1] == 1


def rational_roots(f: UniPoly) -> list[Fraction]:
    """All rational roots, with multiplicity."""
    _, factors = factor_poly(f)
    out = []
    for g, mult in factors:
        if g.degree == 1:
            out.extend([Fraction(-g.coeffs[0], g.coeffs[1])] * mult)
    return sorted(out)
