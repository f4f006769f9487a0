"""Weil and canonical heights on P^1(Q), with certified error bounds.

The escape constant C_f bounds |h(f(x)) - d h(x)| for every point x.  It is
assembled place by place (one archimedean term plus one term per prime
dividing the denominator or the leading coefficient of f), so the same
constant remains valid for algebraic points over any number field: f has
rational coefficients and the normalized local norms above a rational place
sum to the rational contribution.  That fact is what lets the classifier
chase critical orbits through irrational critical points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .constants import (
    CANONICAL_DIGIT_CAP,
    DEFAULT_TARGET_ERROR,
    MAHLER_NUMERIC_SLACK,
)
from .intfactor import factor_integer
from .mahler import mahler
from .polynomials import (
    IntPoly,
    UniPoly,
    clear_denominators,
    log_int,
    pushforward,
)
from .projective import ProjPoint, is_infinity


def weil_height(x: ProjPoint) -> float:
    """Absolute logarithmic Weil height; h(infinity) = h(0) = 0."""
    if is_infinity(x):
        return 0.0
    x = Fraction(x)
    if x == 0:
        return 0.0
    return log_int(max(abs(x.numerator), x.denominator))


def height_tuple(point: tuple[ProjPoint, ...]) -> float:
    """Height on (P^1)^n: the sum of the coordinate heights."""
    return sum(weil_height(c) for c in point)


def _bad_primes(lam: int, lead: int) -> list[int]:
    seen = set()
    for n in (lam, abs(lead)):
        if n > 1:
            fac = factor_integer(n)
            seen.update(fac.factors)
            if not fac.complete:  # pragma: no cover - needs a 40+ digit lead
                raise RuntimeError("could not factor coefficient data of f")
    return sorted(seen)


def escape_constant(f: UniPoly) -> float:
    """Explicit C_f with |h(f(x)) - d h(x)| <= C_f on P^1(Qbar) - {infinity}.

    Write f = (sum c_i X^i) / lam with integers c_i, lam >= 1 and
    gcd(content, lam) = 1.  Then:

    upper bound:  h(f(x)) <= d h(x) + log(d+1) + log max(max|c_i|, lam)
      - archimedean triangle inequality plus, at each prime, the ultrametric
        bound ||f(x)|| <= max||c_i/lam|| max(1, ||x||)^d; the coefficient
        contributions sum to log max(max|c_i|, lam).

    lower bound:  h(f(x)) >= d h(x) - c_arch - sum_{p | lam c_d} c_p
      - at the archimedean place, once |x| > B = max(1, 2d max|c_i|/|c_d|)
        the leading term dominates: |f(x)| >= (|c_d|/2lam)|x|^d; smaller |x|
        contribute at most d log B.  So c_arch = max(d log B, log+ 2lam/|c_d|).
      - at p | lam c_d with l = ||c_d/lam||_p, m = max||c_i/lam||_p: once
        ||x|| > max(1, m/l) the lead strictly dominates and ||f(x)|| =
        l ||x||^d; hence c_p = max(d log max(1, m/l), log+ 1/l).
      - all other places contribute nothing: every coefficient is integral
        and the lead is a unit, so ||f(x)|| = ||x||^d when ||x|| > 1.

    For f = +-X^d both bounds are exact and C_f = 0.
    """
    d = f.degree
    if d < 1:
        raise ValueError("escape constant needs deg f >= 1")
    if all(c == 0 for c in f.coeffs[:-1]) and abs(f.lead) == 1:
        return 0.0

    prim = clear_denominators(f)
    lam = int(prim.content.denominator)
    cs = [c * prim.content.numerator for c in prim.coeffs]
    lead = cs[-1]
    maxc = max(abs(c) for c in cs)

    upper = math.log(d + 1) + math.log(max(maxc, lam))

    b_arch = max(1.0, 2 * d * maxc / abs(lead))
    c_arch = max(d * math.log(b_arch), max(0.0, math.log(2 * lam / abs(lead))))
    lower = c_arch
    for p in _bad_primes(lam, lead):
        vp_lam = _int_vp(lam, p)
        norms = [p ** (vp_lam - _int_vp(c, p)) if c else 0.0 for c in cs]
        ell = norms[-1]
        m = max(norms)
        b_p = max(1.0, m / ell)
        lower += max(d * math.log(b_p), max(0.0, math.log(1 / ell)))
    return max(upper, lower)


def _int_vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("vp(0) undefined here")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def escape_bound(f: UniPoly) -> float:
    """Height threshold E with h(x) > E  =>  h(f(x)) > h(x) (growth by d-1).

    E = C_f/(d-1) + 1: beyond it h(f(x)) >= d h(x) - C_f >= h(x) + (d-1).
    """
    return escape_constant(f) / (f.degree - 1) + 1.0


@dataclass(frozen=True)
class CanonicalEstimate:
    value: float
    error_bound: float
    n_used: int


class PrecisionOverflowError(RuntimeError):
    """Exact iteration would exceed the digit budget."""

    def __init__(self, message: str, suggested_n: int, suggested_error: float):
        super().__init__(message)
        self.suggested_n = suggested_n
        self.suggested_error = suggested_error


def canonical_height(
    ds, alpha: Fraction, target_error: float = DEFAULT_TARGET_ERROR
) -> CanonicalEstimate:
    """Estimate of the f-canonical height of a rational point.

    value = h(f^N(alpha)) / d^N with the telescoping error C_f/(d^N (d-1));
    preperiodic points return exactly 0.
    """
    from .dynsys import as_polyds, is_preperiodic_rational

    ds = as_polyds(ds)
    if target_error <= 0:
        raise ValueError("target_error must be positive")
    if is_preperiodic_rational(ds, alpha).preperiodic:
        return CanonicalEstimate(0.0, 0.0, 0)
    f, d = ds.f, ds.d
    c_f = ds.escape_constant
    n = 0
    while c_f / (d**n * (d - 1)) > target_error:
        n += 1
    digits = d**n * (weil_height(alpha) + c_f / (d - 1) + 1) / math.log(10)
    if digits > CANONICAL_DIGIT_CAP:
        ok_n = n
        while ok_n > 0 and d**ok_n * (weil_height(alpha) + c_f / (d - 1) + 1) / math.log(10) > CANONICAL_DIGIT_CAP:
            ok_n -= 1
        raise PrecisionOverflowError(
            f"iterate would reach ~{digits:.0f} digits; retry with N <= {ok_n}",
            ok_n,
            c_f / (d**ok_n * (d - 1)) if ok_n else math.inf,
        )
    x = Fraction(alpha)
    for _ in range(n):
        x = f(x)
    error = c_f / (d**n * (d - 1))
    return CanonicalEstimate(weil_height(x) / d**n, error, n)


def factor_canonical_height(ds, q: IntPoly, n_steps: int, seed: int = 0) -> CanonicalEstimate:
    """Common canonical height of the roots of an irreducible q.

    Pushes q forward N steps, then reads the total height of the image roots
    off the Mahler measure of the primitive integer form; conjugate points
    share the value.  The caller guarantees irreducibility.
    """
    from .dynsys import as_polyds

    ds = as_polyds(ds)
    f, d = ds.f, ds.d
    image = pushforward(q.to_unipoly(), f, n_steps)
    measure = mahler(clear_denominators(image), seed).measure
    value = measure / (q.degree * d**n_steps)
    error = ds.escape_constant / (d**n_steps * (d - 1)) + MAHLER_NUMERIC_SLACK
    return CanonicalEstimate(value, error, n_steps)


def symmetry_height_audit(
    ds, symmetry: UniPoly, samples, target_error: float = DEFAULT_TARGET_ERROR
) -> float:
    """Max |h^(L(a)) - h^(a)| over the samples; L a commuting affine map."""
    worst = 0.0
    for alpha in samples:
        alpha = Fraction(alpha)
        direct = canonical_height(ds, alpha, target_error)
        moved = canonical_height(ds, symmetry(alpha), target_error)
        worst = max(worst, abs(direct.value - moved.value))
    return worst
