"""p-adic machinery: valuations, good-prime screening, orbits mod p^m,
Hasse certificates, etale-along-orbit checks, and primitive prime searches.

Soundness contract of a certificate (p, m): at a good prime every point of
the p-adic closure of the orbit is p-integral and reduces mod p^m into the
finite residue set enumerated here, while every p-integral point of V(Q_p)
reduces to a solution of the reduced equations; points of V(Q_p) with a
negative-valuation or infinite coordinate cannot meet the closure of an
integral orbit at all.  Hence an empty intersection of residue sets proves
the closure misses V(Q_p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .constants import (
    M_MAX_DEFAULT,
    ORBIT_AVOIDANCE_HORIZON,
    ORBIT_HEIGHT_CAP,
    ORBIT_SPACE_BUDGET,
    PRIME_BOUND_DEFAULT,
)
from .dynsys import as_polyds, is_preperiodic_rational
from .heights import weil_height
from .intfactor import factor_integer, is_prime, primes_up_to
from .orbitcore import orbit_tail_cycle
from .polynomials import UniPoly
from .projective import ProjPoint, apply_poly, is_infinity
from .subvar import LinkB, StructuredVariety, VertA


def vp(q: Fraction, p: int) -> float:
    """p-adic valuation on Q; vp(0) = +inf."""
    if q == 0:
        return math.inf
    v = 0
    num = q.numerator
    while num % p == 0:
        num //= p
        v += 1
    den = q.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class PadicContext:
    p: int
    m: int

    def __post_init__(self):
        # deterministic trial division agreement backs the Miller-Rabin call
        if self.p < 2 or not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p <= 10**6 and any(self.p % q == 0 for q in range(2, min(self.p, 1000))):
            raise ValueError(f"{self.p} failed trial division")
        if self.m < 1:
            raise ValueError("precision m must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.m


@dataclass(frozen=True)
class GoodPrimeReport:
    p: int
    good: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self):
        return self.good


def is_good_prime(
    ds, v: Optional[StructuredVariety], point: tuple[ProjPoint, ...], p: int
) -> GoodPrimeReport:
    """All instance data p-integral, unit leading coefficients, no infinities."""
    ds = as_polyds(ds)
    reasons = []
    for idx, coord in enumerate(point):
        if is_infinity(coord):
            reasons.append(f"coordinate {idx + 1} of P is infinite")
        elif vp(coord, p) < 0:
            reasons.append(f"coordinate {idx + 1} of P is not p-integral")
    polys = [("f", ds.f)]
    if v is not None:
        for eq in v.link_equations():
            polys.append((f"link x{eq.dst}=g(x{eq.src})", eq.g))
        for eq in v.vert_equations():
            if is_infinity(eq.zeta):
                reasons.append(f"pin on axis {eq.axis} is infinite")
            elif vp(eq.zeta, p) < 0:
                reasons.append(f"pin on axis {eq.axis} is not p-integral")
    for name, poly in polys:
        if any(vp(c, p) < 0 for c in poly.coeffs):
            reasons.append(f"{name} has a non-integral coefficient")
        elif vp(poly.lead, p) != 0:
            reasons.append(f"{name} has a non-unit leading coefficient")
    return GoodPrimeReport(p, not reasons, tuple(reasons))


def reduce_fraction(q: Fraction, modulus: int) -> int:
    """Image of a p-integral rational in Z/p^m."""
    den = q.denominator % modulus
    return q.numerator * pow(den, -1, modulus) % modulus


def reduce_poly(g: UniPoly, modulus: int) -> tuple[int, ...]:
    return tuple(reduce_fraction(c, modulus) for c in g.coeffs)


@dataclass(frozen=True)
class OrbitModPm:
    p: int
    m: int
    tail: tuple[tuple[int, ...], ...]
    cycle: tuple[tuple[int, ...], ...]

    @property
    def tail_len(self) -> int:
        return len(self.tail)

    @property
    def cycle_len(self) -> int:
        return len(self.cycle)

    def points(self):
        yield from self.tail
        yield from self.cycle


def orbit_mod(
    ds, point: tuple[ProjPoint, ...], ctx: PadicContext, max_steps: int = ORBIT_SPACE_BUDGET
) -> OrbitModPm:
    """Complete tail and cycle of the reduced orbit in (Z/p^m)^n."""
    ds = as_polyds(ds)
    report = is_good_prime(ds, None, point, ctx.p)
    if not report:
        raise ValueError(f"p = {ctx.p} is not a good prime: {report.reasons}")
    modulus = ctx.modulus
    coeffs = reduce_poly(ds.f, modulus)
    start = tuple(reduce_fraction(c, modulus) for c in point)
    tail, cycle = orbit_tail_cycle(coeffs, start, modulus, max_steps)
    return OrbitModPm(ctx.p, ctx.m, tuple(tail), tuple(cycle))


def _reduced_equation_tests(v: StructuredVariety, modulus: int):
    """Compile V's equations to residue predicates."""
    tests = []
    for eq in v.equations:
        if isinstance(eq, VertA):
            zeta = reduce_fraction(eq.zeta, modulus)
            tests.append(("vert", eq.axis - 1, zeta))
        else:
            coeffs = reduce_poly(eq.g, modulus)
            tests.append(("link", eq.src - 1, eq.dst - 1, coeffs))
    return tests


def _satisfies_reduced(tests, residue: tuple[int, ...], modulus: int) -> bool:
    for test in tests:
        if test[0] == "vert":
            _, axis, zeta = test
            if residue[axis] != zeta:
                return False
        else:
            _, src, dst, coeffs = test
            acc = 0
            x = residue[src]
            for c in reversed(coeffs):
                acc = (acc * x + c) % modulus
            if residue[dst] != acc:
                return False
    return True


@dataclass(frozen=True)
class HasseCertificate:
    p: int
    m: int
    residues_checked: int
    tail_len: int
    cycle_len: int
    good_prime: bool = True
    verdict: str = "certified"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "verdict": self.verdict,
            "tail_len": self.tail_len,
            "cycle_len": self.cycle_len,
            "residues_checked": self.residues_checked,
            "good_prime": self.good_prime,
        }


def certificate_or_witness(
    ds, v: StructuredVariety, point: tuple[ProjPoint, ...], ctx: PadicContext
) -> tuple[Optional[HasseCertificate], Optional[tuple[int, ...]]]:
    """(certificate, None) when no orbit residue lies on V mod p^m, else
    (None, witness_residue)."""
    ds = as_polyds(ds)
    report = is_good_prime(ds, v, point, ctx.p)
    if not report:
        raise ValueError(f"p = {ctx.p} is not a good prime: {report.reasons}")
    orbit = orbit_mod(ds, point, ctx)
    tests = _reduced_equation_tests(v, ctx.modulus)
    for residue in orbit.points():
        if _satisfies_reduced(tests, residue, ctx.modulus):
            return None, residue
    return (
        HasseCertificate(
            p=ctx.p,
            m=ctx.m,
            residues_checked=orbit.tail_len + orbit.cycle_len,
            tail_len=orbit.tail_len,
            cycle_len=orbit.cycle_len,
        ),
        None,
    )


def hasse_certificate(
    ds, v: StructuredVariety, point: tuple[ProjPoint, ...], ctx: PadicContext
) -> Optional[HasseCertificate]:
    """Certificate that the p-adic closure of the orbit misses V(Q_p).

    Certified iff no residue of the complete orbit mod p^m satisfies the
    reduced equations; absence of a certificate refutes nothing.
    """
    cert, _ = certificate_or_witness(ds, v, point, ctx)
    return cert


class OrbitMeetsVError(RuntimeError):
    """The rational orbit provably hits V: the theorem hypothesis fails."""

    def __init__(self, step: int):
        super().__init__(f"orbit meets V at step {step}")
        self.step = step


def check_orbit_avoidance(
    ds,
    v: StructuredVariety,
    point: tuple[ProjPoint, ...],
    horizon: int = ORBIT_AVOIDANCE_HORIZON,
    height_cap: float = ORBIT_HEIGHT_CAP,
) -> int:
    """Exact membership along the orbit for up to `horizon` steps.

    Raises OrbitMeetsVError on a hit.  Only the coordinates that V's
    equations mention are iterated (membership ignores the rest), and the
    walk stops once one of them outgrows the height cap: exact iteration
    beyond that is refused for cost, which is safe because certification
    never relies on this pre-check (a true orbit hit would block every
    certificate on its own).  Returns the number of steps actually verified.
    """
    ds = as_polyds(ds)
    involved: set[int] = set()
    for eq in v.equations:
        if isinstance(eq, VertA):
            involved.add(eq.axis)
        else:
            involved.update((eq.src, eq.dst))
    coords = {i: point[i - 1] for i in involved}
    for k in range(horizon + 1):
        hit = True
        for eq in v.equations:
            if isinstance(eq, VertA):
                if coords[eq.axis] != eq.zeta:
                    hit = False
                    break
            elif coords[eq.dst] != apply_poly(eq.g, coords[eq.src]):
                hit = False
                break
        if hit:
            raise OrbitMeetsVError(k)
        if any(
            not is_infinity(c) and weil_height(c) > height_cap
            for c in coords.values()
        ):
            return k
        coords = {i: apply_poly(ds.f, c) for i, c in coords.items()}
    return horizon


def hasse_search(
    ds,
    v: StructuredVariety,
    point: tuple[ProjPoint, ...],
    prime_bound: int = PRIME_BOUND_DEFAULT,
    m_max: int = M_MAX_DEFAULT,
    horizon: int = ORBIT_AVOIDANCE_HORIZON,
) -> tuple[list[HasseCertificate], dict]:
    """Ascending-prime sweep; for each good prime the precision m grows until
    a certificate appears (or m_max is exhausted).

    Returns (certificates, stats) with stats counting good primes tried.
    """
    ds = as_polyds(ds)
    check_orbit_avoidance(ds, v, point, horizon)
    certificates = []
    good_tried = 0
    skipped = []
    for p in primes_up_to(prime_bound):
        if not is_good_prime(ds, v, point, p):
            skipped.append(p)
            continue
        good_tried += 1
        for m in range(1, m_max + 1):
            cert, _ = certificate_or_witness(ds, v, point, PadicContext(p, m))
            if cert is not None:
                certificates.append(cert)
                break
    stats = {
        "good_primes_tried": good_tried,
        "bad_primes": skipped,
        "certified": len(certificates),
        "certified_fraction": (len(certificates) / good_tried) if good_tried else 0.0,
    }
    return certificates, stats


@dataclass(frozen=True)
class EtaleReport:
    p: int
    derivative_unit_at: tuple[int, ...]  # residues where f' was checked
    holds: bool


def etale_along_orbit(ds, point: tuple[ProjPoint, ...], p: int) -> EtaleReport:
    """Check v_p(f'(x)) = 0 for every x in the mod-p orbit of every
    coordinate; by the chain rule this covers all (f^l)' conditions."""
    ds = as_polyds(ds)
    report = is_good_prime(ds, None, point, p)
    if not report:
        raise ValueError(f"p = {p} is not a good prime: {report.reasons}")
    deriv = reduce_poly(ds.f.derivative(), p)
    coeffs = reduce_poly(ds.f, p)
    checked = []
    holds = True
    for coord in point:
        start = (reduce_fraction(coord, p),)
        tail, cycle = orbit_tail_cycle(coeffs, start, p, ORBIT_SPACE_BUDGET)
        for (x,) in list(tail) + list(cycle):
            checked.append(x)
            acc = 0
            for c in reversed(deriv):
                acc = (acc * x + c) % p
            if acc == 0:
                holds = False
    return EtaleReport(p, tuple(checked), holds)


def certify_via_etale(
    ds, v: StructuredVariety, point: tuple[ProjPoint, ...], p: int
) -> Optional[HasseCertificate]:
    """Theorem-backed certificate at precision m = 1.

    Issues a certificate when (i) f' is a unit along every coordinate's
    mod-p orbit, (ii) the point is preperiodic mod p (automatic in a finite
    space; the tail and cycle lengths are recorded), and (iii) no orbit
    residue lies on V mod p.  Always agrees with hasse_certificate at m = 1
    by construction, since (iii) is that check.
    """
    from .subvar import check_periodic

    ds = as_polyds(ds)
    if check_periodic(v, ds) is None:
        raise ValueError("certify_via_etale needs a periodic variety")
    if not etale_along_orbit(ds, point, p).holds:
        return None
    return hasse_certificate(ds, v, point, PadicContext(p, 1))


@dataclass(frozen=True)
class PrimitiveSearchReport:
    pairs: tuple[tuple[int, int], ...]      # (prime, first mu where it divides)
    incomplete_mus: tuple[int, ...]          # steps whose factorization hit the budget
    excluded: tuple[int, ...]                # primes dropped by the screens
    period: int


def primitive_prime_search(
    ds,
    alpha: Fraction,
    gamma: Fraction,
    mu_max: int,
    prime_bound: int = PRIME_BOUND_DEFAULT,
    exclusions: tuple[Fraction, ...] = (),
    require_long_period: bool = True,
) -> PrimitiveSearchReport:
    """Primes p <= prime_bound with v_p(f^mu(alpha) - gamma) > 0 for some
    mu <= mu_max, minus bad primes and primes where an excluded value meets
    the gamma-orbit mod p.

    gamma must be periodic; by default its exact period must exceed 2 (the
    regime where the primitive-divisor machinery applies), which
    `require_long_period=False` overrides.
    """
    ds = as_polyds(ds)
    pre = is_preperiodic_rational(ds, gamma)
    if not pre.preperiodic or pre.repeat_index != 0:
        raise ValueError("gamma must be f-periodic")
    period = len(pre.orbit) - 1
    if require_long_period and period <= 2:
        raise ValueError(
            f"gamma has exact period {period} <= 2; the primitive-divisor "
            "hypothesis needs period > 2 (pass require_long_period=False to override)"
        )
    gamma_orbit = pre.orbit[:-1]

    excluded: set[int] = set()
    for u in exclusions:
        for delta in gamma_orbit:
            diff = Fraction(u) - delta
            if diff == 0:
                continue
            for p in primes_up_to(prime_bound):
                if vp(diff, p) > 0:
                    excluded.add(p)

    found: dict[int, int] = {}
    incomplete: list[int] = []
    x = Fraction(alpha)
    for mu in range(1, mu_max + 1):
        x = ds.f(x)
        diff = x - gamma
        if diff == 0:
            continue
        fac = factor_integer(diff.numerator)
        if not fac.complete:
            incomplete.append(mu)
        for p in fac.factors:
            if p > prime_bound or p in excluded or p in found:
                continue
            if not is_good_prime(ds, None, (alpha, gamma), p):
                excluded.add(p)
                continue
            if vp(diff, p) > 0:
                found[p] = mu
    pairs = tuple(sorted(found.items()))
    return PrimitiveSearchReport(
        pairs=pairs,
        incomplete_mus=tuple(incomplete),
        excluded=tuple(sorted(excluded)),
        period=period,
    )
