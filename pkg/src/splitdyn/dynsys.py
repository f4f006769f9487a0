"""Single-polynomial dynamics: Chebyshev models, special/disintegrated
classification, commuting polynomials, and exact preperiodicity of rational
points.

Classification is three-valued.  A "special" verdict always carries an exact
rational affine conjugator verified by composition.  A "disintegrated"
verdict always carries an escaping critical orbit: beyond the escape bound
heights grow strictly, so the critical orbit is infinite, which cannot
happen for conjugates of X^d or +-C_d (their critical orbits are finite).
Anything else is "unknown" with the necessary-condition screen recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .constants import (
    CLASSIFY_ESCAPE_KMAX,
    COMMUTE_N_MAX,
    ENUMERATE_DEG_BOUND,
    MAHLER_NUMERIC_SLACK,
)
from .heights import escape_bound, escape_constant, weil_height
from .mahler import mahler
from .polynomials import (
    UniPoly,
    _rational_nth_roots,
    clear_denominators,
    format_poly,
    identity,
    monomial,
    pushforward,
)


class PolyDS:
    """A polynomial dynamical system (f, d = deg f >= 2) with cached iterates.

    Values are immutable; the caches are populate-once dicts, so sharing
    across threads is safe under CPython's atomic dict operations.
    """

    def __init__(self, f: UniPoly):
        if f.degree < 2:
            raise ValueError("PolyDS needs deg f >= 2")
        self.f = f
        self.d = f.degree
        self._iterates: dict[int, UniPoly] = {0: identity(), 1: f}
        self._escape_constant: Optional[float] = None

    def iterate(self, k: int) -> UniPoly:
        cached = self._iterates.get(k)
        if cached is None:
            cached = self.f.iterate(k)
            self._iterates[k] = cached
        return cached

    @property
    def escape_constant(self) -> float:
        if self._escape_constant is None:
            self._escape_constant = escape_constant(self.f)
        return self._escape_constant

    @property
    def escape_bound(self) -> float:
        return escape_bound(self.f)

    def __repr__(self):
        return f"PolyDS({format_poly(self.f)!r})"


def as_polyds(obj) -> PolyDS:
    return obj if isinstance(obj, PolyDS) else PolyDS(obj)


def chebyshev(d: int) -> UniPoly:
    """The normalized Chebyshev polynomial: C_d(X + 1/X) = X^d + 1/X^d."""
    if d < 0:
        raise ValueError("chebyshev needs d >= 0")
    prev, cur = UniPoly([2]), identity()
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, identity() * cur - prev
    return cur


# --- preperiodicity -----------------------------------------------------------


@dataclass(frozen=True)
class PreperiodicityResult:
    preperiodic: bool
    orbit: tuple[Fraction, ...]  # values visited before the decision
    repeat_index: Optional[int]  # orbit[-1] == orbit[repeat_index] if periodic
    escaped_at: Optional[int]    # first k with h(f^k a) > escape bound

    def __bool__(self):
        return self.preperiodic


def is_preperiodic_rational(ds, alpha: Fraction) -> PreperiodicityResult:
    """Exact decision: iterate until a repeat or until the height escapes.

    Terminates because rationals of height <= E form a finite set, so the
    orbit either leaves it (and then h strictly grows, no repeat possible)
    or revisits a value.
    """
    ds = as_polyds(ds)
    bound = ds.escape_bound
    x = Fraction(alpha)
    seen: dict[Fraction, int] = {}
    orbit: list[Fraction] = []
    while True:
        if weil_height(x) > bound:
            return PreperiodicityResult(False, tuple(orbit), None, len(orbit))
        if x in seen:
            orbit.append(x)
            return PreperiodicityResult(True, tuple(orbit), seen[x], None)
        seen[x] = len(orbit)
        orbit.append(x)
        x = ds.f(x)


# --- commuting machinery -------------------------------------------------------


def commutes_with_iterate(g: UniPoly, ds, n_max: int = COMMUTE_N_MAX) -> Optional[int]:
    """Least N <= n_max with g o f^N = f^N o g, else None."""
    if g.is_constant():
        raise ValueError("g must be nonconstant")
    ds = as_polyds(ds)
    for n in range(1, n_max + 1):
        fn = ds.iterate(n)
        if g.compose(fn) == fn.compose(g):
            return n
    return None


def commuters_of_degree(F: UniPoly, e: int) -> list[UniPoly]:
    """All degree-e polynomials g with g o F = F o g, for 1 <= e < deg F.

    The coefficient system is triangular once the leading coefficient is
    fixed: matching X^(eD) forces g_e^(D-1) = lead(F)^(e-1), and each lower
    coefficient of g appears linearly with multiplier D lead(F) g_e^(D-1)
    in one new equation.  Solutions are then verified by full composition.
    """
    D = F.degree
    if not 1 <= e < D:
        raise ValueError("commuters_of_degree needs 1 <= e < deg F")
    out = []
    for lead in _rational_nth_roots(F.lead ** (e - 1), D - 1):
        coeffs = [Fraction(0)] * e + [lead]
        mult = D * F.lead * lead ** (D - 1)
        for j in range(1, e + 1):
            g = UniPoly(coeffs)
            lhs = g.compose(F)
            rhs = F.compose(g)
            delta = lhs.coeff(e * D - j) - rhs.coeff(e * D - j)
            coeffs[e - j] += delta / mult
        g = UniPoly(coeffs)
        if g.compose(F) == F.compose(g):
            out.append(g)
    return sorted(out, key=lambda p: p.coeffs)


@dataclass(frozen=True)
class SymmetryGroup:
    """Rational affine maps commuting with some iterate of f.

    Over Q the leading coefficient satisfies a^(d^N - 1) = 1, so a = +-1 and
    the group has order at most 2; `exponent` is D with f o L = L^D o f for
    the generator when such D exists.
    """

    elements: tuple[UniPoly, ...]
    witness_n: tuple[int, ...]
    exponent: Optional[int]

    def generator(self) -> UniPoly:
        return self.elements[-1]

    def nontrivial(self) -> bool:
        return len(self.elements) > 1


def rational_symmetries(ds, n_max: int = COMMUTE_N_MAX) -> SymmetryGroup:
    ds = as_polyds(ds)
    elements = [identity()]
    witness = [1]
    for n in range(1, n_max + 1):
        fn = ds.iterate(n)
        for g in commuters_of_degree(fn, 1):
            if g != identity() and g not in elements:
                elements.append(g)
                witness.append(n)
        if len(elements) > 1:
            break
    exponent = None
    if len(elements) > 1:
        gen = elements[-1]
        power = gen
        for dexp in range(1, 3):
            if ds.f.compose(gen) == power.compose(ds.f):
                exponent = dexp
                break
            power = gen.compose(power)
    return SymmetryGroup(tuple(elements), tuple(witness), exponent)


def compositional_root(ds, n_max: int = COMMUTE_N_MAX) -> tuple[UniPoly, Optional[int]]:
    """Least-degree nonlinear polynomial commuting with an iterate of f.

    Bounded search over divisor degrees of d; falls back to f itself (which
    commutes with f at N = 1) when nothing smaller verifies.
    """
    ds = as_polyds(ds)
    for e in range(2, ds.d):
        if ds.d % e != 0:
            continue
        for n in range(1, n_max + 1):
            sols = commuters_of_degree(ds.iterate(n), e)
            if sols:
                return sols[0], n
    return ds.f, 1


def enumerate_commuting(
    ds,
    deg_bound: int = ENUMERATE_DEG_BOUND,
    n_max: int = COMMUTE_N_MAX,
) -> list[UniPoly]:
    """All rational polynomials of degree <= deg_bound commuting with an
    iterate of f: the verified part of {L o ftilde^m}.

    Requires a disintegrated classification (the structure theorem behind
    the catalog needs it); every candidate is checked by composition and
    silently dropped on failure.
    """
    ds = as_polyds(ds)
    verdict = classify(ds)
    if verdict.verdict != "disintegrated":
        raise ValueError(
            f"enumerate_commuting needs a disintegrated system, got {verdict.verdict!r}"
        )
    froot, _ = compositional_root(ds, n_max)
    sym = rational_symmetries(ds, n_max)
    powers = [identity()]
    while powers[-1].degree * froot.degree <= deg_bound:
        powers.append(froot.compose(powers[-1]))
    catalog: list[UniPoly] = []
    for power in powers:
        for sigma in sym.elements:
            cand = sigma.compose(power)
            if cand in catalog:
                continue
            if commutes_with_iterate(cand, ds, n_max) is not None:
                catalog.append(cand)
    return sorted(catalog, key=lambda p: (p.degree, p.coeffs))


def verify_semiconjugacy(
    f1: UniPoly, f2: UniPoly, q: UniPoly, p1: UniPoly, p2: UniPoly
) -> bool:
    """Exact check of f1 o p1 = p1 o q and f2 o p2 = p2 o q."""
    for poly in (f1, f2, q, p1, p2):
        if poly.is_constant():
            raise ValueError("all polynomials must be nonconstant")
    return f1.compose(p1) == p1.compose(q) and f2.compose(p2) == p2.compose(q)


# --- classification ---------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    verdict: str                      # "special" | "disintegrated" | "unknown"
    kind: Optional[str] = None        # "power" | "chebyshev" for special
    conjugator: Optional[UniPoly] = None
    model: Optional[UniPoly] = None   # X^d, C_d or -C_d
    transcript: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        witness: dict = {}
        if self.conjugator is not None:
            witness["conjugator"] = format_poly(self.conjugator)
            witness["model"] = format_poly(self.model)
            witness["kind"] = self.kind
        return {
            "verdict": self.verdict,
            "witness": witness or self.transcript.get("escape", {}),
            "transcript": self.transcript,
        }


def _screen_against(centered: UniPoly, model: UniPoly) -> bool:
    """Necessary condition for centered f = L^-1 model L with L = sX:
    a_i^(d-1) == c_i^(d-1) (c_d/a_d)^(1-i) for every i (s eliminated)."""
    d = centered.degree
    a_d = centered.lead
    c_d = model.lead
    for i in range(d):
        a_i, c_i = centered.coeff(i), model.coeff(i)
        if c_i == 0:
            if a_i != 0:
                return False
        elif a_i ** (d - 1) != c_i ** (d - 1) * (c_d / a_d) ** (1 - i):
            return False
    return True


def _try_conjugator(f: UniPoly, model: UniPoly, t: Fraction) -> Optional[UniPoly]:
    """Search rational L = sX + t with f o L = L o model (composition-verified)."""
    d = f.degree
    for s in _rational_nth_roots(model.lead / f.lead, d - 1):
        conj = UniPoly([t, s])
        if f.compose(conj) == conj.compose(model):
            return conj
    return None


def _critical_orbit_escape(ds, k_max: int) -> Optional[dict]:
    """Look for a critical point whose orbit height passes the escape bound.

    Rational critical points are iterated exactly.  Irrational ones are
    tracked through the minimal polynomial of the Galois orbit: the average
    root height (Mahler measure / degree) exceeding the bound forces some
    conjugate critical point past it.
    """
    from .polyfactor import factor_poly

    bound = ds.escape_bound
    _, factors = factor_poly(ds.f.derivative())
    for q, _mult in factors:
        if q.degree == 1:
            crit = Fraction(-q.coeffs[0], q.coeffs[1])
            heights = []
            x = crit
            for k in range(k_max + 1):
                h = weil_height(x)
                heights.append(h)
                if h > bound:
                    return {
                        "critical_point": str(crit),
                        "escape_k": k,
                        "height": h,
                        "bound": bound,
                        "heights": heights,
                    }
                x = ds.f(x)
        else:
            heights = []
            for k in range(k_max + 1):
                image = pushforward(q.to_unipoly(), ds.f, k)
                h = mahler(clear_denominators(image)).measure / q.degree
                heights.append(h)
                if h > bound + MAHLER_NUMERIC_SLACK:
                    return {
                        "critical_minpoly": format_poly(q.to_unipoly()),
                        "escape_k": k,
                        "avg_height": h,
                        "bound": bound,
                        "heights": heights,
                    }
    return None


def classify(ds, k_max: int = CLASSIFY_ESCAPE_KMAX) -> Classification:
    ds = as_polyds(ds)
    f, d = ds.f, ds.d
    # both X^d and +-C_d have no X^(d-1) term, so the translation is forced
    t = -f.coeff(d - 1) / (d * f.lead)
    centered = f.shift(t) - UniPoly([t])  # (X+t)^-1 o f o (X+t)
    models = [
        ("power", monomial(d)),
        ("chebyshev", chebyshev(d)),
        ("chebyshev", -chebyshev(d)),
    ]
    screens = {}
    screened_in = []
    for idx, (kind, model) in enumerate(models):
        name = ("power", "cheb_plus", "cheb_minus")[idx]
        ok = _screen_against(centered, model)
        screens[name] = ok
        if ok:
            screened_in.append((kind, model))
    transcript: dict = {"centering_shift": str(t), "screens": screens}

    for kind, model in screened_in:
        conj = _try_conjugator(f, model, t)
        if conj is not None:
            return Classification(
                verdict="special",
                kind=kind,
                conjugator=conj,
                model=model,
                transcript=transcript,
            )

    escape = _critical_orbit_escape(ds, k_max)
    if escape is not None:
        transcript["escape"] = escape
        return Classification(verdict="disintegrated", transcript=transcript)

    if screened_in:
        transcript["reason"] = (
            "screen admits a special model but no rational conjugator exists; "
            "the conjugator may be irrational"
        )
    else:
        transcript["reason"] = (
            f"no special model passed the screen and no critical orbit "
            f"escaped within {k_max} steps"
        )
    return Classification(verdict="unknown", transcript=transcript)
