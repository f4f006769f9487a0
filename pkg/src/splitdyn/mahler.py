"""Mahler measure via simultaneous (Aberth) complex root finding.

Two stages, both deterministic for a fixed seed:

  1. float64 Aberth from seeded initial guesses, accepted through a scaled
     backward-error certificate when every coefficient is exactly
     representable in float64;
  2. otherwise the float64 roots warm-start an exact-coefficient Aberth in
     gmpy2 multiprecision arithmetic (precision scales with the coefficient
     height), accepted when every per-root Newton correction is below
     REFINE_FORWARD_TOL relative - for simple roots that bounds the forward
     error, hence the measure error, directly.

Polynomials with repeated roots are split by exact squarefree decomposition
first, so stage 2 only ever certifies simple roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from .constants import ABERTH_MAX_ITERS, ROOT_RESIDUAL_TOL
from .polynomials import IntPoly, clear_denominators, log_int

REFINE_FORWARD_TOL = 1e-12
REFINE_MAX_ITERS = 80


class RootFindingError(RuntimeError):
    """Root certification failed; carries the partial root state."""

    def __init__(self, message: str, roots, residual: float):
        super().__init__(message)
        self.roots = roots
        self.residual = residual


@dataclass(frozen=True)
class MahlerReport:
    poly: IntPoly
    roots: tuple[complex, ...]
    measure: float
    root_residual: float


def _float_coeffs(coeffs: tuple[int, ...]) -> list[float]:
    """Divide by a common power of two so the largest entry is near 1.

    Scaling by 2^s moves every coefficient exactly in binary, so the roots
    are untouched and float conversion is correctly rounded.
    """
    shift = max(abs(c).bit_length() for c in coeffs) - 1
    if shift <= 0:
        return [float(c) for c in coeffs]
    return [float(Fraction(c, 1 << shift)) for c in coeffs]


def _scaled_residual(fc: np.ndarray, roots: np.ndarray) -> float:
    absz = np.abs(roots)
    val = np.zeros_like(roots)
    mag = np.zeros(len(roots))
    for c in fc[::-1]:
        val = val * roots + c
        mag = mag * absz + abs(c)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.abs(val) / np.where(mag == 0, 1.0, mag)
    return float(np.max(rel))


def _aberth_f64(coeffs: tuple[int, ...], seed: int) -> tuple[np.ndarray, float]:
    """Stage 1: float64 Aberth on the (scaled) coefficients."""
    deg = len(coeffs) - 1
    fc = np.array(_float_coeffs(coeffs))
    dc = fc[1:] * np.arange(1, deg + 1)
    rng = np.random.default_rng(seed)
    # Fujiwara root bound computed in log space, clamped so |z|^deg cannot
    # overflow float64 at the initial points
    log_lead = log_int(coeffs[-1])
    log_radius = math.log(2) + max(
        (log_int(coeffs[deg - k]) - log_lead) / k
        for k in range(1, deg + 1)
        if coeffs[deg - k] != 0
    )
    radius = math.exp(min(log_radius, 600.0 / deg))
    angles = 2 * np.pi * (np.arange(deg) + rng.uniform(0.2, 0.8, deg)) / deg + 0.3
    z = radius * np.exp(1j * angles) * rng.uniform(0.7, 1.0, deg)

    best = z
    best_residual = math.inf
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(ABERTH_MAX_ITERS):
            pv = np.full(deg, fc[-1], dtype=complex)
            for c in fc[-2::-1]:
                pv = pv * z + c
            dv = np.full(deg, dc[-1], dtype=complex)
            for c in dc[-2::-1]:
                dv = dv * z + c
            dv = np.where(dv == 0, 1e-300, dv)
            newton = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            sums = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * sums
            denom = np.where(denom == 0, 1e-300, denom)
            z_new = z - newton / denom
            bad = ~np.isfinite(z_new)
            if np.any(bad):  # rescue overflowed iterates deterministically
                z_new[bad] = radius * rng.uniform(0.2, 1.0, int(np.sum(bad))) * np.exp(
                    1j * 2 * np.pi * rng.uniform(0, 1, int(np.sum(bad)))
                )
            z = z_new
            # accept on the certified backward error, not on step size: the
            # iteration keeps jittering at rounding level after convergence
            residual = _scaled_residual(fc, z)
            if residual < best_residual:
                best, best_residual = z.copy(), residual
            if residual < ROOT_RESIDUAL_TOL * 1e-3:
                break
    return best, best_residual


def _mp_newton(cs, ds, zi):
    pv = cs[-1]
    for c in reversed(cs[:-1]):
        pv = pv * zi + c
    dv = ds[-1]
    for c in reversed(ds[:-1]):
        dv = dv * zi + c
    if dv == 0:
        dv = gmpy2.mpc(1e-300)
    return pv / dv


def _mp_aberth_update(cs, ds, z, i):
    """One Aberth update of root i against the full configuration; returns
    the relative step size."""
    newton = _mp_newton(cs, ds, z[i])
    s = gmpy2.mpc(0)
    zi = z[i]
    for j, zj in enumerate(z):
        if j != i:
            diff = zi - zj
            if diff == 0:
                diff = gmpy2.mpc(1e-30)
            s += 1 / diff
    denom = 1 - newton * s
    if denom == 0:
        denom = gmpy2.mpc(1e-300)
    w = newton / denom
    z[i] = zi - w
    return float(abs(w) / max(1.0, abs(z[i])))


def _refine_gmpy(
    coeffs: tuple[int, ...], warm: np.ndarray, seed: int
) -> tuple[list[complex], float]:
    """Stage 2: exact-coefficient Aberth at a precision exceeding the
    coefficient height, refining selectively.

    Most warm-start roots are already accurate (their own Newton step says
    so); only the ill-conditioned few get iterated.  A full sweep at the end
    certifies every root: the worst relative Newton correction bounds the
    forward error for simple roots, hence the measure error.
    """
    deg = len(coeffs) - 1
    digits = max(log_int(c) for c in coeffs if c) / math.log(10)
    bits = int(3.4 * digits) + 8 * max(1, int(math.log2(deg + 1))) + 96
    ctx = gmpy2.context()
    ctx.precision = bits
    ctx.allow_complex = True
    target = REFINE_FORWARD_TOL * 1e-2
    with gmpy2.local_context(ctx):
        cs = [gmpy2.mpc(int(c)) for c in coeffs]
        ds = [gmpy2.mpc(int(c) * i) for i, c in enumerate(coeffs) if i >= 1]
        z = [gmpy2.mpc(complex(w)) for w in warm]
        worst = math.inf
        for _attempt in range(6):
            # full sweep: update everything once, collect the stragglers
            worst = 0.0
            active = []
            for i in range(len(z)):
                rel = _mp_aberth_update(cs, ds, z, i)
                if rel >= target:
                    active.append(i)
                worst = max(worst, rel)
            if not active:
                break
            # selective sweeps on the stragglers only
            for _ in range(REFINE_MAX_ITERS):
                still = []
                for i in active:
                    rel = _mp_aberth_update(cs, ds, z, i)
                    if rel >= target:
                        still.append(i)
                active = still
                if not active:
                    break
        return [complex(v) for v in z], worst


def _squarefree_int_parts(q: IntPoly) -> list[tuple[IntPoly, int]]:
    """Exact squarefree split: q = content * prod(part_i ^ i)."""
    # cheap certificate of squarefreeness: unit gcd modulo a good prime
    from .polyfactor import _gf_deriv, _gf_gcd, _gf_monic

    for p in (9973, 9967, 9949):
        if q.lead % p == 0:
            continue
        fp = _gf_monic([c % p for c in q.coeffs], p)
        if len(fp) - 1 == q.degree and len(_gf_gcd(fp, _gf_deriv(fp, p), p)) == 1:
            return [(q, 1)]
    from .polyfactor import squarefree_decomposition

    return [
        (clear_denominators(part), mult)
        for part, mult in squarefree_decomposition(q.to_unipoly())
    ]


def _roots_certified(q: IntPoly, seed: int) -> tuple[list[complex], float]:
    """Certified complex roots of a squarefree primitive q."""
    coeffs = list(q.coeffs)
    n_zero = 0
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        n_zero += 1
    deg = len(coeffs) - 1
    roots: list[complex] = [0.0] * n_zero
    if deg == 0:
        return roots, 0.0
    if deg == 1:
        roots.append(complex(Fraction(-coeffs[0], coeffs[1])))
        return roots, 0.0
    z, residual = _aberth_f64(tuple(coeffs), seed)
    exact_in_float = all(abs(c) < 2**53 for c in coeffs)
    if exact_in_float and residual < ROOT_RESIDUAL_TOL:
        return roots + [complex(r) for r in z], residual
    refined, forward = _refine_gmpy(tuple(coeffs), z, seed)
    if forward >= REFINE_FORWARD_TOL:
        raise RootFindingError(
            f"refinement stalled: worst relative Newton correction {forward:.3g}",
            roots + refined,
            forward,
        )
    return roots + refined, forward


def aberth_roots(q: IntPoly, seed: int = 0) -> tuple[np.ndarray, float]:
    """All complex roots of the primitive part of q (with multiplicity),
    plus the certified residual/forward-error bound."""
    if q.degree < 1:
        raise ValueError("root finding needs a nonconstant polynomial")
    all_roots: list[complex] = []
    worst = 0.0
    for part, mult in _squarefree_int_parts(q):
        roots, err = _roots_certified(part, seed)
        worst = max(worst, err)
        all_roots.extend(list(roots) * mult)
    return np.array(all_roots, dtype=complex), worst


def mahler(q: IntPoly, seed: int = 0) -> MahlerReport:
    """Mahler measure of the primitive part: log|lead| + sum log max(1, |root|)."""
    if q.degree < 1:
        raise ValueError("mahler needs a nonconstant polynomial")
    roots, residual = aberth_roots(q, seed)
    measure = log_int(q.lead) + float(
        np.sum(np.log(np.maximum(1.0, np.abs(roots))))
    )
    return MahlerReport(
        poly=q,
        roots=tuple(complex(r) for r in roots),
        measure=measure,
        root_residual=residual,
    )


def avg_root_height(q: IntPoly, seed: int = 0) -> float:
    """Average Weil height of the roots (with multiplicity).

    Equals mahler(primitive part) / degree: the total height of the roots of
    a primitive integer polynomial is its Mahler measure.
    """
    return mahler(q, seed).measure / q.degree
