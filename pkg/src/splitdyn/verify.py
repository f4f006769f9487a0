"""Independent brute-force verifier for Hasse certificates.

Deliberately self-contained: it re-reduces the instance, walks the orbit
forward with a visited-set (no Brent, no compiled kernel, nothing shared
with padic/orbitcore) and re-checks every residue against the reduced
equations.  A certificate is accepted only if the walk terminates with no
residue on V and the residue count matches the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .projective import is_infinity
from .subvar import LinkB, StructuredVariety, VertA


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    reason: str
    residues_seen: int

    def __bool__(self):
        return self.ok


def _reduce(q: Fraction, modulus: int) -> int:
    return q.numerator * pow(q.denominator % modulus, -1, modulus) % modulus


def _eval_mod(coeffs: list[int], x: int, modulus: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % modulus
    return acc


def verify_certificate(
    f,
    v: StructuredVariety,
    point,
    certificate: dict,
) -> VerificationResult:
    """Re-verify a certificate JSON object against the instance.

    Walks the full orbit of `point` under the diagonal action of `f` modulo
    p^m, collecting residues until the state repeats, and confirms that no
    residue satisfies every reduced equation of `v`.
    """
    p, m = int(certificate["p"]), int(certificate["m"])
    if certificate.get("verdict") != "certified":
        return VerificationResult(False, "not a certified verdict", 0)
    modulus = p**m

    # independent good-prime re-screen
    for coord in point:
        if is_infinity(coord) or Fraction(coord).denominator % p == 0:
            return VerificationResult(False, "point not p-integral", 0)
    polys = [f] + [eq.g for eq in v.equations if isinstance(eq, LinkB)]
    for poly in polys:
        if any(c.denominator % p == 0 for c in poly.coeffs):
            return VerificationResult(False, "coefficients not p-integral", 0)
        if poly.lead.numerator % p == 0:
            return VerificationResult(False, "leading coefficient not a unit", 0)
    for eq in v.equations:
        if isinstance(eq, VertA) and (
            is_infinity(eq.zeta) or Fraction(eq.zeta).denominator % p == 0
        ):
            return VerificationResult(False, "pin not p-integral", 0)

    coeffs = [_reduce(c, modulus) for c in f.coeffs]
    state = tuple(_reduce(Fraction(c), modulus) for c in point)

    checks = []
    for eq in v.equations:
        if isinstance(eq, VertA):
            checks.append(("vert", eq.axis - 1, _reduce(Fraction(eq.zeta), modulus)))
        else:
            checks.append(
                ("link", eq.src - 1, eq.dst - 1, [_reduce(c, modulus) for c in eq.g.coeffs])
            )

    seen = set()
    while state not in seen:
        seen.add(state)
        on_v = True
        for chk in checks:
            if chk[0] == "vert":
                _, axis, zeta = chk
                if state[axis] != zeta:
                    on_v = False
                    break
            else:
                _, src, dst, gcoeffs = chk
                if state[dst] != _eval_mod(gcoeffs, state[src], modulus):
                    on_v = False
                    break
        if on_v:
            return VerificationResult(
                False, f"orbit residue {state} satisfies the reduced equations", len(seen)
            )
        state = tuple(_eval_mod(coeffs, x, modulus) for x in state)

    expected = int(certificate.get("residues_checked", len(seen)))
    if expected != len(seen):
        return VerificationResult(
            False,
            f"residue count mismatch: certificate says {expected}, walk saw {len(seen)}",
            len(seen),
        )
    return VerificationResult(True, "certificate verified", len(seen))


def confirm_witness(
    f,
    v: StructuredVariety,
    point,
    p: int,
    m: int,
    witness: tuple[int, ...],
) -> bool:
    """Confirm a non-certification witness: the residue must lie on the
    reduced orbit and satisfy the reduced equations."""
    modulus = p**m
    coeffs = [_reduce(c, modulus) for c in f.coeffs]
    state = tuple(_reduce(Fraction(c), modulus) for c in point)
    seen = set()
    hit = False
    while state not in seen:
        seen.add(state)
        if state == tuple(witness):
            hit = True
        state = tuple(_eval_mod(coeffs, x, modulus) for x in state)
    if not hit:
        return False
    checks_ok = True
    for eq in v.equations:
        if isinstance(eq, VertA):
            if witness[eq.axis - 1] != _reduce(Fraction(eq.zeta), modulus):
                checks_ok = False
        else:
            gcoeffs = [_reduce(c, modulus) for c in eq.g.coeffs]
            if witness[eq.dst - 1] != _eval_mod(gcoeffs, witness[eq.src - 1], modulus):
                checks_ok = False
    return checks_ok
