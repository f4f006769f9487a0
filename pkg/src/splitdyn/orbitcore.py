"""Backend selection for the modular orbit kernel.

The compiled Cython kernel is used when available and when the instance fits
its limits (modulus < 2^63, at most 16 coordinates, at most 64 coefficients);
everything else runs on the pure-Python twin.  Both implement the identical
Brent walk, so results are interchangeable.  Set SPLITDYN_PURE=1 to force the
pure path (the benchmark uses this).
"""

from __future__ import annotations

import os

from .constants import ORBIT_SPACE_BUDGET
from ._pyorbit import OrbitBudgetError, orbit_tail_cycle as _py_orbit

if os.environ.get("SPLITDYN_PURE"):
    _fast_orbit = None
else:
    try:
        from ._fastorbit import orbit_tail_cycle as _fast_orbit
    except ImportError:
        _fast_orbit = None

BACKEND = "cython" if _fast_orbit is not None else "python"

_FAST_MOD_LIMIT = 1 << 63
_FAST_MAX_COORDS = 16
_FAST_MAX_COEFFS = 64


def orbit_tail_cycle(
    coeffs: tuple[int, ...],
    start: tuple[int, ...],
    mod: int,
    max_steps: int = ORBIT_SPACE_BUDGET,
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Tail and cycle of the coordinatewise orbit of `start` mod `mod`."""
    coeffs = tuple(c % mod for c in coeffs)
    start = tuple(x % mod for x in start)
    if (
        _fast_orbit is not None
        and mod < _FAST_MOD_LIMIT
        and len(start) <= _FAST_MAX_COORDS
        and len(coeffs) <= _FAST_MAX_COEFFS
    ):
        tail, cycle = _fast_orbit(coeffs, start, mod, max_steps)
        return (
            [tuple(int(x) for x in s) for s in tail],
            [tuple(int(x) for x in s) for s in cycle],
        )
    return _py_orbit(coeffs, start, mod, max_steps)


__all__ = ["orbit_tail_cycle", "OrbitBudgetError", "BACKEND"]
