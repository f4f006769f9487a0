"""Integer primality and factorization with an explicit work budget.

Factorization runs trial division up to TRIAL_DIVISION_BOUND and then
Brent-cycle Pollard rho with a global iteration cap.  When the budget runs
out the result carries ``complete=False`` plus the unfactored cofactor so
callers (the prime searches) can skip it instead of trusting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import POLLARD_RHO_MAX_ITERS, TRIAL_DIVISION_BOUND

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (the 12-witness set covers n < 3.3e24;
    above that the test is probabilistic but witness-rich)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(bound: int) -> list[int]:
    """Sieve of Eratosthenes, inclusive."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, flag in enumerate(sieve) if flag]


def _pollard_brent(n: int, budget: int, seed: int = 1) -> tuple[int, int]:
    """Brent-cycle rho. Returns (factor, iterations used); factor == n on failure."""
    if n % 2 == 0:
        return 2, 0
    used = 0
    for c in range(seed, seed + 20):
        y, m = 2, 128
        g = r = q = 1
        while g == 1 and used < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                used += min(m, r - k)
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:  # backtrack
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n and g != 1:
            return g, used
        if used >= budget:
            break
    return n, used


@dataclass
class Factorization:
    """Multiset of (prime, exponent) plus completeness flag."""

    n: int
    factors: dict[int, int] = field(default_factory=dict)
    unfactored: int = 1  # composite cofactor left when the budget ran out
    complete: bool = True

    def product(self) -> int:
        out = self.unfactored
        for p, e in self.factors.items():
            out *= p**e
        return out


def factor_integer(n: int, rho_budget: int = POLLARD_RHO_MAX_ITERS) -> Factorization:
    """Factor |n| (n != 0). Unit factors are dropped: factor_integer(1) is empty."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    result = Factorization(n=n)
    if n == 1:
        return result

    for p in (2, 3, 5):
        while n % p == 0:
            result.factors[p] = result.factors.get(p, 0) + 1
            n //= p
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    w = 0
    while p * p <= n and p <= TRIAL_DIVISION_BOUND:
        while n % p == 0:
            result.factors[p] = result.factors.get(p, 0) + 1
            n //= p
        p += wheel[w]
        w = (w + 1) % 8
    if n == 1:
        return result
    if n <= TRIAL_DIVISION_BOUND * TRIAL_DIVISION_BOUND or is_prime(n):
        # trial division exhausted all primes up to min(sqrt, bound)
        if is_prime(n):
            result.factors[n] = result.factors.get(n, 0) + 1
            return result

    # rho phase on the remaining composite part
    stack = [n]
    budget = rho_budget
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            result.factors[m] = result.factors.get(m, 0) + 1
            continue
        d, used = _pollard_brent(m, budget)
        budget -= used
        if d == m or d == 1:
            result.unfactored *= m
            result.complete = False
            continue
        stack.append(d)
        stack.append(m // d)
    return result
