"""Pure-Python orbit kernel: coordinatewise polynomial iteration mod p^m
with Brent cycle detection.

Contract shared with the compiled twin in _fastorbit.pyx: given integer
coefficients (lowest degree first, already reduced mod `mod`), a start state
and the modulus, return (tail, cycle) as lists of int tuples with
f(tail[-1]) == cycle[0] and f(cycle[-1]) == cycle[0].
"""

from __future__ import annotations


class OrbitBudgetError(RuntimeError):
    """The orbit walk exceeded the step budget."""


def _step(coeffs: tuple[int, ...], state: tuple[int, ...], mod: int) -> tuple[int, ...]:
    out = []
    for x in state:
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % mod
        out.append(acc)
    return tuple(out)


def orbit_tail_cycle(
    coeffs: tuple[int, ...],
    start: tuple[int, ...],
    mod: int,
    max_steps: int,
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    steps = 0

    def step(s):
        nonlocal steps
        steps += 1
        if steps > max_steps:
            raise OrbitBudgetError(f"orbit walk exceeded {max_steps} steps")
        return _step(coeffs, s, mod)

    # Brent: find the cycle length lam, then the tail length mu
    power = lam = 1
    tortoise = start
    hare = step(start)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
    tortoise = hare = start
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        mu += 1

    tail = []
    state = start
    for _ in range(mu):
        tail.append(state)
        state = step(state)
    cycle = []
    for _ in range(lam):
        cycle.append(state)
        state = step(state)
    return tail, cycle
