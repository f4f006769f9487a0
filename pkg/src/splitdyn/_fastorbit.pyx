# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernel: same contract as _pyorbit.orbit_tail_cycle.

Works for moduli below 2^63 and up to 16 coordinates; 128-bit intermediate
products keep the modular multiplication exact.  The wrapper in orbitcore
routes anything bigger to the pure-Python kernel.
"""

from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    """
    typedef unsigned __int128 u128;
    static inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
        return (uint64_t)(((u128)a * b) % m);
    }
    """
    ctypedef unsigned long long u128
    uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) nogil


DEF MAX_COORDS = 16
DEF MAX_COEFFS = 64


class OrbitBudgetError(RuntimeError):
    pass


cdef inline void _step(
    const uint64_t* coeffs, int ncoeff,
    const uint64_t* state, uint64_t* out,
    int ncoord, uint64_t mod,
) nogil:
    cdef int i, k
    cdef uint64_t acc, x
    for i in range(ncoord):
        x = state[i]
        acc = 0
        for k in range(ncoeff - 1, -1, -1):
            acc = mulmod_u64(acc, x, mod)
            acc = (acc + coeffs[k]) % mod
        out[i] = acc


def orbit_tail_cycle(coeffs, start, mod, max_steps):
    cdef uint64_t cmod = <uint64_t> mod
    cdef int ncoeff = len(coeffs)
    cdef int ncoord = len(start)
    cdef uint64_t ccoeffs[MAX_COEFFS]
    cdef uint64_t tortoise[MAX_COORDS]
    cdef uint64_t hare[MAX_COORDS]
    cdef uint64_t tmp[MAX_COORDS]
    cdef long long steps = 0, budget = <long long> max_steps
    cdef long long power, lam, mu, i
    cdef int j
    if ncoeff > MAX_COEFFS or ncoord > MAX_COORDS:
        raise ValueError("kernel limits exceeded")
    for j in range(ncoeff):
        ccoeffs[j] = <uint64_t> coeffs[j]
    for j in range(ncoord):
        tortoise[j] = <uint64_t> start[j]
        hare[j] = tortoise[j]

    _step(ccoeffs, ncoeff, hare, tmp, ncoord, cmod)
    for j in range(ncoord):
        hare[j] = tmp[j]
    steps = 1
    power = lam = 1
    while not _eq(tortoise, hare, ncoord):
        if power == lam:
            for j in range(ncoord):
                tortoise[j] = hare[j]
            power *= 2
            lam = 0
        _step(ccoeffs, ncoeff, hare, tmp, ncoord, cmod)
        for j in range(ncoord):
            hare[j] = tmp[j]
        lam += 1
        steps += 1
        if steps > budget:
            raise OrbitBudgetError(f"orbit walk exceeded {max_steps} steps")

    for j in range(ncoord):
        tortoise[j] = <uint64_t> start[j]
        hare[j] = tortoise[j]
    for i in range(lam):
        _step(ccoeffs, ncoeff, hare, tmp, ncoord, cmod)
        for j in range(ncoord):
            hare[j] = tmp[j]
    mu = 0
    while not _eq(tortoise, hare, ncoord):
        _step(ccoeffs, ncoeff, tortoise, tmp, ncoord, cmod)
        for j in range(ncoord):
            tortoise[j] = tmp[j]
        _step(ccoeffs, ncoeff, hare, tmp, ncoord, cmod)
        for j in range(ncoord):
            hare[j] = tmp[j]
        mu += 1
        steps += 2
        if steps > budget:
            raise OrbitBudgetError(f"orbit walk exceeded {max_steps} steps")

    tail = []
    cycle = []
    for j in range(ncoord):
        tortoise[j] = <uint64_t> start[j]
    for i in range(mu):
        tail.append(tuple([tortoise[j] for j in range(ncoord)]))
        _step(ccoeffs, ncoeff, tortoise, tmp, ncoord, cmod)
        for j in range(ncoord):
            tortoise[j] = tmp[j]
    for i in range(lam):
        cycle.append(tuple([tortoise[j] for j in range(ncoord)]))
        _step(ccoeffs, ncoeff, tortoise, tmp, ncoord, cmod)
        for j in range(ncoord):
            tortoise[j] = tmp[j]
    return tail, cycle


cdef inline bint _eq(const uint64_t* a, const uint64_t* b, int n) nogil:
    cdef int i
    for i in range(n):
        if a[i] != b[i]:
            return False
    return True
