import random

import pytest

from splitdyn.intfactor import Factorization, factor_integer, is_prime, primes_up_to


def test_small_example():
    assert factor_integer(12).factors == {2: 2, 3: 1}


def test_fermat_number():
    fac = factor_integer(2**32 + 1)
    assert fac.factors == {641: 1, 6700417: 1}
    assert fac.complete


def test_unit():
    fac = factor_integer(1)
    assert fac.factors == {} and fac.complete


def test_negative_uses_absolute_value():
    assert factor_integer(-45).factors == {3: 2, 5: 1}


def test_zero_rejected():
    with pytest.raises(ValueError):
        factor_integer(0)


def test_product_reconstruction():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(2, 10**12)
        fac = factor_integer(n)
        assert fac.product() == n
        for p in fac.factors:
            assert is_prime(p)


def test_budget_flag():
    # two 40-digit primes: rho with a tiny budget cannot split the product
    p = 10**39 + 687
    q = 10**39 + 699
    assert is_prime(p) and is_prime(q)
    fac = factor_integer(p * q, rho_budget=100)
    assert not fac.complete
    assert fac.unfactored == p * q
    assert fac.product() == p * q


def test_primes_up_to():
    assert primes_up_to(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert primes_up_to(1) == []


def test_is_prime_edges():
    assert not is_prime(1)
    assert is_prime(2)
    assert not is_prime(561)  # Carmichael
    assert is_prime(2**61 - 1)
