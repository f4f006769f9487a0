import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitdyn.polynomials import (
    DegreeCapError,
    UniPoly,
    clear_denominators,
    compose_left_divide,
    compose_right_divide,
    decompose,
    eisenstein,
    format_poly,
    identity,
    int_poly,
    log_int,
    parse_poly,
    poly_gcd,
    pushforward,
    resultant,
)

X = identity()


def P(text):
    return parse_poly(text)


class TestCompose:
    def test_square_of_shift(self):
        assert P("x^2").compose(P("x+1")) == P("x^2 + 2*x + 1")

    def test_identity_right(self):
        f = P("3*x^3 - 1/2*x + 7")
        assert f.compose(X) == f

    def test_chebyshev_two_fold(self):
        assert P("x^2-2").compose(P("x^2-2")) == P("x^4 - 4*x^2 + 2")

    def test_degree_multiplies(self):
        f, g = P("x^3+1"), P("2*x^4-x")
        assert f.compose(g).degree == 12


class TestIterate:
    def test_second_iterate(self):
        assert P("x^2+1").iterate(2) == P("x^4 + 2*x^2 + 2")

    def test_zeroth_is_identity(self):
        assert P("x^5 - 3").iterate(0) == X

    def test_power_map(self):
        assert P("x^2").iterate(3) == P("x^8")

    def test_degree_cap(self):
        with pytest.raises(DegreeCapError):
            P("x^2").iterate(40)

    def test_iterate_additivity(self):
        rng = random.Random(1)
        for _ in range(10):
            f = UniPoly([rng.randint(-3, 3) for _ in range(3)] + [rng.randint(1, 3)])
            a, b = rng.randint(0, 3), rng.randint(0, 2)
            assert f.iterate(a + b) == f.iterate(a).compose(f.iterate(b))


class TestDerivative:
    def test_power_rule(self):
        assert P("x^3 - 3*x").derivative() == P("3*x^2 - 3")

    def test_constant(self):
        assert P("5").derivative().is_zero()

    def test_chain_rule_identity(self):
        f = P("x^2+1")
        lhs = f.iterate(2).derivative()
        rhs = f.derivative().compose(f) * f.derivative()
        assert lhs == rhs


class TestParser:
    def test_examples(self):
        assert P("2*x^3 - 1/2*x") == UniPoly([0, Fraction(-1, 2), 0, 2])

    def test_error_position(self):
        with pytest.raises(Exception) as err:
            parse_poly("x^2 + $")
        assert "position" in str(err.value)

    @given(
        st.lists(
            st.fractions(max_numerator=50, max_denominator=20),
            min_size=0,
            max_size=7,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_roundtrip(self, coeffs):
        f = UniPoly(coeffs)
        assert parse_poly(format_poly(f)) == f


class TestResultantPushforward:
    def test_single_root_power(self):
        out = pushforward(P("x - 2"), P("x^2"), 3)
        assert out.monic() == P("x - 256")

    def test_both_roots_collide(self):
        out = pushforward(P("x^2 - 2"), P("x^2"), 1)
        assert out.monic() == P("x^2 - 4*x + 4")

    def test_zero_steps(self):
        q = P("x^3 - x + 1")
        assert pushforward(q, P("x^2"), 0).monic() == q.monic()

    def test_resultant_shares_root_iff_zero(self):
        assert resultant(P("x^2 - 1"), P("x - 1")) == 0
        assert resultant(P("x^2 - 1"), P("x - 2")) == 3

    def test_pushforward_roots_numeric(self):
        # oracle: numeric roots of the image match f^N над numeric roots of q
        import numpy as np

        rng = random.Random(5)
        for _ in range(12):
            deg = rng.randint(1, 5)
            q = UniPoly([rng.randint(-5, 5) for _ in range(deg)] + [1])
            f = UniPoly([rng.randint(-2, 2), rng.randint(1, 2), 1])
            n = rng.randint(0, 2)
            image = pushforward(q, f, n)
            roots_q = np.roots([float(c) for c in reversed(q.coeffs)])
            exp = np.sort_complex(np.array([f.iterate(n)(r) for r in roots_q]))
            got = np.sort_complex(np.roots([float(c) for c in reversed(image.coeffs)]))
            assert np.allclose(exp, got, atol=1e-6, rtol=1e-6)


class TestDecompose:
    def test_pure_power(self):
        u, v = decompose(P("x^4"), 2)
        assert (u, v) == (P("x^2"), P("x^2"))

    def test_shifted(self):
        u, v = decompose(P("x^4 + 1"), 2)
        assert v == P("x^2") and u == P("x^2 + 1")
        assert u.compose(v) == P("x^4 + 1")

    def test_precondition(self):
        with pytest.raises(ValueError):
            decompose(P("x^2 + 1"), 2)

    def test_composition_recovered_exactly(self):
        rng = random.Random(9)
        for _ in range(20):
            u = UniPoly([rng.randint(-4, 4) for _ in range(rng.randint(1, 3))] + [1])
            v = UniPoly([0] + [rng.randint(-4, 4) for _ in range(rng.randint(1, 2))] + [1])
            f = u.compose(v)
            if v.degree < 2 or not 2 <= v.degree < f.degree:
                continue
            result = decompose(f, v.degree)
            assert result is not None
            uu, vv = result
            assert uu.compose(vv) == f

    def test_left_right_division(self):
        f, g = P("x^2 + 1"), P("x^3 - 2*x")
        assert compose_right_divide(f.compose(g), g) == f
        assert compose_left_divide(f.compose(g), f) == g
        assert compose_right_divide(P("x^6 + 1"), P("x^2 + x")) is None


class TestEisenstein:
    def test_x2_plus_3(self):
        assert eisenstein(int_poly([3, 0, 1]), 3) is True

    def test_shifted_family_member(self):
        assert eisenstein(int_poly([15, 6, 2]), 3) is True

    def test_not_applicable(self):
        assert eisenstein(int_poly([1, 0, 1]), 3) is False


class TestIntPoly:
    def test_content_primitive_reconstruction(self):
        f = P("4/6*x^2 - 2/3")
        prim = clear_denominators(f)
        assert prim.to_unipoly(with_content=True) == f

    def test_log_int_large(self):
        import math

        n = 10**500 + 12345
        assert abs(log_int(n) - 500 * math.log(10)) < 1e-6


class TestGcd:
    def test_common_factor(self):
        a = P("x^2 - 1") * P("x + 2")
        b = P("x^2 - 1") * P("x - 3")
        assert poly_gcd(a, b) == P("x^2 - 1").monic()
