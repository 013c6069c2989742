from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posmat.numerics import (
    FAIL,
    GUARD_BITS,
    INDETERMINATE,
    PASS,
    DomainError,
    HPReal,
    beta_recip_hp,
    classify,
    format_rational,
    gamma_hp,
    hp_pi,
    parse_rational,
    relative_error,
)


def mp_ref(fn, *args, prec=128):
    with mpmath.workprec(prec + 64):
        return fn(*[mpmath.mpf(a) if not isinstance(a, Fraction) else mpmath.mpf(a.numerator) / a.denominator for a in args])


def rel(hp: HPReal, ref) -> float:
    with mpmath.workprec(hp.prec + 64):
        got = mpmath.mpf(str(hp))
        return float(abs(got - ref) / abs(ref))


class TestRationalIO:
    @pytest.mark.parametrize("text,value", [("3", 3), ("-4/6", Fraction(-2, 3)), (" 7 / 2 ", Fraction(7, 2))])
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("text", ["2//3", "1/0", "", "1.5", "a/b", "1/-2"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    @given(st.fractions())
    def test_round_trip(self, x):
        assert parse_rational(format_rational(x)) == x

    def test_format_is_num_over_den(self):
        assert format_rational(Fraction(4)) == "4/1"


class TestHPReal:
    def test_exact_conversion_of_small_ints(self):
        assert HPReal(5).to_fraction() == 5

    def test_fraction_is_rounded_to_precision(self):
        x = HPReal(Fraction(1, 3), 128)
        assert abs(x.to_fraction() - Fraction(1, 3)) <= Fraction(1, 3) * Fraction(1, 2**128)

    def test_decimal_string(self):
        with mpmath.workprec(256):
            ref = mpmath.mpf(1) / 10
        assert rel(HPReal("0.1", 128), ref) < 2.0**-127

    def test_str_round_trips(self):
        x = HPReal(Fraction(2, 7), 200)
        assert HPReal(str(x), 200) == x

    def test_min_precision_of_operands(self):
        assert (HPReal(1, 100) + HPReal(1, 300)).prec == 100

    def test_immutable(self):
        with pytest.raises(AttributeError):
            HPReal(1).prec = 3

    def test_precision_floor(self):
        with pytest.raises(ValueError):
            HPReal(1, 10)

    def test_exact_comparison_with_fraction(self):
        x = HPReal(Fraction(1, 3), 64)
        assert (x > Fraction(1, 3)) != (x < Fraction(1, 3))

    def test_sqrt_log_exp(self):
        two = HPReal(2, 128)
        assert rel(two.sqrt(), mp_ref(mpmath.sqrt, 2)) < 2.0**-126
        assert rel(two.log(), mp_ref(mpmath.log, 2)) < 2.0**-126
        assert rel(two.exp(), mp_ref(mpmath.exp, 2)) < 2.0**-126

    def test_real_power(self):
        got = HPReal(52, 128) ** HPReal(Fraction(1, 4), 148)
        assert rel(got, mp_ref(lambda x: x ** mpmath.mpf(0.25), 52)) < 2.0**-124

    def test_log_domain(self):
        with pytest.raises(DomainError):
            HPReal(0).log()

    def test_pi(self):
        assert rel(hp_pi(256), mp_ref(lambda: +mpmath.pi, prec=256)) < 2.0**-254

    @given(st.fractions(min_value=-1000, max_value=1000), st.fractions(min_value=-1000, max_value=1000))
    @settings(max_examples=60)
    def test_arithmetic_matches_exact(self, a, b):
        x, y = HPReal(a, 128), HPReal(b, 128)
        for got, exact in ((x + y, a + b), (x * y, a * b), (x - y, a - b)):
            err = abs(got.to_fraction() - exact)
            bound = (abs(a) + abs(b) + abs(a * b) + 1) * Fraction(1, 2**124)
            assert err <= bound


class TestGamma:
    @pytest.mark.parametrize("x", ["0.5", "1", "1.5", "2.25", "7", "9.99", "19.5", "0.01"])
    def test_against_mpmath(self, x):
        ref = mp_ref(mpmath.gamma, x)
        assert rel(gamma_hp(x, 128), ref) < 2.0 ** (-128 + GUARD_BITS)

    def test_sqrt_pi(self):
        # Gamma(1/2)^2 = pi
        g = gamma_hp(Fraction(1, 2), 192)
        assert float(relative_error(g * g, hp_pi(256))) < 2.0 ** (-192 + GUARD_BITS + 1)

    @given(st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=25, deadline=None)
    def test_reflection(self, x):
        # Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        xs = HPReal(x, 128)
        prod = gamma_hp(xs, 128) * gamma_hp(HPReal(1, 128) - xs, 128)
        with mpmath.workprec(200):
            ref = mpmath.pi / mpmath.sin(mpmath.pi * mpmath.mpf(x))
        assert rel(prod, ref) < 2.0 ** (-128 + GUARD_BITS + 2)

    def test_integers_are_factorials(self):
        import math

        for n in range(1, 25):
            assert gamma_hp(n, 128) == HPReal(math.factorial(n - 1), 128) or float(
                relative_error(gamma_hp(n, 128), math.factorial(n - 1))
            ) < 2.0 ** (-128 + GUARD_BITS)

    @pytest.mark.parametrize("x", [0, -1, "-0.5"])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            gamma_hp(x)

    def test_high_precision(self):
        ref = mp_ref(mpmath.gamma, "3.7", prec=512)
        assert rel(gamma_hp("3.7", 512), ref) < 2.0 ** (-512 + GUARD_BITS)

    def test_beta_recip_integer(self):
        # 1/B(3, 4) = 6! / (2! 3!) = 60
        assert float(relative_error(beta_recip_hp(3, 4, 128), 60)) < 2.0**-120

    def test_beta_recip_vs_mpmath(self):
        with mpmath.workprec(200):
            ref = 1 / mpmath.beta(mpmath.mpf("0.3"), mpmath.mpf("2.6"))
        assert rel(beta_recip_hp("0.3", "2.6", 128), ref) < 2.0**-120


class TestClassify:
    def test_bands(self):
        t = Fraction(1, 100)
        assert classify(HPReal("0.5"), t) == PASS
        assert classify(HPReal("-0.5"), t) == FAIL
        assert classify(HPReal("0.001"), t) == INDETERMINATE
