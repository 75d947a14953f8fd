import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from ultraslow.config import DEFAULT_CONFIG
from ultraslow.errors import DomainError
from ultraslow.lapinv import gaver_stehfest, laplace_fn
from ultraslow.specfun import (
    EULER,
    PrabhakarParams,
    digamma,
    ein,
    exp_integral_e1,
    exp_integral_ei,
    harmonic,
    hyper_pfq,
    mittag_leffler_3p,
    pochhammer,
    prabhakar_e,
    trigamma,
)


def ml(a, b, g, z, **kw):
    return mittag_leffler_3p(PrabhakarParams(a, b, g), z, **kw).value


class TestMittagLeffler:
    def test_zero_argument(self):
        assert ml(0.7, 0.3, 0.5, 0.0) == pytest.approx(1 / math.gamma(0.3), rel=1e-15)

    def test_exponential(self):
        assert ml(1, 1, 1, 1.0) == pytest.approx(math.e, rel=1e-15)

    def test_e12_closed_form(self):
        # E_{1,2}(z) = (e^z - 1)/z
        assert ml(1, 2, 1, -1.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)

    def test_reciprocal_gamma_convention(self):
        assert ml(0.6, 0.0, 0.7, 0.0) == 0.0
        # beta = 0: the r = 0 term vanishes, the r = 1 term is gamma z / Gamma(alpha)
        z = 1e-3
        assert ml(0.5, 0.0, 0.7, z) == pytest.approx(0.7 * z / math.gamma(0.5), rel=2e-3)

    def test_against_mpmath_series(self):
        a, b, g, z = 0.6, 0.4, 0.8, -3.0
        ref = mp.nsum(lambda r: mp.rf(g, r) * mp.mpf(z) ** r / (mp.factorial(r) * mp.gamma(b + a * r)), [0, mp.inf])
        assert ml(a, b, g, z) == pytest.approx(float(ref), rel=1e-13)

    @pytest.mark.parametrize("x", [8.5, 20.0])
    def test_large_negative_argument(self, x):
        # the alternating series cancels ~x^2/ln10 digits, so sum it at high precision
        a, b, g = 0.5, 1.0, 0.5
        with mp.workdps(260):
            ref = mp.fsum(mp.rf(g, r) * (-mp.mpf(x)) ** r / (mp.factorial(r) * mp.gamma(b + a * r))
                          for r in range(2600))
        assert ml(a, b, g, -x) == pytest.approx(float(ref), rel=1e-10, abs=1e-14)

    def test_crossover_overlap(self):
        # the asymptotic and series routes agree on both sides of the switch
        p = PrabhakarParams(0.7, 0.9, 0.6)
        lo = DEFAULT_CONFIG.with_overrides(asymptotic_crossover=1e9)
        for x in (45.0, 55.0):
            a = mittag_leffler_3p(p, -x).value
            b = mittag_leffler_3p(p, -x, lo).value
            assert a == pytest.approx(b, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            PrabhakarParams(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            PrabhakarParams(0.5, 1.0, 1.0, -1.0)

    @given(st.integers(min_value=5, max_value=60))
    def test_error_monotone_in_max_terms(self, n):
        p = PrabhakarParams(0.8, 1.2, 0.7)
        loose = DEFAULT_CONFIG.with_overrides(max_terms=n, raise_on_failure=False)
        tight = DEFAULT_CONFIG.with_overrides(max_terms=n + 5, raise_on_failure=False)
        e1 = mittag_leffler_3p(p, -2.5, loose).abs_err
        e2 = mittag_leffler_3p(p, -2.5, tight).abs_err
        assert e2 <= e1


class TestPrabhakarE:
    def test_gamma_zero(self):
        assert prabhakar_e(PrabhakarParams(0.5, 1.0, 0.0, 2.0), 3.0).value == pytest.approx(1.0)

    def test_exp(self):
        assert prabhakar_e(PrabhakarParams(1.0, 1.0, 1.0, 1.0), 2.0).value == pytest.approx(math.exp(-2), rel=1e-14)

    def test_inverse_laplace_oracle(self):
        a, b, g = 0.6, 0.4, 0.8
        f = laplace_fn(lambda s: s ** (a * g - b) / (s ** a + 1) ** g)
        ref = gaver_stehfest(f, 1.0, 20).value
        assert prabhakar_e(PrabhakarParams(a, b, g, 1.0), 1.0).value == pytest.approx(ref, abs=1e-6)

    @given(st.floats(0.1, 5.0), st.floats(0.1, 3.0))
    def test_one_parameter_forms(self, t, lam):
        e1 = prabhakar_e(PrabhakarParams(1.0, 1.0, 1.0, lam), t).value
        e2 = prabhakar_e(PrabhakarParams(1.0, 2.0, 1.0, lam), t).value
        assert e1 == pytest.approx(math.exp(-lam * t), rel=1e-12)
        assert e2 == pytest.approx(-math.expm1(-lam * t) / lam, rel=1e-12)

    def test_large_beta_scaling_keeps_relative_accuracy(self):
        # t^(beta-1) amplifies any absolute error committed on E
        t, b = 8.0, 12.0
        ref = float(mp.mpf(t) ** (b - 1) * mp.nsum(lambda j: mp.mpf(-t) ** j / mp.gamma(b + j), [0, mp.inf]))
        assert prabhakar_e(PrabhakarParams(1.0, b, 1.0, 1.0), t).value == pytest.approx(ref, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            prabhakar_e(PrabhakarParams(1.0, 1.0, 1.0, 1.0), 0.0)


class TestExpIntegrals:
    def test_ei_minus_one(self):
        v = exp_integral_ei(-1.0)
        assert v == pytest.approx(-0.21938393439552062, abs=1e-15)
        # independent route through Ein
        assert v == pytest.approx(-(ein(1.0) - EULER - math.log(1.0)), abs=1e-15)
        assert v == pytest.approx(float(mp.ei(-1)), abs=1e-15)

    def test_ein_zero(self):
        assert ein(0.0) == 0.0

    def test_e1_asymptotic(self):
        assert exp_integral_e1(50.0) / (math.exp(-50) / 50) == pytest.approx(1.0, abs=0.02)

    @given(st.floats(1e-3, 60.0))
    def test_identities(self, t):
        assert exp_integral_e1(t) == pytest.approx(-exp_integral_ei(-t), rel=1e-14)
        assert ein(t) == pytest.approx(EULER + math.log(t) + exp_integral_e1(t), rel=1e-12, abs=1e-14)

    @given(st.floats(1e-3, 80.0))
    def test_ei_positive_against_mpmath(self, t):
        assert exp_integral_ei(t) == pytest.approx(float(mp.ei(t)), rel=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            exp_integral_ei(0.0)
        with pytest.raises(DomainError):
            exp_integral_e1(0.0)


class TestGammaFamily:
    def test_digamma_one(self):
        assert digamma(1.0) == pytest.approx(-0.5772156649015329, rel=1e-15)

    def test_harmonic(self):
        assert harmonic(0, 1) == 0
        assert harmonic(4, 2) == pytest.approx(1 + 1 / 4 + 1 / 9 + 1 / 16, rel=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 5, 30])
    def test_harmonic_digamma_links(self, n):
        assert digamma(n + 1.0) == pytest.approx(-EULER + harmonic(n, 1), abs=1e-14)
        assert trigamma(n + 1.0) == pytest.approx(math.pi ** 2 / 6 - harmonic(n, 2), abs=1e-14)

    @given(st.floats(0.1, 10.0))
    def test_digamma_recurrence(self, x):
        assert digamma(x + 1) - digamma(x) == pytest.approx(1 / x, abs=1e-12)

    def test_poles(self):
        with pytest.raises(DomainError):
            digamma(-2.0)

    def test_pochhammer(self):
        assert pochhammer(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)
        assert pochhammer(-2.0, 3) == 0.0


class TestHypergeometric:
    def test_origin(self):
        assert hyper_pfq([1, 1], [2, 2], 0.0).value == 1.0

    def test_2f2_closed_form(self):
        t = 1.0
        closed = (EULER - exp_integral_ei(-t) + math.log(t)) / t
        assert closed == pytest.approx(0.7965995992970531, abs=1e-12)
        assert hyper_pfq([1, 1], [2, 2], -t).value == pytest.approx(closed, rel=1e-14)

    def test_3f3_direct_sum(self):
        # (1)_k^3 / ((2)_k^3 k!) = 1 / ((k+1)^3 k!)
        direct = math.fsum((-1.0) ** k / ((k + 1) ** 3 * math.factorial(k)) for k in range(60))
        assert hyper_pfq([1, 1, 1], [2, 2, 2], -1.0).value == pytest.approx(direct, rel=1e-14)

    def test_lower_pole(self):
        with pytest.raises(DomainError):
            hyper_pfq([1.0], [-2.0], 0.5)

    @given(st.floats(-30.0, 30.0))
    def test_2f2_against_mpmath(self, z):
        assert hyper_pfq([1, 1.5], [2.5, 2.5], z).value == pytest.approx(float(mp.hyp2f2(1, 1.5, 2.5, 2.5, z)),
                                                                         rel=1e-12, abs=1e-15)
