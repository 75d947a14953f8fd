import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ultraslow.errors import DomainError, Inapplicable, RouteUnavailable
from ultraslow.kernels import (
    K1,
    K2,
    W1,
    W2,
    MemoryKernel,
    k1,
    k1_time,
    k2_time,
    kernel_laplace,
    m1_time,
    m2,
    m2_time,
    rho_k1,
    sonnine_residual,
    tauberian_asymptote,
)
from ultraslow.specfun import exp_integral_ei
from ultraslow.volterra import VPArgs, vp_epsilon
from ultraslow.specfun import PrabhakarParams

P = (0.5, 0.5, 1.0)
K1_AT_1 = 0.5412357343286707
K2_FROZEN = {0.1: 1.85484337017559, 1.0: 0.920697458352769, 5.0: 0.723394132256836}
M2_FROZEN = {0.1: 1.6488605962992686, 0.5: 0.5884220317667227, 1.0: 0.3161609525867486,
             2.0: 0.148239374372602, 5.0: 0.0423707993888}


class TestMemoryKernel:
    def test_validation(self):
        with pytest.raises(DomainError):
            MemoryKernel("bogus")
        with pytest.raises(DomainError):
            MemoryKernel.distributed(B=0.0)
        with pytest.raises(DomainError):
            MemoryKernel.distributed_prabhakar(1.5, 0.5, 1.0)
        with pytest.raises(DomainError):
            MemoryKernel.caputo(1.0)

    def test_labels(self):
        assert MemoryKernel.distributed().label == "k1"
        assert MemoryKernel.distributed_prabhakar(*P).label == "k2"


class TestK1:
    def test_frozen(self):
        assert k1(1.0) == pytest.approx(K1_AT_1, rel=1e-13)

    @pytest.mark.parametrize("t", [0.05, 1.0, 8.0, 15.0])
    def test_routes_agree(self, t):
        a = k1_time(t, "volterra").value
        b = k1_time(t, "spectral").value
        assert a == pytest.approx(b, rel=1e-9)

    def test_volterra_cancellation_is_reported(self):
        # nu(t,-1) and nu(t) both grow like e^t, so their difference loses digits
        r = k1_time(30.0, "volterra")
        ref = k1_time(30.0, "spectral").value
        assert abs(r.value - ref) <= r.abs_err
        assert k1_time(30.0).diagnostics["route"] == "spectral"

    def test_long_time_tail(self):
        # k1 ~ 1/ln t
        t = 1e8
        assert k1(t) * math.log(t) == pytest.approx(1.0, abs=0.1)

    def test_spectral_density_positive(self):
        assert np.all(rho_k1(np.logspace(-8, 8, 50)) > 0)

    @given(st.floats(0.05, 5.0))
    def test_integral(self, t):
        h = 1e-4 * t
        assert (K1(t + h) - K1(t - h)) / (2 * h) == pytest.approx(k1(t), rel=1e-6)

    def test_unknown_route(self):
        with pytest.raises(RouteUnavailable):
            k1_time(1.0, "nope")


class TestM1:
    def test_closed_form(self):
        assert m1_time(1.0) == pytest.approx(-math.e * exp_integral_ei(-1.0), rel=1e-15)

    def test_frozen(self):
        assert m1_time(2.0) == pytest.approx(0.36132861688822215, rel=1e-14)
        assert W1(0.5) == pytest.approx(0.806979116825318, rel=1e-13)

    @given(st.floats(0.01, 20.0))
    def test_w1_derivative(self, t):
        h = 1e-5 * t
        assert (W1(t + h) - W1(t - h)) / (2 * h) == pytest.approx(m1_time(t), rel=1e-6)

    def test_w1_branches_meet(self):
        lo, hi = W1(1.0 - 1e-12), W1(1.0)
        assert lo == pytest.approx(hi, rel=1e-11)


class TestK2:
    @pytest.mark.parametrize("t", sorted(K2_FROZEN))
    def test_frozen(self, t):
        assert k2_time(*P, t).value == pytest.approx(K2_FROZEN[t], rel=1e-10)

    @pytest.mark.parametrize("route", ["convolution", "epsilon_diff", "talbot"])
    def test_routes(self, route):
        assert k2_time(*P, 1.0, route).value == pytest.approx(K2_FROZEN[1.0], abs=1e-9)

    def test_literal_epsilon_indices_give_derivative(self):
        # eps^{-g}_{a,-2} - eps^{-g}_{a,-1} transforms to s k2hat, i.e. dk2/dt
        a, g, lam, t = *P, 1.0
        pr = PrabhakarParams(a, 0.0, -g, lam)
        lit = vp_epsilon(VPArgs(pr, -2.0), t).value - vp_epsilon(VPArgs(pr, -1.0), t).value
        h = 1e-4
        d = (k2_time(a, g, lam, t + h).value - k2_time(a, g, lam, t - h).value) / (2 * h)
        assert lit == pytest.approx(d, rel=1e-5)
        assert abs(lit - K2_FROZEN[1.0]) > 0.5

    def test_lam_zero_reduces(self):
        assert k2_time(0.5, 0.5, 0.0, 1.0).value == pytest.approx(K1_AT_1, rel=1e-13)

    def test_integral(self):
        h = 1e-4
        d = (K2(*P, 1.0 + h) - K2(*P, 1.0 - h)) / (2 * h)
        assert d == pytest.approx(K2_FROZEN[1.0], rel=1e-6)

    def test_long_time_against_asymptote(self):
        t = 1e10
        ratio = k2_time(*P, t).value / tauberian_asymptote("k2", "long")(t)
        assert ratio == pytest.approx(1.0, abs=0.1)

    def test_unknown_route(self):
        with pytest.raises(RouteUnavailable):
            k2_time(*P, 1.0, "nope")


class TestM2:
    @pytest.mark.parametrize("t", sorted(M2_FROZEN))
    def test_frozen(self, t):
        assert m2(*P, t) == pytest.approx(M2_FROZEN[t], rel=1e-9)

    @pytest.mark.parametrize("route", ["convolution", "spectral", "talbot"])
    @pytest.mark.parametrize("t", [0.5, 2.0])
    def test_routes(self, route, t):
        assert m2_time(*P, t, route).value == pytest.approx(M2_FROZEN[t], abs=1e-9)

    def test_series_guard(self):
        with pytest.raises(RouteUnavailable):
            m2_time(*P, 20.0, "exact_series")

    def test_w2_frozen_and_routes(self):
        assert W2(*P, 1.0) == pytest.approx(0.845653837919039, rel=1e-12)
        assert W2(*P, 10.0, "series") == pytest.approx(W2(*P, 10.0, "spectral"), rel=1e-10)

    def test_w2_derivative(self):
        h = 1e-4
        assert (W2(*P, 2.0 + h) - W2(*P, 2.0 - h)) / (2 * h) == pytest.approx(M2_FROZEN[2.0], rel=1e-6)

    def test_lam_zero_reduces(self):
        assert m2(0.5, 0.5, 0.0, 1.0) == pytest.approx(m1_time(1.0), rel=1e-15)

    def test_changes_sign_at_long_times(self):
        # the small-s symbol s^(ag) ln(1/s) forces a negative tail ~ -t^(-ag-1) ln t
        assert m2(*P, 50.0) < 0 < m2(*P, 10.0)


class TestSonnine:
    @pytest.mark.parametrize("kern", [MemoryKernel.distributed(), MemoryKernel.distributed_prabhakar(*P),
                                      MemoryKernel.caputo(0.3)], ids=["k1", "k2", "caputo"])
    @pytest.mark.parametrize("t", [0.01, 1.0, 10.0])
    def test_residual(self, kern, t):
        assert sonnine_residual(kern, t) < 1e-5

    def test_tiny_time(self):
        # k * M = 1 for every t > 0: the singular k keeps the integral at 1 as t -> 0
        assert sonnine_residual(MemoryKernel.distributed(), 1e-8) < 1e-5

    def test_symbols_multiply_to_one_over_s(self):
        kern = MemoryKernel.distributed_prabhakar(0.3, 0.7, 2.0)
        s = 0.4
        assert kernel_laplace(kern, "k").eval(s) * kernel_laplace(kern, "M").eval(s) == pytest.approx(1 / s)


class TestTauberian:
    def test_short_m1(self):
        t = 1e-8
        assert m1_time(t) / tauberian_asymptote("M1", "short")(t) == pytest.approx(1.0, abs=0.05)

    def test_long_k1(self):
        form = tauberian_asymptote("k1", "longtime")
        assert form.regime == "long" and "ln t" in form.description

    @pytest.mark.parametrize("ident,regime", [("k1", "short"), ("k2", "short"), ("M1", "long"), ("M2", "long")])
    def test_inapplicable(self, ident, regime):
        with pytest.raises(Inapplicable):
            tauberian_asymptote(ident, regime)

    def test_unknown(self):
        with pytest.raises(DomainError):
            tauberian_asymptote("zz", "long")
        with pytest.raises(DomainError):
            tauberian_asymptote("k1", "medium")
