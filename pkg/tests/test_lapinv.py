import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ultraslow.errors import DomainError, NonConvergence, SingularSample
from ultraslow.kernels import MemoryKernel, k1
from ultraslow.lapinv import (
    IltConfig,
    gaver_stehfest,
    ilt,
    laplace_fn,
    make_kernel_laplace,
    ratio_w_log,
    shifted_talbot,
    talbot_vector,
)
from ultraslow.volterra import VPArgs, vp_epsilon

EXP = laplace_fn(lambda s: 1 / (s + 1), name="exp")


class TestEngines:
    @given(st.floats(0.2, 3.0))
    def test_gs_exponential(self, t):
        # 28 terms are needed for 1e-6; 16 terms give ~1e-5
        assert gaver_stehfest(EXP, t, 28).value == pytest.approx(math.exp(-t), abs=1e-6)

    def test_gs_default_accuracy(self):
        assert gaver_stehfest(EXP, 1.0).value == pytest.approx(math.exp(-1), abs=5e-5)

    @given(st.floats(0.1, 10.0))
    def test_talbot_exponential(self, t):
        assert shifted_talbot(EXP, t).value == pytest.approx(math.exp(-t), abs=1e-10)

    def test_talbot_vector_matches_scalar(self):
        ts = np.array([0.3, 1.0, 4.0])
        got = talbot_vector(lambda s: 1 / (s + 1), ts)
        np.testing.assert_allclose(got, np.exp(-ts), atol=1e-10)

    def test_talbot_shift_for_pole(self):
        f = laplace_fn(lambda s: 1 / (s - 1), abscissa=1.0)
        assert shifted_talbot(f, 2.0).value == pytest.approx(math.exp(2.0), rel=1e-9)
        assert shifted_talbot(f, 2.0, dps=30).value == pytest.approx(math.exp(2.0), rel=1e-9)

    def test_gs_refuses_positive_abscissa(self):
        f = laplace_fn(lambda s: 1 / (s - 1), abscissa=1.0)
        with pytest.raises(SingularSample):
            gaver_stehfest(f, 1.0)

    def test_talbot_shift_guard(self):
        f = laplace_fn(lambda s: 1 / (s - 1), abscissa=1.0)
        with pytest.raises(DomainError):
            shifted_talbot(f, 1.0, shift=0.5)

    def test_ilt_raises_when_tolerance_missed(self):
        with pytest.raises(NonConvergence):
            ilt(EXP, 1.0, IltConfig(gs_terms=8, tol=1e-12))
        r = ilt(EXP, 1.0, IltConfig(gs_terms=8, tol=1e-12, raise_on_failure=False))
        assert not r.converged

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IltConfig(method="euler")
        with pytest.raises(ValueError):
            IltConfig(gs_terms=7)


class TestSymbols:
    def test_ratio_patch_continuity(self):
        for w in (1e-3 * 0.999, 1e-3 * 1.001):
            s = 1.0 + w
            assert ratio_w_log(s) == pytest.approx(w / math.log(s), rel=1e-13)
        assert ratio_w_log(1.0) == 1.0
        assert float(ratio_w_log(mp.mpf(1))) == 1.0
        np.testing.assert_allclose(ratio_w_log(np.array([1.0, 2.0])), [1.0, 1.0 / math.log(2.0)])

    @given(st.floats(0.05, 50.0))
    def test_sonnine_symbols(self, s):
        for kern in (MemoryKernel.distributed(), MemoryKernel.distributed_prabhakar(0.5, 0.5, 1.0)):
            k = make_kernel_laplace(kern, "k").eval(s)
            m = make_kernel_laplace(kern, "M").eval(s)
            assert k * m == pytest.approx(1 / s, rel=1e-12)

    def test_psi_and_msd(self):
        kern = MemoryKernel.distributed(B=2.0)
        s = 3.0
        assert make_kernel_laplace(kern, "psi").eval(s) == pytest.approx(s * make_kernel_laplace(kern, "k").eval(s))
        assert make_kernel_laplace(kern, "msd").eval(s) == pytest.approx(4 * make_kernel_laplace(kern, "M").eval(s) / s ** 2)

    def test_unknown_symbol(self):
        with pytest.raises(DomainError):
            make_kernel_laplace(MemoryKernel.distributed(), "q")

    def test_eval_left_of_abscissa(self):
        with pytest.raises(DomainError):
            laplace_fn(lambda s: 1 / (s - 1), abscissa=1.0).eval(0.5)


class TestRoundTrips:
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_k1(self, t):
        f = make_kernel_laplace(MemoryKernel.distributed(), "k")
        assert shifted_talbot(f, t).value == pytest.approx(k1(t), rel=1e-5)
        assert gaver_stehfest(f, t, 20).value == pytest.approx(k1(t), rel=1e-5)

    @pytest.mark.parametrize("a,g,p,t", [(0.4, 0.8, 0.32, 1.0), (0.5, 0.5, 0.0, 2.0), (0.7, 1.5, 0.3, 0.5)])
    def test_volterra_prabhakar_transform(self, a, g, p, t):
        f = laplace_fn(lambda s: s ** (a * g - p - 1) / ((s ** a + 1) ** g * np.log(s)), abscissa=1.0)
        assert shifted_talbot(f, t, 48).value == pytest.approx(vp_epsilon(VPArgs.of(a, g, 1.0, p), t).value, abs=1e-4)
