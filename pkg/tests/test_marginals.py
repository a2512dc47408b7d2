import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from zibayes.errors import DomainError
from zibayes.marginals import (
    MarginalResult,
    log_marginal,
    log_marginal_nb,
    log_marginal_poisson,
    log_marginal_zinb,
    log_marginal_zip,
)
from zibayes.modes import Mode
from zibayes.oracles import QuadConfig, inflation_integral, quad_log_marginal
from zibayes.stats import (
    CountSample,
    Family,
    NBParams,
    PoissonParams,
    ZINBParams,
    ZIPParams,
    compute_suff_stats,
    log_likelihood,
    per_value_gamma_sum,
)


def stats_of(ys):
    return compute_suff_stats(CountSample.of(ys))


def brute_force_2d(family, ys, gamma=1.0):
    """Marginal by 2-D quadrature over (alpha, base parameter) with scipy.

    The base parameter is integrated on the log scale, u = log(theta) or
    log(kappa), so the Jeffreys density picks up a factor exp(u).
    """
    s = CountSample.of(ys)

    def integrand(a, u):
        x = math.exp(u)
        if family is Family.ZIP:
            ll = log_likelihood(ZIPParams(a, x), s)
            lp = -0.5 * u
        else:
            ll = log_likelihood(ZINBParams(a, gamma, x), s)
            lp = 0.5 * (math.log(gamma) - u - math.log(gamma + x))
        return math.exp(ll + lp + u)

    val, _ = integrate.dblquad(integrand, -40, 40, 0, 1, epsabs=1e-13, epsrel=1e-10)
    return math.log(val)


class TestPoisson:
    def test_values(self):
        assert log_marginal_poisson(stats_of([0])).log_marginal == pytest.approx(0.5723649, abs=1e-7)
        ref = math.lgamma(3.5) - 3.5 * math.log(2) - math.log(2)
        assert log_marginal_poisson(stats_of([1, 2])).log_marginal == pytest.approx(ref, rel=1e-14)
        assert ref == pytest.approx(-1.91819, abs=1e-5)
        assert log_marginal_poisson(stats_of([0, 0])).log_marginal == pytest.approx(0.22579, abs=1e-5)

    def test_quadrature_agreement(self):
        assert quad_log_marginal(Family.POISSON, CountSample.of([1, 2])) == pytest.approx(-1.91819, abs=1e-5)


class TestZIP:
    def test_all_zero_sentinel(self):
        r = log_marginal_zip(stats_of([0]))
        assert r.log_marginal == math.inf and r.degenerate_all_zero
        assert math.isfinite(r.finite_part) or r.finite_part == -math.inf
        assert quad_log_marginal(Family.ZIP, CountSample.of([0])) == math.inf

    def test_no_zero_single_term(self):
        ref = math.log(2 * math.gamma(2.5) * 2**-2.5 / 6)
        assert log_marginal_zip(stats_of([1, 1])).log_marginal == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("ys", [[0, 1], [0, 0, 3], [2, 0, 1, 0]])
    def test_against_2d_quadrature(self, ys):
        assert log_marginal_zip(stats_of(ys)).log_marginal == pytest.approx(
            brute_force_2d(Family.ZIP, ys), rel=1e-7, abs=1e-8
        )


class TestNB:
    def test_single_zero(self):
        # int (1+k)^-1 (k(1+k))^-1/2 dk = B(1/2, 1) = 2
        r = log_marginal_nb(stats_of([0]), 0.0, 1.0)
        assert r.log_marginal == pytest.approx(math.log(2), rel=1e-14)
        direct, _ = integrate.quad(lambda k: (1 + k) ** -1 * (k * (1 + k)) ** -0.5, 0, np.inf)
        assert r.log_marginal == pytest.approx(math.log(direct), rel=1e-9)
        assert quad_log_marginal(Family.NB, CountSample.of([0]), 1.0) == pytest.approx(math.log(2), rel=1e-8)

    def test_pinned_by_quadrature(self):
        s = CountSample.of([1, 2])
        ref = quad_log_marginal(Family.NB, s, 1.001, QuadConfig(abs_tol=1e-12, rel_tol=1e-10))
        assert log_marginal(Family.NB, s, 1.001).log_marginal == pytest.approx(ref, rel=1e-6)

    def test_transforms_agree(self):
        s = CountSample.of([0, 3, 1, 4])
        a = quad_log_marginal(Family.NB, s, 0.5, QuadConfig(transform="log"))
        b = quad_log_marginal(Family.NB, s, 0.5, QuadConfig(transform="beta"))
        assert a == pytest.approx(b, rel=1e-8)

    def test_modes_agree_when_exponent_irrelevant(self):
        st_ = stats_of([0])
        a = log_marginal_nb(st_, 0.0, 1.0, Mode.ORACLE_VALIDATED).log_marginal
        b = log_marginal_nb(st_, 0.0, 1.0, Mode.PAPER_LITERAL).log_marginal
        assert a == pytest.approx(b, rel=1e-15)

    def test_modes_differ_in_general(self):
        s = CountSample.of([2, 3, 0])
        a = log_marginal(Family.NB, s, 0.5, Mode.ORACLE_VALIDATED).log_marginal
        b = log_marginal(Family.NB, s, 0.5, Mode.PAPER_LITERAL).log_marginal
        assert abs(a - b) > 1e-3

    def test_gamma_domain(self):
        with pytest.raises(DomainError):
            log_marginal(Family.NB, CountSample.of([1]), 0.0)


class TestZINB:
    def test_pinned_by_quadrature(self):
        s = CountSample.of([0, 1])
        for method in ("gauss", "nested"):
            ref = quad_log_marginal(Family.ZINB, s, 1.001, QuadConfig(alpha_method=method))
            assert log_marginal(Family.ZINB, s, 1.001).log_marginal == pytest.approx(ref, rel=1e-5)

    @pytest.mark.parametrize("ys,g", [([0, 1], 1.0), ([0, 2, 0], 0.5)])
    def test_against_2d_quadrature(self, ys, g):
        assert log_marginal(Family.ZINB, CountSample.of(ys), g).log_marginal == pytest.approx(
            brute_force_2d(Family.ZINB, ys, g), rel=1e-7, abs=1e-8
        )

    @given(st.lists(st.integers(1, 9), min_size=1, max_size=12), st.floats(0.2, 5.0))
    @settings(max_examples=50, deadline=None)
    def test_no_zero_relation_to_nb(self, ys, g):
        # single j = 0 term: w!/(n+1)! * n! = 1/(n+1)
        s = CountSample.of(ys)
        for mode in Mode:
            zinb = log_marginal(Family.ZINB, s, g, mode).log_marginal
            nb = log_marginal(Family.NB, s, g, mode).log_marginal
            assert zinb - nb == pytest.approx(-math.log(len(ys) + 1), rel=1e-9, abs=1e-9)

    def test_all_zero_sentinel(self):
        r = log_marginal(Family.ZINB, CountSample.of([0, 0, 0]), 1.001)
        assert r.log_marginal == math.inf and r.degenerate_all_zero
        assert math.isfinite(r.value)
        assert quad_log_marginal(Family.ZINB, CountSample.of([0, 0, 0]), 1.001) == math.inf


class TestInflationIntegral:
    @pytest.mark.parametrize("w", range(6))
    @pytest.mark.parametrize("p0", [0.1, 0.5, 0.9])
    def test_matches_brute_force(self, w, p0):
        ref, _ = integrate.quad(lambda a: (a + (1 - a) * p0) ** w, 0, 1, epsabs=1e-14)
        exact = (1 - p0 ** (w + 1)) / ((w + 1) * (1 - p0))
        assert ref == pytest.approx(exact, rel=1e-12)
        for method in ("gauss", "nested"):
            assert inflation_integral(w, p0, method=method) == pytest.approx(ref, rel=1e-10)


class TestMarginalResult:
    def test_inf_only_for_zero_inflated(self):
        with pytest.raises(ValueError):
            MarginalResult(math.inf, Family.NB, Mode.ORACLE_VALIDATED)

    def test_value_property(self):
        r = MarginalResult(math.inf, Family.ZIP, Mode.ORACLE_VALIDATED, True, -1.5)
        assert r.value == -1.5
        assert MarginalResult(-2.0, Family.POISSON, Mode.ORACLE_VALIDATED).value == -2.0
