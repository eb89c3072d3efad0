"""
Tests for the theta brackets and the sign / log-magnitude helper
"""
import math

import mpmath
import numpy as np
import pytest

from kernel.theta_kernel import (
    ThetaContext, bracket, bracket_log_deriv, bracket_prime_at_zero, on_real_zero,
    q_bracket, q_shifted_factorial, shifted_factorial,
)
from utils.errors import DomainError, PoleError
from utils.log_signed import LogSigned

ALPHA = 0.9


def mp_bracket(alpha: float, p: float, z: float, r: int) -> float:
    """Reference value from mpmath's Jacobi theta functions (nome p)"""
    with mpmath.workdps(40):
        x = mpmath.mpf(alpha) * z / 2
        if r == 1:
            value = mpmath.jtheta(1, x, p) / (mpmath.sin(mpmath.mpf(alpha) / 2) * mpmath.jtheta(1, 0, p, 1))
        else:
            value = mpmath.jtheta(r, x, p) / mpmath.jtheta(r, 0, p)
        return float(value)


class TestThetaContext:
    def test_rejects_alpha_outside_period(self):
        with pytest.raises(DomainError):
            ThetaContext(alpha=0.0, p=0.1)
        with pytest.raises(DomainError):
            ThetaContext(alpha=7.0, p=0.1)

    def test_rejects_nome_outside_disc(self):
        with pytest.raises(DomainError):
            ThetaContext(alpha=ALPHA, p=1.0)
        with pytest.raises(DomainError):
            ThetaContext(alpha=ALPHA, p=float('nan'))

    def test_rejects_unknown_method(self):
        with pytest.raises(DomainError):
            ThetaContext(alpha=ALPHA, p=0.1, method='fourier')

    def test_auto_switches_to_product_for_large_nome(self):
        assert ThetaContext(alpha=ALPHA, p=0.2).use_series
        assert not ThetaContext(alpha=ALPHA, p=0.8).use_series

    def test_series_stop_is_relative(self):
        # at p = 0.45 the l = 4 term is ~1.04e-6: below 1e-6 times the kept sum, above 1e-6 itself
        ctx = ThetaContext(alpha=ALPHA, p=0.45, tol=1e-6)
        assert ctx.half_terms == 4
        terms = [(2 * l + 1) * 0.45 ** (l * (l + 1)) for l in range(5)]
        assert terms[4] > 1e-6
        assert terms[4] < 1e-6 * sum(terms[:4])

    def test_series_length_at_zero_nome(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.0)
        assert ctx.half_terms == 1
        assert ctx.int_terms == 1

    def test_bad_index(self):
        with pytest.raises(DomainError):
            bracket(ThetaContext(alpha=ALPHA, p=0.1), 0.3, 5)


class TestBracketValues:
    @pytest.mark.parametrize("p", [0.05, 0.3, 0.7])
    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_against_mpmath(self, p, r):
        ctx = ThetaContext(alpha=ALPHA, p=p)
        for z in (0.3, 1.1, 2.45, -1.7):
            expected = mp_bracket(ALPHA, p, z, r)
            assert bracket(ctx, z, r) == pytest.approx(expected, rel=1e-11, abs=1e-13)

    @pytest.mark.parametrize("p", [-0.6, -0.2, 0.0, 0.4, 0.85])
    def test_normalization(self, p):
        ctx = ThetaContext(alpha=ALPHA, p=p)
        assert bracket(ctx, 0.0, 1) == 0.0
        for r in (2, 3, 4):
            assert bracket(ctx, 0.0, r) == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("p", [-0.45, 0.3, 0.8])
    def test_parity(self, p):
        ctx = ThetaContext(alpha=ALPHA, p=p)
        z = np.linspace(-3.0, 3.0, 41)
        np.testing.assert_allclose(bracket(ctx, -z, 1), -bracket(ctx, z, 1), atol=1e-13)
        for r in (2, 3, 4):
            np.testing.assert_allclose(bracket(ctx, -z, r), bracket(ctx, z, r), atol=1e-13)

    @pytest.mark.parametrize("p", [-0.45, -0.1, 0.25, 0.5])
    def test_series_matches_product(self, p):
        series = ThetaContext(alpha=ALPHA, p=p, method='series')
        product = ThetaContext(alpha=ALPHA, p=p, method='product')
        z = np.linspace(-2.5, 2.5, 23)
        for r in range(1, 5):
            np.testing.assert_allclose(bracket(series, z, r), bracket(product, z, r), rtol=1e-12, atol=1e-13)

    def test_array_shape_is_kept(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.2)
        z = np.arange(6, dtype=float).reshape(2, 3) / 4
        assert bracket(ctx, z, 3).shape == (2, 3)
        assert isinstance(bracket(ctx, 0.5, 3), float)

    def test_non_finite_argument(self):
        with pytest.raises(DomainError):
            bracket(ThetaContext(alpha=ALPHA, p=0.2), float('inf'), 1)


class TestIdentities:
    @pytest.fixture
    def samples(self):
        rng = np.random.default_rng(7)
        return zip(rng.uniform(-3.0, 3.0, 1000), rng.uniform(-0.9, 0.9, 1000), rng.uniform(0.1, 3.0, 1000))

    def test_duplication(self, samples):
        worst = 0.0
        for z, p, alpha in samples:
            ctx = ThetaContext(alpha=float(alpha), p=float(p))
            doubled = bracket(ctx, 2 * z, 1)
            product = 2 * np.prod([bracket(ctx, z, r) for r in range(1, 5)])
            worst = max(worst, abs(doubled - product) / max(1.0, abs(doubled)))
        assert worst < 1e-12

    def test_parity_over_nome_and_period(self, samples):
        worst = 0.0
        for z, p, alpha in samples:
            ctx = ThetaContext(alpha=float(alpha), p=float(p))
            odd = bracket(ctx, z, 1)
            worst = max(worst, abs(bracket(ctx, -z, 1) + odd) / max(1.0, abs(odd)))
            for r in (2, 3, 4):
                value = bracket(ctx, z, r)
                worst = max(worst, abs(bracket(ctx, -z, r) - value) / max(1.0, abs(value)))
        assert worst < 1e-12

    def test_duplication_at_one_point_against_mpmath(self):
        lhs = mp_bracket(ALPHA, 0.6, 2.6, 1)
        rhs = 2 * math.prod(mp_bracket(ALPHA, 0.6, 1.3, r) for r in range(1, 5))
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestTrigonometricLimit:
    def test_brackets_reduce_at_zero_nome(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.0)
        z = np.linspace(-2.0, 2.0, 17)
        np.testing.assert_allclose(bracket(ctx, z, 1), q_bracket(ALPHA, z, 1), atol=1e-14)
        np.testing.assert_allclose(bracket(ctx, z, 2), q_bracket(ALPHA, z, 2), atol=1e-14)
        np.testing.assert_allclose(bracket(ctx, z, 3), 1.0, atol=1e-14)
        np.testing.assert_allclose(bracket(ctx, z, 4), 1.0, atol=1e-14)

    def test_q_bracket_index_range(self):
        with pytest.raises(DomainError):
            q_bracket(ALPHA, 0.3, 3)


class TestDerivatives:
    @pytest.mark.parametrize("p", [0.0, 0.3, 0.75])
    def test_prime_at_zero(self, p):
        ctx = ThetaContext(alpha=ALPHA, p=p)
        step = 1e-6
        numeric = (bracket(ctx, step, 1) - bracket(ctx, -step, 1)) / (2 * step)
        assert bracket_prime_at_zero(ctx) == pytest.approx(numeric, rel=1e-8)
        assert bracket_prime_at_zero(ctx) == pytest.approx(ALPHA / (2 * math.sin(ALPHA / 2)))

    @pytest.mark.parametrize("p", [0.2, 0.7])
    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_log_derivative(self, p, r):
        ctx = ThetaContext(alpha=ALPHA, p=p)
        z, step = 0.8, 1e-6
        numeric = (math.log(abs(bracket(ctx, z + step, r))) - math.log(abs(bracket(ctx, z - step, r)))) / (2 * step)
        assert bracket_log_deriv(ctx, z, r) == pytest.approx(numeric, rel=1e-7, abs=1e-9)

    def test_log_derivative_at_zero_raises(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.2)
        with pytest.raises(PoleError):
            bracket_log_deriv(ctx, 0.0, 1)


class TestZerosAndFactorials:
    def test_real_zeros(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.3)
        period = 2 * math.pi / ALPHA
        assert on_real_zero(ctx, period, 1)
        assert on_real_zero(ctx, -period, 1)
        assert on_real_zero(ctx, period / 2, 2)
        assert not on_real_zero(ctx, period / 2, 1)
        assert not on_real_zero(ctx, 0.0, 3).any()
        assert abs(bracket(ctx, period, 1)) < 1e-12

    def test_shifted_factorial_is_a_product(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.4)
        value = shifted_factorial(ctx, [0.3, 1.2], 2, 3)
        expected = np.prod([bracket(ctx, z + k, 2) for z in (0.3, 1.2) for k in range(3)])
        assert value.to_float() == pytest.approx(expected, rel=1e-13)

    def test_empty_factorial(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.4)
        assert shifted_factorial(ctx, [0.3], 1, 0) == LogSigned.one()
        assert q_shifted_factorial(ALPHA, [0.3], 1, 0) == LogSigned.one()
        with pytest.raises(DomainError):
            shifted_factorial(ctx, [0.3], 1, -1)

    def test_factorial_through_zero(self):
        ctx = ThetaContext(alpha=ALPHA, p=0.4)
        assert shifted_factorial(ctx, [-1.0], 1, 3).sign == 0


class TestLogSigned:
    def test_product_keeps_sign(self):
        value = LogSigned.from_array([-2.0, 3.0, -0.5])
        assert value.sign == 1
        assert value.to_float() == pytest.approx(3.0)

    def test_zero_factor(self):
        assert LogSigned.from_array([1.0, 0.0, 5.0]).sign == 0
        assert LogSigned.from_array([]) == LogSigned.one()

    def test_ratio_and_inverse(self):
        value = LogSigned.ratio([6.0, -1.0], [3.0])
        assert value.to_float() == pytest.approx(-2.0)
        assert value.inverse().to_float() == pytest.approx(-0.5)

    def test_power_and_sqrt(self):
        value = LogSigned.from_float(-3.0)
        assert (value ** 2).to_float() == pytest.approx(9.0)
        assert (value ** 3).to_float() == pytest.approx(-27.0)
        assert LogSigned.from_float(16.0).sqrt().to_float() == pytest.approx(4.0)
        with pytest.raises(DomainError):
            value.sqrt()

    def test_no_overflow_for_long_products(self):
        value = LogSigned.from_array(np.full(400, 1e300))
        assert value.logmag == pytest.approx(400 * 300 * math.log(10))
        assert (value / value).to_float() == pytest.approx(1.0)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            LogSigned.one() / LogSigned.zero()

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            LogSigned.from_float(float('nan'))
        with pytest.raises(DomainError):
            LogSigned(2, 0.0)

    def test_is_close(self):
        assert LogSigned.from_float(2.0).is_close(LogSigned.from_float(2.0 * (1 + 1e-14)))
        assert not LogSigned.from_float(2.0).is_close(LogSigned.from_float(-2.0))
