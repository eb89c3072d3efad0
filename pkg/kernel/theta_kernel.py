"""
Rescaled Jacobi theta brackets [z;p]_r and their trigonometric limits

[z]_1 = theta_1(alpha z/2; p) / (sin(alpha/2) theta_1'(0; p))
[z]_r = theta_r(alpha z/2; p) / theta_r(0; p),  r = 2, 3, 4

The 2p^{1/4} prefactor of theta_1, theta_2 cancels in every ratio, so only
integer powers of p appear and p <= 0 is regular.
"""
import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union

import numpy as np

from config.config import Config
from utils.errors import DomainError, NumericError, PoleError
from utils.log_signed import LogSigned

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Sign of the 2w cos(2x) term in the product factors 1 + s 2w cos 2x + w^2
_PRODUCT_SIGN = {1: -1.0, 2: 1.0, 3: 1.0, 4: -1.0}


@dataclass(frozen=True)
class ThetaContext:
    """
    Evaluation context for the theta brackets

    Args:
        alpha: period scale, 0 < alpha < 2 pi
        p: nome, -1 < p < 1
        tol: relative truncation tolerance for series and products
        method: 'series', 'product' or 'auto' (series for small |p|)
    """
    alpha: float
    p: float
    tol: float = field(default_factory=lambda: Config.SERIES_TOL)
    method: str = 'auto'

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.p)):
            raise DomainError(f"Non-finite theta context: alpha={self.alpha}, p={self.p}")
        if not (0 < self.alpha < 2 * math.pi):
            raise DomainError(f"alpha must lie in (0, 2pi), got {self.alpha}")
        if not (-1 < self.p < 1):
            raise DomainError(f"Nome must satisfy |p| < 1, got {self.p}")
        if self.tol <= 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.method not in ('auto', 'series', 'product'):
            raise DomainError(f"Unknown theta evaluation method: {self.method}")

    @property
    def use_series(self) -> bool:
        if self.method == 'auto':
            return abs(self.p) <= Config.SERIES_P_CUTOFF
        return self.method == 'series'

    @cached_property
    def half_terms(self) -> int:
        """Number of terms l = 0..L-1 kept in the theta_1, theta_2 series"""
        return self._series_length(lambda l: l * (l + 1), lambda l: 2 * l + 1, start=0)

    @cached_property
    def int_terms(self) -> int:
        """Number of terms l = 1..L kept in the theta_3, theta_4 series"""
        return self._series_length(lambda l: l * l, lambda l: 2 * l, start=1, constant=1.0)

    def _series_length(self, exponent, weight, start: int, constant: float = 0.0) -> int:
        # Stop once the next coefficient (with its derivative weight) drops below
        # tol times the magnitude of the terms already kept
        a = abs(self.p)
        kept = constant
        count = 0
        for l in range(start, start + Config.SERIES_MAX_TERMS):
            term = weight(l) * a ** exponent(l)
            if count and term < self.tol * kept:
                break
            kept += term
            count += 1
        return count

    @cached_property
    def product_factors(self) -> int:
        """Number of factors kept in the product forms"""
        a = abs(self.p)
        if a == 0.0:
            return 0
        count = int(math.ceil(math.log(self.tol) / math.log(a))) + 1
        if count > Config.PRODUCT_MAX_FACTORS:
            logger.warning(f"Product form truncated at {Config.PRODUCT_MAX_FACTORS} factors for p={self.p}")
            count = Config.PRODUCT_MAX_FACTORS
        return count

    @cached_property
    def _half_coeffs(self):
        l = np.arange(self.half_terms)
        return 2 * l + 1, np.power(self.p, l * (l + 1)), np.where(l % 2 == 0, 1.0, -1.0)

    @cached_property
    def _int_coeffs(self):
        l = np.arange(1, self.int_terms + 1)
        return 2 * l, np.power(self.p, l * l), np.where(l % 2 == 0, 1.0, -1.0)

    @cached_property
    def _product_weights(self):
        # w_l = p^{2l} for r = 1, 2 and p^{2l-1} for r = 3, 4
        l = np.arange(1, self.product_factors + 1)
        return np.power(self.p, 2 * l), np.power(self.p, 2 * l - 1)

    @cached_property
    def normalizers(self) -> np.ndarray:
        """Denominators theta_r(0) (theta_1'(0) times sin(alpha/2) for r=1), index 1..4"""
        out = np.empty(5)
        out[0] = np.nan
        if self.use_series:
            k, q, sgn = self._half_coeffs
            out[1] = math.sin(self.alpha / 2) * float(np.sum(sgn * k * q))
            out[2] = float(np.sum(q))
            k2, q2, sgn2 = self._int_coeffs
            out[3] = 1.0 + 2.0 * float(np.sum(q2))
            out[4] = 1.0 + 2.0 * float(np.sum(sgn2 * q2))
        else:
            w_even, w_odd = self._product_weights
            out[1] = math.sin(self.alpha / 2) * math.exp(2 * float(np.sum(np.log1p(-w_even))))
            out[2] = math.exp(2 * float(np.sum(np.log1p(w_even))))
            out[3] = math.exp(2 * float(np.sum(np.log1p(w_odd))))
            out[4] = math.exp(2 * float(np.sum(np.log1p(-w_odd))))
        if np.any(np.abs(out[1:]) < self.tol):
            raise NumericError(f"Theta normalizer underflow at p={self.p}",
                               {'normalizers': out[1:].tolist()})
        return out


def _as_array(z: ArrayLike) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Theta bracket argument must be finite")
    return arr


def _check_index(r: int, allowed=(1, 2, 3, 4)):
    if r not in allowed:
        raise DomainError(f"Theta index must be one of {allowed}, got {r}")


def _series_numerator(ctx: ThetaContext, x: np.ndarray, r: int, derivative: bool) -> np.ndarray:
    """Reduced theta_r series at x (or its x-derivative)"""
    xs = x[..., None]
    if r in (1, 2):
        k, q, sgn = ctx._half_coeffs
        if r == 1:
            terms = sgn * q * (k * np.cos(k * xs) if derivative else np.sin(k * xs))
        else:
            terms = q * (-k * np.sin(k * xs) if derivative else np.cos(k * xs))
        return terms.sum(axis=-1)
    k, q, sgn = ctx._int_coeffs
    coeff = q if r == 3 else sgn * q
    if derivative:
        return -2.0 * (coeff * k * np.sin(k * xs)).sum(axis=-1)
    return 1.0 + 2.0 * (coeff * np.cos(k * xs)).sum(axis=-1)


def _product_terms(ctx: ThetaContext, x: np.ndarray, r: int):
    w_even, w_odd = ctx._product_weights
    w = w_even if r in (1, 2) else w_odd
    s = _PRODUCT_SIGN[r]
    c2 = np.cos(2 * x)[..., None]
    return w, s, c2


def _product_numerator(ctx: ThetaContext, x: np.ndarray, r: int) -> np.ndarray:
    w, s, c2 = _product_terms(ctx, x, r)
    body = np.exp(np.sum(np.log1p(s * 2 * w * c2 + w * w), axis=-1)) if w.size else np.ones_like(x)
    if r == 1:
        return np.sin(x) * body
    if r == 2:
        return np.cos(x) * body
    return body


def _product_log_derivative(ctx: ThetaContext, x: np.ndarray, r: int) -> np.ndarray:
    """d/dx log of the product form"""
    w, s, c2 = _product_terms(ctx, x, r)
    s2 = np.sin(2 * x)[..., None]
    total = np.sum(-4 * s * w * s2 / (1 + s * 2 * w * c2 + w * w), axis=-1) if w.size else np.zeros_like(x)
    if r == 1:
        total = total + np.cos(x) / np.sin(x)
    elif r == 2:
        total = total - np.tan(x)
    return total


def bracket(ctx: ThetaContext, z: ArrayLike, r: int) -> ArrayLike:
    """
    Evaluate [z;p]_r

    Args:
        ctx: theta context
        z: real argument (scalar or array)
        r: bracket index 1..4

    Returns:
        Value(s) of the rescaled theta bracket, same shape as z
    """
    _check_index(r)
    zz = _as_array(z)
    x = ctx.alpha * zz / 2
    if ctx.use_series:
        numerator = _series_numerator(ctx, x, r, derivative=False)
    else:
        numerator = _product_numerator(ctx, x, r)
    value = numerator / ctx.normalizers[r]
    return float(value) if np.ndim(value) == 0 else value


def bracket_log_deriv(ctx: ThetaContext, z: ArrayLike, r: int) -> ArrayLike:
    """
    Logarithmic derivative [z]'_r / [z]_r with respect to z

    Raises:
        PoleError: if [z]_r vanishes at (any of) the requested points
    """
    _check_index(r)
    zz = _as_array(z)
    if np.any(on_real_zero(ctx, zz, r)):
        raise PoleError(f"Log-derivative of [z]_{r} requested at a zero (z={zz})")
    x = ctx.alpha * zz / 2
    if ctx.use_series:
        value = _series_numerator(ctx, x, r, derivative=True) / _series_numerator(ctx, x, r, derivative=False)
    else:
        value = _product_log_derivative(ctx, x, r)
    value = (ctx.alpha / 2) * value
    return float(value) if np.ndim(value) == 0 else value


def bracket_prime_at_zero(ctx: ThetaContext) -> float:
    """d/dz [z]_1 at z = 0; equals alpha / (2 sin(alpha/2)) for every p"""
    return ctx.alpha / (2 * math.sin(ctx.alpha / 2))


def on_real_zero(ctx: ThetaContext, z: ArrayLike, r: int, tol: float = None) -> np.ndarray:
    """
    Whether z lies (within tol) on a real zero of [z]_r

    [z]_1 vanishes on (2pi/alpha)Z, [z]_2 on pi/alpha + (2pi/alpha)Z;
    [z]_3 and [z]_4 have no real zeros for real p.
    """
    if tol is None:
        tol = Config.POLE_TOL
    zz = np.asarray(z, dtype=float)
    if r in (3, 4):
        return np.zeros(zz.shape, dtype=bool)
    t = zz * ctx.alpha / (2 * math.pi)
    if r == 2:
        t = t - 0.5
    return np.abs(t - np.round(t)) < tol


def shifted_factorial(ctx: ThetaContext, zs: Iterable[float], r: int, l: int) -> LogSigned:
    """
    Elliptic shifted factorial [z_1, ..., z_N]_{r,l} = prod_j prod_{k<l} [z_j + k]_r

    Returns:
        The product in LogSigned form ([.]_{r,0} = 1)
    """
    if l < 0:
        raise DomainError(f"Factorial length must be nonnegative, got {l}")
    zs = np.atleast_1d(np.asarray(list(zs), dtype=float))
    if l == 0 or zs.size == 0:
        return LogSigned.one()
    args = (zs[:, None] + np.arange(l)[None, :]).ravel()
    return LogSigned.from_array(np.atleast_1d(bracket(ctx, args, r)))


def q_bracket(alpha: float, z: ArrayLike, r: int) -> ArrayLike:
    """Trigonometric brackets [z]_{1,q} = sin(alpha z/2)/sin(alpha/2), [z]_{2,q} = cos(alpha z/2)"""
    _check_index(r, allowed=(1, 2))
    zz = np.asarray(z, dtype=float)
    if r == 1:
        value = np.sin(alpha * zz / 2) / math.sin(alpha / 2)
    else:
        value = np.cos(alpha * zz / 2)
    return float(value) if np.ndim(value) == 0 else value


def q_shifted_factorial(alpha: float, zs: Iterable[float], r: int, l: int) -> LogSigned:
    """Trigonometric counterpart of shifted_factorial"""
    if l < 0:
        raise DomainError(f"Factorial length must be nonnegative, got {l}")
    zs = np.atleast_1d(np.asarray(list(zs), dtype=float))
    if l == 0 or zs.size == 0:
        return LogSigned.one()
    args = (zs[:, None] + np.arange(l)[None, :]).ravel()
    return LogSigned.from_array(np.atleast_1d(q_bracket(alpha, args, r)))
