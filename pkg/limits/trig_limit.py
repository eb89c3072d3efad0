"""
Closed forms at p = 0: spectrum, dual couplings, C_{lambda,q}, Delta_{lambda,q} and N_{nu,q}
"""
import cmath
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from kernel.theta_kernel import q_bracket, q_shifted_factorial
from lattice.partition_lattice import Partition, PartitionLattice
from model.coefficients import PERMUTATIONS
from model.couplings import CouplingParams
from utils.errors import DomainError
from utils.log_signed import LogSigned

logger = logging.getLogger(__name__)

# Half-Hadamard reflection acting on (g1, g2, g1', g2')
REFLECTION = 0.5 * np.array([
    [1, 1, 1, 1],
    [1, 1, -1, -1],
    [1, -1, 1, -1],
    [1, -1, -1, 1],
], dtype=float)


@dataclass(frozen=True)
class DualCouplings:
    """(g1^, g2^, g1'^, g2'^) obtained from (g1, g2, g1', g2') by the reflection"""
    g_hat: Tuple[float, float, float, float]

    @property
    def g1(self) -> float:
        return self.g_hat[0]

    @property
    def g2(self) -> float:
        return self.g_hat[1]

    @property
    def gp1(self) -> float:
        return self.g_hat[2]

    @property
    def gp2(self) -> float:
        return self.g_hat[3]

    def km_parameters(self, alpha: float, g: float) -> Dict[str, complex]:
        """Koornwinder-Macdonald parameters (q, t, a, b, c, d) with q = exp(i alpha)"""
        def qpow(x: float) -> complex:
            return cmath.exp(1j * alpha * x)

        return {
            'q': qpow(1.0),
            't': qpow(g),
            'a': qpow(self.g1),
            'b': -qpow(self.g2),
            'c': qpow(self.gp1 + 0.5),
            'd': -qpow(self.gp2 + 0.5),
        }


def reflect(values: Sequence[float]) -> Tuple[float, float, float, float]:
    return tuple(float(x) for x in REFLECTION @ np.asarray(values, dtype=float))


def dual_couplings(params: CouplingParams) -> DualCouplings:
    return DualCouplings(g_hat=reflect((params.g1, params.g2, params.gp1, params.gp2)))


def eigenvalue_p0(params: CouplingParams, nu: Partition) -> float:
    """E_nu at p=0: 2 sum_j cos(alpha (rho^_j + nu_j))"""
    x = params.rho_hat + np.asarray(nu, dtype=float)
    return float(2.0 * np.sum(np.cos(params.alpha * x)))


def spectrum_p0(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> np.ndarray:
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    return np.array([eigenvalue_p0(params, nu) for nu in lattice])


def row_sum_constant(params: CouplingParams) -> float:
    """The constant c with A_lambda + sum B_{lambda, eps j} = c at p=0"""
    return eigenvalue_p0(params, tuple([0] * params.n))


def _pairs(n: int):
    for j in range(n):
        for k in range(j + 1, n):
            for delta in (1, -1):
                yield j, k, delta


def _delta_q(alpha: float, rho: np.ndarray, g: float, g_r: Sequence[float], gp_r: Sequence[float],
             lam: Partition) -> LogSigned:
    """Trigonometric weight with brackets r = 1, 2 only"""
    total = LogSigned.one()
    for j, l in enumerate(lam):
        if l == 0:
            continue
        total = total * LogSigned.ratio([q_bracket(alpha, 2 * rho[j] + 2 * l, 1)],
                                        [q_bracket(alpha, 2 * rho[j], 1)])
        for r in (1, 2):
            num = q_shifted_factorial(alpha, [rho[j] + g_r[r - 1], rho[j] + gp_r[r - 1] + 0.5], r, l)
            den = q_shifted_factorial(alpha, [rho[j] + 1 - g_r[r - 1], rho[j] - gp_r[r - 1] + 0.5], r, l)
            total = total * num / den
    for j, k, delta in _pairs(len(lam)):
        l = lam[j] + delta * lam[k]
        if l == 0:
            continue
        x = rho[j] + delta * rho[k]
        total = total * LogSigned.ratio([q_bracket(alpha, x + l, 1)], [q_bracket(alpha, x, 1)])
        total = total * q_shifted_factorial(alpha, [x + g], 1, l) / q_shifted_factorial(alpha, [x + 1 - g], 1, l)
    return total


def _c_q(alpha: float, rho: np.ndarray, g: float, g_r: Sequence[float], gp_r: Sequence[float],
         lam: Partition) -> LogSigned:
    total = LogSigned.one()
    for j, l in enumerate(lam):
        for r in (1, 2):
            total = total * q_shifted_factorial(alpha, [rho[j], rho[j] + 0.5], r, l) \
                / q_shifted_factorial(alpha, [rho[j] + g_r[r - 1], rho[j] + gp_r[r - 1] + 0.5], r, l)
    for j, k, delta in _pairs(len(lam)):
        l = lam[j] + delta * lam[k]
        x = rho[j] + delta * rho[k]
        total = total * q_shifted_factorial(alpha, [x], 1, l) / q_shifted_factorial(alpha, [x + g], 1, l)
    return total


def delta_lambda_q(params: CouplingParams, lam: Partition) -> LogSigned:
    """Delta_{lambda,q}, the p=0 value of the weight"""
    return _delta_q(params.alpha, params.rho, params.g, params.g_r, params.gp_r, lam)


def c_lambda_q(params: CouplingParams, lam: Partition) -> LogSigned:
    """C_{lambda,q} turning monic polynomials into eigenfunction values"""
    return _c_q(params.alpha, params.rho, params.g, params.g_r, params.gp_r, lam)


def _dual_arguments(params: CouplingParams):
    dual = dual_couplings(params)
    return params.rho_hat, (dual.g1, dual.g2), (dual.gp1, dual.gp2)


def dual_delta_q(params: CouplingParams, nu: Partition) -> LogSigned:
    """Delta_{nu,q} with (rho, g_r, g'_r) replaced by their duals"""
    rho_hat, g_hat, gp_hat = _dual_arguments(params)
    return _delta_q(params.alpha, rho_hat, params.g, g_hat, gp_hat, nu)


def dual_c_q(params: CouplingParams, nu: Partition) -> LogSigned:
    rho_hat, g_hat, gp_hat = _dual_arguments(params)
    return _c_q(params.alpha, rho_hat, params.g, g_hat, gp_hat, nu)


def product_is_exact(params: CouplingParams) -> bool:
    return params.n == 1 or params.m == 1


def total_mass_product(params: CouplingParams) -> float:
    """
    One-body product for N_{0,q}, exact only when n = 1 or m = 1:
    prod_j [g2 - rho_j, rho^_j - g2^]_{2,q,m} / [rho_j - g2' + 1/2, rho^_j - g2'^ + 1/2]_{2,q,m}
    """
    if not product_is_exact(params):
        raise DomainError(f"One-body mass product needs n = 1 or m = 1, got n={params.n}, m={params.m}")
    dual = dual_couplings(params)
    alpha, m = params.alpha, params.m
    total = LogSigned.one()
    for rho_j, rho_hat_j in zip(params.rho, params.rho_hat):
        num = q_shifted_factorial(alpha, [params.g2 - rho_j, rho_hat_j - dual.g2], 2, m)
        den = q_shifted_factorial(alpha, [rho_j - params.gp2 + 0.5, rho_hat_j - dual.gp2 + 0.5], 2, m)
        total = total * num / den
    return total.to_float()


def total_mass(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> float:
    """N_{0,q} = sum_lambda Delta_{lambda,q}"""
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    return float(sum(delta_lambda_q(params, lam).to_float() for lam in lattice))


def total_dual_mass(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> float:
    """sum_nu Delta^_{nu,q}, equal to N_{0,q}"""
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    return float(sum(dual_delta_q(params, nu).to_float() for nu in lattice))


def norm_constant(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> float:
    """N_{0,q}: the one-body product where it is exact, the lattice sum otherwise"""
    if product_is_exact(params):
        return total_mass_product(params)
    return total_mass(params, lattice)


def norm_product_nq(params: CouplingParams, nu: Partition) -> float:
    """
    N_{nu,q} = N_{0,q} over the dual weight at nu

    Args:
        params: couplings (p is ignored)
        nu: spectral label

    Returns:
        N_{nu,q} > 0 with h^(nu)_0 = 1 / N_{nu,q} at p=0
    """
    return norm_constant(params) / dual_delta_q(params, nu).to_float()


def norm_product_nq_monic(params: CouplingParams, nu: Partition) -> float:
    """Dual-monic variant N_{nu,q} / C^_{nu,q}^2"""
    return norm_product_nq(params, nu) / (dual_c_q(params, nu) ** 2).to_float()


def _q_c_constants(params: CouplingParams) -> np.ndarray:
    """c_r at p=0 for r = 1, 2 (brackets 3 and 4 reduce to 1)"""
    alpha = params.alpha
    if params.primed_free:
        return np.zeros(2)
    prefactor = 2.0 / (q_bracket(alpha, params.g, 1) * q_bracket(alpha, params.g - 1.0, 1))
    out = np.empty(2)
    for r in range(2):
        value = prefactor
        for s, idx in enumerate(PERMUTATIONS[r][:2]):
            value *= q_bracket(alpha, params.g_r[idx] - 0.5, s + 1) * q_bracket(alpha, params.gp_r[idx], s + 1)
        out[r] = value
    return out


def coeff_A_p0(params: CouplingParams, lam: Partition) -> float:
    """A_lambda at p=0 from trigonometric brackets"""
    c = _q_c_constants(params)
    x = params.rho + np.asarray(lam, dtype=float)
    total = 0.0
    for r in (1, 2):
        if c[r - 1] == 0.0:
            continue
        num = np.concatenate([x + 0.5 - params.g, x - 0.5 + params.g])
        den = np.concatenate([x + 0.5, x - 0.5])
        ratio = LogSigned.ratio(q_bracket(params.alpha, num, r), q_bracket(params.alpha, den, r))
        total += c[r - 1] * (ratio.to_float() - 1.0)
    return float(total)


def recovered_polynomials(params: CouplingParams, h: np.ndarray, norm: float,
                          lattice: Optional[PartitionLattice] = None) -> np.ndarray:
    """P_lambda(nu) = h^(nu)_lambda N_{nu,q} / C_{lambda,q}"""
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    c = np.array([c_lambda_q(params, lam).to_float() for lam in lattice])
    return h * norm / c


def norm_sum_nq(params: CouplingParams, polynomials: np.ndarray,
                lattice: Optional[PartitionLattice] = None) -> float:
    """N_{nu,q} = sum_lambda C^2 P^2 Delta"""
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    total = 0.0
    for lam, P in zip(lattice, polynomials):
        c = c_lambda_q(params, lam).to_float()
        total += c * c * P * P * delta_lambda_q(params, lam).to_float()
    return float(total)
