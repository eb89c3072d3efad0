"""
Closed-form m = 1 solver on the column partitions (1^k), k = 0..n
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import det

from kernel.theta_kernel import ThetaContext, bracket
from lattice.partition_lattice import PartitionLattice
from limits import jacobi_chain
from model.coefficients import c_coefficients, coeff_A, coeff_B
from model.couplings import CouplingParams
from utils.errors import DomainError, NumericError
from utils.log_signed import LogSigned

logger = logging.getLogger(__name__)

FORM_TOL = 1e-11


@dataclass
class TridiagonalModel:
    """
    Chain data for m = 1

    B_plus[k] = B_{(1^k), k+1} (zero at k = n), B_minus[k] = B_{(1^k), -k}
    (zero at k = 0).
    """
    params: CouplingParams
    A: np.ndarray
    B_plus: np.ndarray
    B_minus: np.ndarray
    extended_rho: np.ndarray
    form_deviation: float = 0.0
    roots: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def offprod(self) -> np.ndarray:
        """B_k B_{-k} for k = 1..n"""
        return self.B_plus[:-1] * self.B_minus[1:]

    @property
    def c(self) -> np.ndarray:
        """C_{(1^k)} = prod_{j<=k} 1 / B_j"""
        return np.concatenate([[1.0], np.cumprod(1.0 / self.B_plus[:-1])])

    @property
    def delta(self) -> np.ndarray:
        """Delta_{(1^k)} = prod_{j<=k} B_j / B_{-j}"""
        return np.concatenate([[1.0], np.cumprod(self.B_plus[:-1] / self.B_minus[1:])])


def _bracket_ratio(ctx: ThetaContext, num, den, r: int = 1) -> LogSigned:
    return LogSigned.ratio(np.atleast_1d(bracket(ctx, np.asarray(num, dtype=float), r)),
                           np.atleast_1d(bracket(ctx, np.asarray(den, dtype=float), r)))


def simplified_A(params: CouplingParams, k: int, ctx: ThetaContext, c: np.ndarray, rho: np.ndarray) -> float:
    """A_{(1^k)} after telescoping; rho is the extended vector rho_0..rho_{n+1}"""
    n = params.n
    num = [rho[0] + 0.5, rho[k + 1] + 1.5, rho[k] - 0.5, rho[n + 1] + 0.5]
    den = [rho[k] + 0.5, rho[1] + 1.5, rho[n] - 0.5, rho[k + 1] + 0.5]
    total = 0.0
    for r in range(1, 5):
        if c[r - 1] == 0.0:
            continue
        total += c[r - 1] * (_bracket_ratio(ctx, num, den, r).to_float() - 1.0)
    return total


def _one_body(params: CouplingParams, ctx: ThetaContext, x: float, sign: int) -> LogSigned:
    total = LogSigned.one()
    for r in range(1, 5):
        g_r, gp_r = params.g_r[r - 1], params.gp_r[r - 1]
        total = total * _bracket_ratio(ctx, [x + sign * g_r, x + sign * (gp_r + 0.5)],
                                       [x, x + sign * 0.5], r)
    return total


def simplified_B_plus(params: CouplingParams, k: int, ctx: ThetaContext, rho: np.ndarray) -> float:
    """B_{(1^k), k+1} for 0 <= k < n"""
    n, g = params.n, params.g
    y = rho[k + 1]
    two_body = _bracket_ratio(ctx, [rho[0] + y + 1, 2 * y, y - rho[n + 1], 1.0],
                              [rho[k] + y + 1, rho[1] - y + 1, y + rho[n], g])
    return (two_body * _one_body(params, ctx, y, +1)).to_float()


def simplified_B_minus(params: CouplingParams, k: int, ctx: ThetaContext, rho: np.ndarray) -> float:
    """B_{(1^k), -k} for 1 <= k <= n"""
    n, g = params.n, params.g
    y = rho[k]
    two_body = _bracket_ratio(ctx, [2 * y + 2, rho[0] - y, y + rho[n + 1] + 1, 1.0],
                              [rho[1] + y + 2, y + rho[k + 1] + 1, y - rho[n] + 1, g])
    return (two_body * _one_body(params, ctx, y + 1, -1)).to_float()


def coeffs_m1(params: CouplingParams, form_tol: float = FORM_TOL) -> TridiagonalModel:
    """
    Build the m = 1 chain and cross-check both forms of every coefficient

    Args:
        params: valid couplings with m = 1 and g != 1
        form_tol: relative agreement required between raw and telescoped forms

    Returns:
        TridiagonalModel holding the raw (generic-module) coefficients
    """
    if params.m != 1:
        raise DomainError(f"The tridiagonal solver needs m = 1 (got m={params.m})")
    if params.is_g1_branch:
        raise DomainError("The tridiagonal solver is for the generic branch")
    n = params.n
    lattice = PartitionLattice(n, 1)
    ctx = params.theta_context()
    c = c_coefficients(params, ctx)
    rho = params.rho
    extended = np.concatenate([[rho[0] + params.g], rho, [rho[-1] - params.g]])

    A = np.array([coeff_A(params, lattice.column(k), ctx, c) for k in range(n + 1)])
    B_plus = np.zeros(n + 1)
    B_minus = np.zeros(n + 1)
    for k in range(n):
        B_plus[k] = coeff_B(params, lattice.column(k), k + 1, +1, ctx)
    for k in range(1, n + 1):
        B_minus[k] = coeff_B(params, lattice.column(k), k, -1, ctx)

    A_s = np.array([simplified_A(params, k, ctx, c, extended) for k in range(n + 1)])
    Bp_s = np.array([simplified_B_plus(params, k, ctx, extended) for k in range(n)] + [0.0])
    Bm_s = np.array([0.0] + [simplified_B_minus(params, k, ctx, extended) for k in range(1, n + 1)])

    a_scale = max(np.max(np.abs(A)), 1.0)
    deviation = max(
        float(np.max(np.abs(A - A_s)) / a_scale),
        float(np.max(np.abs(B_plus - Bp_s) / np.maximum(np.abs(B_plus), 1e-300))),
        float(np.max(np.abs(B_minus - Bm_s) / np.maximum(np.abs(B_minus), 1e-300))),
    )
    if deviation > form_tol:
        raise NumericError(f"Raw and telescoped m=1 coefficients differ by {deviation:.3e}",
                           {'A': A.tolist(), 'A_simplified': A_s.tolist()})
    return TridiagonalModel(params=params, A=A, B_plus=B_plus, B_minus=B_minus,
                            extended_rho=extended, form_deviation=deviation)


def poly_P(model: TridiagonalModel, k: int, E: float) -> float:
    """Monic P_{(1^k)}(E), 0 <= k <= n+1"""
    if not 0 <= k <= model.n + 1:
        raise DomainError(f"Degree {k} outside [0, {model.n + 1}]")
    return float(jacobi_chain.monic_values(model.A, model.offprod, E)[k])


def poly_P_determinant(model: TridiagonalModel, k: int, E: float) -> float:
    """det of the k x k tridiagonal matrix E - H restricted to (1^0)..(1^{k-1})"""
    if k == 0:
        return 1.0
    M = np.diag(E - model.A[:k])
    for i in range(k - 1):
        M[i, i + 1] = -model.B_plus[i]
        M[i + 1, i] = -model.B_minus[i + 1]
    return float(det(M))


def spectrum_m1(model: TridiagonalModel) -> np.ndarray:
    """E_{(1^0)} > E_{(1^1)} > ... > E_{(1^n)}"""
    if model.roots is None:
        model.roots = jacobi_chain.jacobi_roots(model.A, model.offprod)
    return model.roots


def norms_m1(model: TridiagonalModel, l: int) -> Tuple[float, float]:
    """
    N_{(1^l)} as a direct sum and in Christoffel-Darboux closed form

    Returns:
        (sum_k C^2 P_k(E_l)^2 Delta_k, P_n(E_l) prod_{j != l}(E_l - E_j) / h_n)
    """
    roots = spectrum_m1(model)
    P = jacobi_chain.monic_values(model.A, model.offprod, roots[l])[:model.n + 1]
    direct = float(np.sum(model.c ** 2 * P ** 2 * model.delta))
    _, closed = jacobi_chain.chain_norms(model.A, model.offprod, roots)
    return direct, float(closed[l])


def eigenfunction_table(model: TridiagonalModel) -> np.ndarray:
    """h[l, k] = C_{(1^k)} P_{(1^k)}(E_{(1^l)}) / N_{(1^l)}"""
    roots = spectrum_m1(model)
    table = np.empty((len(roots), model.n + 1))
    for l, E in enumerate(roots):
        P = jacobi_chain.monic_values(model.A, model.offprod, E)[:model.n + 1]
        table[l] = model.c * P / norms_m1(model, l)[1]
    return table


def characteristic_residual(model: TridiagonalModel, x: float) -> float:
    """|P_{n+1}(x) - prod_l (x - E_l)| relative to the product"""
    roots = spectrum_m1(model)
    product = float(np.prod(x - roots))
    value = poly_P(model, model.n + 1, x)
    return abs(value - product) / max(abs(product), 1e-300)


def christoffel_darboux(model: TridiagonalModel, x: float, y: float) -> Tuple[float, float]:
    return jacobi_chain.christoffel_darboux(model.A, model.offprod, x, y)


def confluent_christoffel_darboux(model: TridiagonalModel, x: float) -> Tuple[float, float]:
    return jacobi_chain.confluent_christoffel_darboux(model.A, model.offprod, x)
