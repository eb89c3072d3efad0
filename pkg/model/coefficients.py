"""
Operator coefficients A_lambda, B_{lambda, eps j} and the constants c_r
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.config import Config
from kernel.theta_kernel import ThetaContext, bracket, bracket_prime_at_zero, on_real_zero
from lattice.partition_lattice import Partition, PartitionLattice
from model.couplings import CouplingParams
from utils.errors import BranchError, PoleError
from utils.log_signed import LogSigned

logger = logging.getLogger(__name__)

# pi_1 = id, pi_2 = (12)(34), pi_3 = (13)(24), pi_4 = (14)(23), zero-based
PERMUTATIONS = (
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
)

# Factor lists: r -> (numerator arguments, denominator arguments)
FactorLists = Dict[int, Tuple[List[float], List[float]]]


def _context(params: CouplingParams, ctx: Optional[ThetaContext]) -> ThetaContext:
    return ctx if ctx is not None else params.theta_context()


def _permuted_product(params: CouplingParams, ctx: ThetaContext, r: int) -> float:
    """prod_s [g_{pi_r(s)} - 1/2]_s [g'_{pi_r(s)}]_s"""
    g_r, gp_r = params.g_r, params.gp_r
    value = 1.0
    for s, idx in enumerate(PERMUTATIONS[r]):
        value *= bracket(ctx, g_r[idx] - 0.5, s + 1) * bracket(ctx, gp_r[idx], s + 1)
    return value


def c_coefficients(params: CouplingParams, ctx: Optional[ThetaContext] = None) -> np.ndarray:
    """
    The constants c_1..c_4 multiplying the diagonal theta products

    Raises:
        BranchError: g at a pole (0 or 1) with nonzero primed couplings
    """
    ctx = _context(params, ctx)
    if params.primed_free:
        return np.zeros(4)
    if abs(params.g) < Config.POLE_TOL or abs(params.g - 1.0) < Config.POLE_TOL:
        raise BranchError(f"c_r has a pole at g={params.g}; use the g=1 branch (racah_g1)")
    prefactor = 2.0 / (bracket(ctx, params.g, 1) * bracket(ctx, params.g - 1.0, 1))
    return np.array([prefactor * _permuted_product(params, ctx, r) for r in range(4)])


def c_residues(params: CouplingParams, ctx: Optional[ThetaContext] = None) -> np.ndarray:
    """Residues lim_{g->1} (g-1) c_r = 2/([1]_1 [0]'_1) prod_s [...]_s [...]_s"""
    ctx = _context(params, ctx)
    if params.primed_free:
        return np.zeros(4)
    prefactor = 2.0 / (bracket(ctx, 1.0, 1) * bracket_prime_at_zero(ctx))
    return np.array([prefactor * _permuted_product(params, ctx, r) for r in range(4)])


def _ratio(ctx: ThetaContext, factors: FactorLists) -> LogSigned:
    """Product of bracket quotients; PoleError on a vanishing denominator"""
    total = LogSigned.one()
    for r, (num, den) in factors.items():
        den_arr = np.asarray(den, dtype=float)
        if den_arr.size and np.any(on_real_zero(ctx, den_arr, r)):
            raise PoleError(f"Vanishing denominator [.]_{r} at {den_arr[on_real_zero(ctx, den_arr, r)]}")
        num_vals = np.atleast_1d(bracket(ctx, np.asarray(num, dtype=float), r)) if len(num) else []
        den_vals = np.atleast_1d(bracket(ctx, den_arr, r)) if den_arr.size else []
        total = total * LogSigned.ratio(num_vals, den_vals)
    return total


def diagonal_factors(params: CouplingParams, lam: Partition, r: int) -> Tuple[List[float], List[float]]:
    """Arguments of prod_j [x+1/2-g]_r [x-1/2+g]_r / ([x+1/2]_r [x-1/2]_r), x = rho_j + lam_j"""
    x = params.rho + np.asarray(lam, dtype=float)
    g = params.g
    num = list(x + 0.5 - g) + list(x - 0.5 + g)
    den = list(x + 0.5) + list(x - 0.5)
    return num, den


def coeff_A(params: CouplingParams, lam: Partition, ctx: Optional[ThetaContext] = None,
            c: Optional[np.ndarray] = None) -> float:
    """
    Diagonal coefficient A_lambda (generic branch)

    Args:
        params: couplings
        lam: partition in Lambda^(n,m)
        ctx: theta context (built from params if omitted)
        c: precomputed c_r constants

    Returns:
        A_lambda
    """
    if params.is_g1_branch:
        raise BranchError("A_lambda at g=1 is assembled by the elliptic Racah chain")
    ctx = _context(params, ctx)
    if c is None:
        c = c_coefficients(params, ctx)
    total = 0.0
    for r in range(1, 5):
        if c[r - 1] == 0.0:
            continue
        num, den = diagonal_factors(params, lam, r)
        total += c[r - 1] * (_ratio(ctx, {r: (num, den)}).to_float() - 1.0)
    return float(total)


def hopping_factors(params: CouplingParams, lam: Partition, j: int, eps: int) -> FactorLists:
    """Numerator / denominator arguments of B_{lambda, eps j}, grouped by bracket index"""
    rho = params.rho
    lam_arr = np.asarray(lam, dtype=float)
    x = rho[j - 1] + lam_arr[j - 1]
    factors: FactorLists = {}
    for r in range(1, 5):
        g_r = params.g_r[r - 1]
        gp_r = params.gp_r[r - 1]
        factors[r] = ([x + eps * g_r, x + eps * (gp_r + 0.5)], [x, x + eps * 0.5])
    for k in range(1, params.n + 1):
        if k == j:
            continue
        for delta in (1, -1):
            y = rho[j - 1] + delta * rho[k - 1] + lam_arr[j - 1] + delta * lam_arr[k - 1]
            factors[1][0].append(y + eps * params.g)
            factors[1][1].append(y)
    return factors


def coeff_B(params: CouplingParams, lam: Partition, j: int, eps: int,
            ctx: Optional[ThetaContext] = None) -> float:
    """
    Hopping coefficient B_{lambda, eps j}

    Returns exactly 0.0 when a numerator argument sits on a real zero of
    [.]_1 or [.]_2, which happens precisely for moves leaving Lambda^(n,m).
    """
    ctx = _context(params, ctx)
    factors = hopping_factors(params, lam, j, eps)
    for r, (num, _) in factors.items():
        if np.any(on_real_zero(ctx, np.asarray(num, dtype=float), r)):
            return 0.0
    return _ratio(ctx, factors).to_float()


@dataclass
class OperatorCoefficients:
    """Coefficient tables over a lattice, keyed by rank"""
    lattice: PartitionLattice
    A: np.ndarray
    B: Dict[Tuple[int, int, int], float]
    c: np.ndarray

    def hop(self, lam: Partition, j: int, eps: int) -> float:
        return self.B[(self.lattice.rank(lam), j, eps)]


def compute_coefficients(params: CouplingParams, lattice: Optional[PartitionLattice] = None,
                         diagonal: Optional[np.ndarray] = None) -> OperatorCoefficients:
    """
    Tabulate A and B over Lambda^(n,m)

    Args:
        params: couplings
        lattice: lattice to tabulate over (built if omitted)
        diagonal: externally supplied A values (used by the g=1 branch)

    Returns:
        OperatorCoefficients with B for every (rank, j, eps), zeros included
    """
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    ctx = params.theta_context()
    if diagonal is None:
        c = c_coefficients(params, ctx)
        A = np.array([coeff_A(params, lam, ctx, c) for lam in lattice])
    else:
        c = c_residues(params, ctx)
        A = np.asarray(diagonal, dtype=float)
    B = {}
    for rank, lam in enumerate(lattice):
        for j in range(1, params.n + 1):
            for eps in (1, -1):
                B[(rank, j, eps)] = coeff_B(params, lam, j, eps, ctx)
    logger.debug(f"Tabulated coefficients on {len(lattice)} lattice points ({params.label()})")
    return OperatorCoefficients(lattice=lattice, A=A, B=B, c=c)


def min_denominator(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> float:
    """Smallest |bracket| among all denominators of admissible B and of A"""
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    ctx = params.theta_context()
    smallest = np.inf
    for lam in lattice:
        groups = [hopping_factors(params, lam, j, eps) for j, eps in lattice.moves(lam)]
        groups.append({r: diagonal_factors(params, lam, r) for r in range(1, 5)})
        for factors in groups:
            for r, (_, den) in factors.items():
                vals = np.abs(np.atleast_1d(bracket(ctx, np.asarray(den, dtype=float), r)))
                smallest = min(smallest, float(vals.min()))
    return smallest
