"""
Matrix assembly of the truncated difference operator H on Lambda^(n,m)
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lattice.partition_lattice import PartitionLattice, shift
from limits.racah_g1 import additive_A, coeffs_g1
from model.coefficients import OperatorCoefficients, compute_coefficients
from model.couplings import CouplingParams
from model.weights import WeightFunction, compute_weights

logger = logging.getLogger(__name__)


@dataclass
class LatticeOperator:
    """Dense matrix of H in the rank basis with its weight function"""
    params: CouplingParams
    lattice: PartitionLattice
    matrix: np.ndarray
    weights: WeightFunction
    coefficients: OperatorCoefficients

    @property
    def dim(self) -> int:
        return len(self.lattice)

    @property
    def log_delta(self) -> np.ndarray:
        return self.weights.log_delta

    def apply(self, f: np.ndarray) -> np.ndarray:
        """(H f)_lambda = A_lambda f_lambda + sum_{j, eps} B_{lambda, eps j} f_{lambda + eps e_j}"""
        return self.matrix @ f

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def _g1_diagonal(params: CouplingParams, lattice: PartitionLattice) -> np.ndarray:
    chain = coeffs_g1(params)
    return np.array([additive_A(chain, lam) for lam in lattice])


def build_operator(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> LatticeOperator:
    """
    Assemble H over Lambda^(n,m)

    Args:
        params: valid couplings (generic or g1 branch)
        lattice: lattice to assemble over (built if omitted)

    Returns:
        LatticeOperator with exact zeros outside the move stencil
    """
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    diagonal = _g1_diagonal(params, lattice) if params.is_g1_branch else None
    coefficients = compute_coefficients(params, lattice, diagonal)
    weights = compute_weights(params, lattice)

    dim = len(lattice)
    matrix = np.zeros((dim, dim))
    matrix[np.diag_indices(dim)] = coefficients.A
    for rank, lam in enumerate(lattice):
        for j, eps in lattice.moves(lam):
            matrix[rank, lattice.rank(shift(lam, j, eps))] = coefficients.B[(rank, j, eps)]

    logger.debug(f"Assembled H of dimension {dim} ({params.label()})")
    return LatticeOperator(params=params, lattice=lattice, matrix=matrix,
                           weights=weights, coefficients=coefficients)


def symmetrized(op: LatticeOperator) -> np.ndarray:
    """S = D^{1/2} H D^{-1/2} with D = diag(Delta), formed in log space"""
    log_delta = op.log_delta
    scale = np.exp(0.5 * (log_delta[:, None] - log_delta[None, :]))
    return op.matrix * scale


def symmetry_residual(op: LatticeOperator) -> float:
    """max|S - S^T| / max|S|"""
    S = symmetrized(op)
    norm = np.max(np.abs(S))
    if norm == 0.0:
        return 0.0
    return float(np.max(np.abs(S - S.T)) / norm)


def detailed_balance_residual(op: LatticeOperator) -> float:
    """Largest relative mismatch of B_{lam, eps j} Delta_lam = B_{mu, -eps j} Delta_mu over all edges"""
    log_delta = op.log_delta
    worst = 0.0
    for rank, lam in enumerate(op.lattice):
        for j, eps in op.lattice.moves(lam):
            mu = op.lattice.rank(shift(lam, j, eps))
            forward = op.matrix[rank, mu]
            backward = op.matrix[mu, rank]
            # compare B_fwd * Delta_lam / Delta_mu with B_back
            lhs = forward * np.exp(log_delta[rank] - log_delta[mu])
            worst = max(worst, abs(lhs - backward) / max(abs(backward), abs(lhs)))
    return float(worst)


def boundary_vanishing(op: LatticeOperator) -> dict:
    """
    Check hopping coefficients against the lattice boundary

    Returns:
        dict with counts of off-lattice moves with nonzero B and of
        on-lattice moves with nonpositive B
    """
    lattice = op.lattice
    params = op.params
    off_nonzero = 0
    on_nonpositive = 0
    for rank, lam in enumerate(lattice):
        for j in range(1, params.n + 1):
            for eps in (1, -1):
                value = op.coefficients.B[(rank, j, eps)]
                if lattice.is_admissible(lam, j, eps):
                    on_nonpositive += int(not value > 0)
                else:
                    off_nonzero += int(value != 0.0)
    return {'off_lattice_nonzero': off_nonzero, 'on_lattice_nonpositive': on_nonpositive}


def row_sums(op: LatticeOperator) -> np.ndarray:
    """H applied to the constant function"""
    return op.apply(np.ones(op.dim))
