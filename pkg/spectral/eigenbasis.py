"""
Orthogonal eigenbasis h^(nu): eigenvector route, projector route and their checks
"""
import logging
from typing import Optional

import numpy as np

from config.config import Config
from lattice.partition_lattice import Partition
from spectral.labeling import SpectralResult, diagonalize, label_eigenvalues
from spectral.operator import LatticeOperator, build_operator
from utils.errors import ConditioningError, DegeneracyError

logger = logging.getLogger(__name__)


def eigenbasis_h(result: SpectralResult, zero_tol: Optional[float] = None) -> SpectralResult:
    """
    Normalize eigenvectors to h = f_0 f with f of unit Delta-norm

    Then <h, h>_Delta = h_0 and the phase makes h_0 > 0. Labels with
    |f_0| below zero_tol belong to the finite zero locus and keep the
    unit-norm vector.

    Args:
        result: labeled spectrum
        zero_tol: threshold on |f_0| (Config.ZERO_LOCUS_TOL)

    Returns:
        The same result with eigenfunctions and norms filled in
    """
    zero_tol = Config.ZERO_LOCUS_TOL if zero_tol is None else zero_tol
    f = np.exp(-0.5 * result.log_delta)[:, None] * result.vectors
    dim = f.shape[1]
    h = np.empty((dim, f.shape[0]))
    norms = np.empty(dim)
    zero_locus = []
    for k, nu in enumerate(result.lattice):
        col = f[:, k]
        f0 = col[0]
        if abs(f0) < zero_tol:
            zero_locus.append(nu)
            h[k] = col
            norms[k] = 1.0
            continue
        col = col * np.sign(f0)
        h[k] = abs(f0) * col
        norms[k] = f0 ** 2
    if zero_locus:
        logger.warning(f"h_0 vanishes for {zero_locus} at p={result.params.p:g} (finite zero locus)")
    result.eigenfunctions = h
    result.norms = norms
    result.zero_locus = zero_locus
    return result


def _weights(result: SpectralResult) -> np.ndarray:
    return np.exp(result.log_delta)


def gram_matrix(result: SpectralResult) -> np.ndarray:
    """<h^(nu), h^(nu~)>_Delta"""
    h = result.eigenfunctions
    return (h * _weights(result)) @ h.T


def orthogonality_residual(result: SpectralResult) -> float:
    """Off-diagonal Gram entries relative to the norms, and diagonal against h_0"""
    G = gram_matrix(result)
    diag = np.diag(G)
    scale = np.sqrt(np.outer(diag, diag))
    off = np.abs(G - np.diag(diag)) / scale
    h0 = result.eigenfunctions[:, 0]
    resolved = np.array([nu not in result.zero_locus for nu in result.lattice])
    on = np.abs(diag - h0)[resolved] / np.abs(h0[resolved]) if resolved.any() else np.zeros(1)
    return float(max(off.max(), on.max()))


def dual_orthogonality_residual(result: SpectralResult) -> float:
    """max |sqrt(Delta_lam Delta_mu) sum_nu h_lam h_mu / <h, h> - delta_{lam mu}|"""
    h = result.eigenfunctions
    G = np.diag(gram_matrix(result))
    M = (h / G[:, None]).T @ h
    root = np.exp(0.5 * result.log_delta)
    return float(np.max(np.abs(np.outer(root, root) * M - np.eye(len(root)))))


def eigen_residual(op: LatticeOperator, result: SpectralResult) -> float:
    """max_nu |H h - E h|_Delta / |h|_Delta"""
    w = _weights(result)
    worst = 0.0
    for k in range(len(result.eigenvalues)):
        h = result.eigenfunctions[k]
        r = op.apply(h) - result.eigenvalues[k] * h
        worst = max(worst, float(np.sqrt(np.sum(r ** 2 * w) / np.sum(h ** 2 * w))))
    return worst


def projector_amplification(eigenvalues: np.ndarray, index: int) -> float:
    """prod_{mu != nu} max_k |E_k - E_mu| / |E_nu - E_mu|"""
    E = np.asarray(eigenvalues)
    amp = 1.0
    for mu in range(len(E)):
        if mu == index:
            continue
        gap = abs(E[index] - E[mu])
        if gap == 0.0:
            return np.inf
        amp *= np.max(np.abs(E - E[mu])) / gap
    return float(amp)


def apply_projector(op: LatticeOperator, eigenvalues: np.ndarray, index: int, v: np.ndarray) -> np.ndarray:
    """prod_{mu != nu} (H - E_mu) / (E_nu - E_mu) applied to v"""
    E = np.asarray(eigenvalues)
    out = np.array(v, dtype=float)
    for mu in range(len(E)):
        if mu == index:
            continue
        out = (op.apply(out) - E[mu] * out) / (E[index] - E[mu])
    return out


def projector_h(op: LatticeOperator, result: SpectralResult, nu: Partition,
                max_amplification: Optional[float] = None) -> np.ndarray:
    """
    h^(nu) as the spectral projector applied to the delta function at the zero partition

    Raises:
        DegeneracyError: nu sits in an unresolved cluster
        ConditioningError: amplification estimate above the cap
    """
    max_amplification = Config.PROJECTOR_MAX_AMPLIFICATION if max_amplification is None else max_amplification
    if nu in result.unresolved:
        raise DegeneracyError(f"Projector undefined for unresolved label {nu}")
    index = result.lattice.rank(nu)
    amp = projector_amplification(result.eigenvalues, index)
    if amp > max_amplification:
        raise ConditioningError(f"Projector for {nu} amplifies errors by {amp:.3e}", amp)
    chi = np.zeros(op.dim)
    chi[0] = 1.0
    return apply_projector(op, result.eigenvalues, index, chi)


def projector_agreement(op: LatticeOperator, result: SpectralResult, nu: Partition) -> float:
    """Relative Delta-norm distance between projector and eigenvector routes"""
    w = _weights(result)
    h = result.eigenfunctions[result.lattice.rank(nu)]
    diff = projector_h(op, result, nu) - h
    return float(np.sqrt(np.sum(diff ** 2 * w) / np.sum(h ** 2 * w)))


def projector_idempotence(op: LatticeOperator, result: SpectralResult, nu: Partition) -> float:
    """Relative change when the projector polynomial is applied a second time"""
    w = _weights(result)
    once = projector_h(op, result, nu)
    twice = apply_projector(op, result.eigenvalues, result.lattice.rank(nu), once)
    return float(np.sqrt(np.sum((twice - once) ** 2 * w) / np.sum(once ** 2 * w)))


def compute_spectrum(params, lattice=None, gap_tol: Optional[float] = None,
                     overlap_min: Optional[float] = None):
    """
    Build, diagonalize, label and normalize in one call

    Returns:
        (LatticeOperator, SpectralResult) with eigenfunctions filled in
    """
    op = build_operator(params, lattice)
    pairs = diagonalize(op)
    result = label_eigenvalues(params, pairs, op.lattice, gap_tol=gap_tol, overlap_min=overlap_min)
    return op, eigenbasis_h(result)
