"""
Diagonalization of H and eigenvalue labeling by continuation in the nome
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment

from config.config import Config
from lattice.partition_lattice import Partition, PartitionLattice
from limits.trig_limit import spectrum_p0
from model.couplings import CouplingParams
from spectral.operator import LatticeOperator, build_operator, symmetrized
from utils.errors import LabelingError, NumericError

logger = logging.getLogger(__name__)


@dataclass
class EigenPairs:
    """Unlabeled eigendecomposition of the symmetrized operator"""
    eigenvalues: np.ndarray  # ascending
    vectors: np.ndarray  # orthonormal columns in the symmetrized basis
    log_delta: np.ndarray
    sym_residual: float
    eig_residual: float

    def pulled_back(self) -> np.ndarray:
        """Columns D^{-1/2} v, eigenvectors of H of unit Delta-norm"""
        return np.exp(-0.5 * self.log_delta)[:, None] * self.vectors


@dataclass
class SpectralResult:
    """Labeled spectrum; columns of the arrays follow the lattice order of nu"""
    params: CouplingParams
    lattice: PartitionLattice
    eigenvalues: np.ndarray
    vectors: np.ndarray
    log_delta: np.ndarray
    min_gap: float
    path: List[float] = field(default_factory=list)
    sym_residual: float = 0.0
    eig_residual: float = 0.0
    unresolved: List[Partition] = field(default_factory=list)
    eigenfunctions: Optional[np.ndarray] = None  # [nu rank, lambda rank]
    norms: Optional[np.ndarray] = None
    zero_locus: List[Partition] = field(default_factory=list)

    def energy(self, nu: Partition) -> float:
        return float(self.eigenvalues[self.lattice.rank(nu)])

    def as_dict(self) -> Dict[Partition, float]:
        return {nu: float(E) for nu, E in zip(self.lattice, self.eigenvalues)}

    def diagnostics(self) -> Dict:
        return {
            'sym_residual': self.sym_residual,
            'eig_residual': self.eig_residual,
            'min_gap': self.min_gap,
            'path': list(self.path),
            'unresolved': [list(nu) for nu in self.unresolved],
            'zero_locus': [list(nu) for nu in self.zero_locus],
        }


def diagonalize(op: LatticeOperator, sym_tol: Optional[float] = None,
                residual_tol: Optional[float] = None) -> EigenPairs:
    """
    Full eigendecomposition of S = D^{1/2} H D^{-1/2}

    Args:
        op: assembled operator
        sym_tol: symmetry gate relative to max|S| (Config.SYM_TOL)
        residual_tol: eigen-residual gate relative to max|S| (Config.EIG_RESIDUAL_TOL)

    Returns:
        EigenPairs with ascending eigenvalues
    """
    sym_tol = Config.SYM_TOL if sym_tol is None else sym_tol
    residual_tol = Config.EIG_RESIDUAL_TOL if residual_tol is None else residual_tol
    S = symmetrized(op)
    scale = float(np.max(np.abs(S))) or 1.0
    sym_residual = float(np.max(np.abs(S - S.T)) / scale)
    if sym_residual > sym_tol:
        raise NumericError(f"Operator is not self-adjoint to tolerance ({sym_residual:.3e})",
                           {'sym_residual': sym_residual, 'params': op.params.to_dict()})

    S = 0.5 * (S + S.T)
    try:
        eigenvalues, vectors = eigh(S)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"Symmetric eigensolver did not converge: {e}",
                           {'params': op.params.to_dict()}) from e

    eig_residual = float(np.max(np.abs(S @ vectors - vectors * eigenvalues)) / scale)
    if eig_residual > residual_tol:
        raise NumericError(f"Eigen-residual {eig_residual:.3e} above tolerance",
                           {'eig_residual': eig_residual})
    return EigenPairs(eigenvalues=eigenvalues, vectors=vectors, log_delta=op.log_delta.copy(),
                      sym_residual=sym_residual, eig_residual=eig_residual)


def minimum_gap(eigenvalues: np.ndarray) -> Tuple[float, Tuple[int, int]]:
    """Smallest distance between sorted eigenvalues and the index pair (in input order)"""
    if len(eigenvalues) < 2:
        return np.inf, (0, 0)
    order = np.argsort(eigenvalues)
    gaps = np.diff(eigenvalues[order])
    i = int(np.argmin(gaps))
    return float(gaps[i]), (int(order[i]), int(order[i + 1]))


def _gap_gate(eigenvalues: np.ndarray, gap_tol_rel: float) -> float:
    width = float(np.max(eigenvalues) - np.min(eigenvalues)) if len(eigenvalues) > 1 else 0.0
    return gap_tol_rel * (width if width > 0 else 1.0)


def _labels_at_p0(params: CouplingParams, lattice: PartitionLattice, pairs: EigenPairs,
                  gap_tol: float, allow_clusters: bool) -> np.ndarray:
    """Column index of each nu, matching sorted numeric and closed-form eigenvalues"""
    closed = spectrum_p0(params, lattice)
    labels = np.empty(len(lattice), dtype=int)
    labels[np.argsort(closed)] = np.argsort(pairs.eigenvalues)
    mismatch = float(np.max(np.abs(pairs.eigenvalues[labels] - closed)))
    width = float(np.ptp(closed)) or 1.0
    if mismatch > 1e-8 * width:
        raise NumericError(f"p=0 spectrum deviates from the closed formula by {mismatch:.3e}",
                           {'mismatch': mismatch, 'width': width, 'params': params.to_dict()})

    gap, (a, b) = minimum_gap(pairs.eigenvalues)
    if gap < _gap_gate(pairs.eigenvalues, gap_tol) and not allow_clusters:
        # report the colliding labels as nu ranks
        rank_of = np.argsort(labels)
        raise LabelingError(f"Eigenvalue gap collapsed to {gap:.3e} at p=0",
                            p=0.0, pair=(int(rank_of[a]), int(rank_of[b])))
    return labels


def _unresolved_clusters(eigenvalues: np.ndarray, lattice: PartitionLattice, gate: float) -> List[Partition]:
    order = np.argsort(eigenvalues)
    flagged = set()
    for a, b in zip(order[:-1], order[1:]):
        if eigenvalues[b] - eigenvalues[a] < gate:
            flagged.update((int(a), int(b)))
    return [lattice.unrank(i) for i in sorted(flagged)]


def label_eigenvalues(params: CouplingParams, pairs: EigenPairs,
                      lattice: Optional[PartitionLattice] = None,
                      gap_tol: Optional[float] = None,
                      overlap_min: Optional[float] = None,
                      solver: Optional[Callable[[CouplingParams], EigenPairs]] = None) -> SpectralResult:
    """
    Attach partition labels nu to the eigenpairs at params.p

    Labels are read off the closed p=0 spectrum and carried to the target
    nome in steps, matching consecutive spectra by eigenvector overlap.

    Args:
        params: couplings at the target nome
        pairs: eigendecomposition at params
        lattice: lattice (built if omitted)
        gap_tol: relative gap gate (Config.GAP_TOL_REL)
        overlap_min: minimal per-step overlap (Config.OVERLAP_MIN)
        solver: eigendecomposition at other nomes (defaults to build + diagonalize)

    Returns:
        SpectralResult with columns ordered by nu

    Raises:
        LabelingError: gap collapse at p=0 or on the path, or overlap failure at the step floor
        NumericError: the p=0 spectrum disagrees with the closed formula
    """
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    gap_tol = Config.GAP_TOL_REL if gap_tol is None else gap_tol
    overlap_min = Config.OVERLAP_MIN if overlap_min is None else overlap_min
    if solver is None:
        def solver(q: CouplingParams) -> EigenPairs:
            return diagonalize(build_operator(q, lattice))

    target = float(params.p)
    path = [0.0]
    if target == 0.0:
        current = pairs
    else:
        current = solver(params.with_p(0.0))
    labels = _labels_at_p0(params, lattice, current, gap_tol, allow_clusters=target == 0.0)

    p_cur = 0.0
    step = Config.P_STEP_INIT
    direction = 1.0 if target > 0 else -1.0
    while p_cur != target:
        p_next = p_cur + direction * step
        if direction * (p_next - target) >= 0:
            p_next = target
        nxt = pairs if p_next == target else solver(params.with_p(p_next))

        gap, pair = minimum_gap(nxt.eigenvalues)
        gate = _gap_gate(nxt.eigenvalues, gap_tol)
        if gap < gate and p_next != target:
            raise LabelingError(f"Eigenvalue gap collapsed to {gap:.3e} at p={p_next:g}",
                                p=p_next, pair=pair)

        overlap = np.abs(current.vectors.T @ nxt.vectors)
        rows, cols = linear_sum_assignment(-overlap)
        matched = overlap[rows, cols]
        if np.min(matched) < overlap_min:
            step /= 2
            if step < Config.P_STEP_FLOOR:
                worst = int(np.argmin(matched))
                raise LabelingError(
                    f"Overlap {matched[worst]:.3f} below {overlap_min} at p={p_next:g} with minimal step",
                    p=p_next, pair=(int(rows[worst]), int(cols[worst])))
            logger.debug(f"Overlap {np.min(matched):.3f} at p={p_next:g}, halving step to {step:g}")
            continue

        mapping = np.empty(len(cols), dtype=int)
        mapping[rows] = cols
        labels = mapping[labels]
        current = nxt
        p_cur = p_next
        path.append(p_cur)
        step = min(2 * step, Config.P_STEP_INIT)

    eigenvalues = current.eigenvalues[labels]
    vectors = current.vectors[:, labels]
    gap, _ = minimum_gap(eigenvalues)
    gate = _gap_gate(eigenvalues, gap_tol)
    unresolved = _unresolved_clusters(eigenvalues, lattice, gate) if gap < gate else []
    if unresolved:
        logger.warning(f"Unresolved eigenvalue cluster at p={target:g}: {unresolved}")

    return SpectralResult(params=params, lattice=lattice, eigenvalues=eigenvalues, vectors=vectors,
                          log_delta=current.log_delta, min_gap=gap, path=path,
                          sym_residual=current.sym_residual, eig_residual=current.eig_residual,
                          unresolved=unresolved)
