"""
Monic three-term recurrences on a finite chain of nodes 0..N-1

P_0 = 1, P_{k+1}(E) = (E - d_k) P_k(E) - beta_k P_{k-1}(E),
with beta_k > 0 the product of the two hopping coefficients across the
link (k-1, k).
"""
import math
import logging
from typing import Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from utils.errors import DomainError, NumericError

logger = logging.getLogger(__name__)

_RESCALE = 1e150


def monic_sequence(diag: np.ndarray, offprod: np.ndarray, E: float,
                   derivative: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Values P_0(E) .. P_N(E) (or their E-derivatives)

    Args:
        diag: d_0..d_{N-1}
        offprod: beta_1..beta_{N-1}
        E: evaluation point
        derivative: return P'_k instead of P_k

    Returns:
        (mantissas, log_scales) with P_k = mantissas[k] * exp(log_scales[k])
    """
    N = len(diag)
    vals = np.zeros(N + 1)
    ders = np.zeros(N + 1)
    scales = np.zeros(N + 1)
    vals[0], ders[0] = 1.0, 0.0
    prev_v, prev_d = 0.0, 0.0
    log_scale = 0.0
    for k in range(N):
        beta = offprod[k - 1] if k > 0 else 0.0
        v = (E - diag[k]) * vals[k] - beta * prev_v
        d = vals[k] + (E - diag[k]) * ders[k] - beta * prev_d
        prev_v, prev_d = vals[k], ders[k]
        if max(abs(v), abs(d)) > _RESCALE:
            v, d = v / _RESCALE, d / _RESCALE
            prev_v, prev_d = prev_v / _RESCALE, prev_d / _RESCALE
            log_scale += math.log(_RESCALE)
        vals[k + 1], ders[k + 1] = v, d
        scales[k + 1] = log_scale
    return (ders if derivative else vals), scales


def monic_values(diag: np.ndarray, offprod: np.ndarray, E: float, derivative: bool = False) -> np.ndarray:
    """Plain-float P_0(E)..P_N(E)"""
    mantissas, scales = monic_sequence(diag, offprod, E, derivative)
    return mantissas * np.exp(scales)


def link_norms(offprod: np.ndarray) -> np.ndarray:
    """h_k = beta_1 ... beta_k for k = 0..N-1 (h_0 = 1)"""
    return np.concatenate([[1.0], np.cumprod(offprod)])


def jacobi_roots(diag: np.ndarray, offprod: np.ndarray) -> np.ndarray:
    """
    Roots of P_N in strictly decreasing order

    Computed as eigenvalues of the symmetric Jacobi matrix with
    off-diagonals sqrt(beta_k).
    """
    offprod = np.asarray(offprod, dtype=float)
    if np.any(offprod <= 0):
        raise DomainError(f"Jacobi chain needs positive link products, got min {offprod.min()}")
    roots = eigh_tridiagonal(np.asarray(diag, dtype=float), np.sqrt(offprod), eigvals_only=True)
    roots = roots[::-1]
    if len(roots) > 1 and np.min(-np.diff(roots)) <= 0:
        raise NumericError("Jacobi chain roots are not simple", {'roots': roots.tolist()})
    return roots


def christoffel_darboux(diag: np.ndarray, offprod: np.ndarray, x: float, y: float) -> Tuple[float, float]:
    """
    Both sides of sum_{k<N} P_k(x) P_k(y) / h_k
    = [P_N(x) P_{N-1}(y) - P_{N-1}(x) P_N(y)] / ((x - y) h_{N-1})
    """
    N = len(diag)
    h = link_norms(offprod)
    px = monic_values(diag, offprod, x)
    py = monic_values(diag, offprod, y)
    lhs = float(np.sum(px[:N] * py[:N] / h))
    rhs = (px[N] * py[N - 1] - px[N - 1] * py[N]) / ((x - y) * h[N - 1])
    return lhs, float(rhs)


def confluent_christoffel_darboux(diag: np.ndarray, offprod: np.ndarray, x: float) -> Tuple[float, float]:
    """Both sides of sum_{k<N} P_k(x)^2 / h_k = [P'_N P_{N-1} - P'_{N-1} P_N](x) / h_{N-1}"""
    N = len(diag)
    h = link_norms(offprod)
    p = monic_values(diag, offprod, x)
    dp = monic_values(diag, offprod, x, derivative=True)
    lhs = float(np.sum(p[:N] ** 2 / h))
    rhs = (dp[N] * p[N - 1] - dp[N - 1] * p[N]) / h[N - 1]
    return lhs, float(rhs)


def chain_norms(diag: np.ndarray, offprod: np.ndarray, roots: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Norms N_l of the chain eigenfunctions, direct and closed form

    Returns:
        (direct sums sum_k P_k(E_l)^2 / h_k,
         closed forms P_{N-1}(E_l) prod_{j != l}(E_l - E_j) / h_{N-1})
    """
    N = len(diag)
    h = link_norms(offprod)
    direct = np.empty(N)
    closed = np.empty(N)
    for l, E in enumerate(roots):
        p = monic_values(diag, offprod, E)
        direct[l] = np.sum(p[:N] ** 2 / h)
        gaps = np.prod([E - roots[j] for j in range(N) if j != l])
        closed[l] = p[N - 1] * gaps / h[N - 1]
    return direct, closed


def jacobi_matrix(diag: np.ndarray, offprod: np.ndarray) -> np.ndarray:
    """Dense symmetric Jacobi matrix (for cross-checks)"""
    off = np.sqrt(np.asarray(offprod, dtype=float))
    return np.diag(np.asarray(diag, dtype=float)) + np.diag(off, 1) + np.diag(off, -1)
