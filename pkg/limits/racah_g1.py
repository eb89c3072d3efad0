"""
The g = 1 branch: elliptic Racah chain on n+m nodes and Schur-type eigenfunctions

At g = 1 the diagonal coefficient becomes additive,
A_lambda = sum_j a_{n-j+lambda_j}, the hopping coefficients factor through
the Vandermonde-type product V_lambda, and eigenfunctions are ratios of
n x n determinants of one-body polynomials evaluated on the chain roots.
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor

from kernel.theta_kernel import bracket, bracket_log_deriv, on_real_zero, shifted_factorial
from lattice.partition_lattice import Partition, PartitionLattice
from limits.jacobi_chain import chain_norms, jacobi_roots, link_norms, monic_values
from model.coefficients import c_residues, coeff_A
from model.couplings import CouplingParams
from utils.errors import DegeneracyError, DomainError, NumericError
from utils.log_signed import LogSigned

logger = logging.getLogger(__name__)


@dataclass
class RacahChain:
    """One-body chain data at g = 1"""
    params: CouplingParams
    a: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray
    residues: np.ndarray
    delta1: np.ndarray
    c1: np.ndarray
    roots: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return len(self.a)

    @property
    def offprod(self) -> np.ndarray:
        """b^+_{k-1} b^-_k for k = 1..N-1"""
        return self.b_plus[:-1] * self.b_minus[1:]

    def one_body_norms(self) -> Tuple[np.ndarray, np.ndarray]:
        """Direct and closed-form one-body norms N_l at the roots"""
        return chain_norms(self.a, self.offprod, racah_roots(self))


def _one_body_quotient(params: CouplingParams, ctx, shift: np.ndarray, sign: int) -> np.ndarray:
    """prod_r [g1 + s g_r + k]_r [g1 + s(g'_r + 1/2) + k]_r / ([g1+k]_r [g1 + s/2 + k]_r)"""
    base = params.g1 + shift
    out = np.ones_like(base)
    for r in range(1, 5):
        g_r, gp_r = params.g_r[r - 1], params.gp_r[r - 1]
        num = bracket(ctx, base + sign * g_r, r) * bracket(ctx, base + sign * (gp_r + 0.5), r)
        den = bracket(ctx, base, r) * bracket(ctx, base + sign * 0.5, r)
        out = out * num / den
    return out


def coeffs_g1(params: CouplingParams) -> RacahChain:
    """
    Build the elliptic Racah chain for the g = 1 branch

    Args:
        params: couplings with branch 'g1' (g = 1)

    Returns:
        RacahChain with exact boundary zeros b^-_0 = b^+_{N-1} = 0
    """
    if not params.is_g1_branch:
        raise DomainError("coeffs_g1 requires the g1 branch")
    ctx = params.theta_context()
    N = params.n + params.m
    k = np.arange(N, dtype=float)
    residues = c_residues(params, ctx)

    a = np.zeros(N)
    for r in range(1, 5):
        if residues[r - 1] == 0.0:
            continue
        a += residues[r - 1] * (bracket_log_deriv(ctx, params.g1 + k + 0.5, r)
                                - bracket_log_deriv(ctx, params.g1 + k - 0.5, r))

    b_plus = np.zeros(N)
    b_minus = np.zeros(N)
    b_plus[:-1] = _one_body_quotient(params, ctx, k[:-1], +1)
    b_minus[1:] = _one_body_quotient(params, ctx, k[1:], -1)

    if not on_real_zero(ctx, params.g1 + params.g2 + N - 1, 2):
        logger.warning("Truncation zero of b^+_{N-1} not on the lattice; check alpha")

    g1 = params.g1
    delta1 = np.empty(N)
    c1 = np.empty(N)
    for kk in range(N):
        w = LogSigned.ratio([bracket(ctx, 2 * g1 + 2 * kk, 1)], [bracket(ctx, 2 * g1, 1)])
        c = LogSigned.one()
        for r in range(1, 5):
            g_r, gp_r = params.g_r[r - 1], params.gp_r[r - 1]
            w = w * shifted_factorial(ctx, [g1 + g_r, g1 + gp_r + 0.5], r, kk) \
                / shifted_factorial(ctx, [g1 + 1 - g_r, g1 - gp_r + 0.5], r, kk)
            c = c * shifted_factorial(ctx, [g1, g1 + 0.5], r, kk) \
                / shifted_factorial(ctx, [g1 + g_r, g1 + gp_r + 0.5], r, kk)
        delta1[kk] = w.to_float()
        c1[kk] = c.to_float()

    chain = RacahChain(params=params, a=a, b_plus=b_plus, b_minus=b_minus,
                       residues=residues, delta1=delta1, c1=c1)
    if np.any(chain.offprod <= 0):
        raise DomainError(f"Nonpositive link product in the Racah chain: {chain.offprod}")
    logger.info(f"Racah chain on {N} nodes built ({params.label()})")
    return chain


def delta1_telescoped(chain: RacahChain) -> np.ndarray:
    """Delta^(1)_k = prod_{j<k} b^+_j / b^-_{j+1}"""
    ratios = chain.b_plus[:-1] / chain.b_minus[1:]
    return np.concatenate([[1.0], np.cumprod(ratios)])


def c1_telescoped(chain: RacahChain) -> np.ndarray:
    """c_k = prod_{j<k} 1 / b^+_j"""
    return np.concatenate([[1.0], np.cumprod(1.0 / chain.b_plus[:-1])])


def racah_polys(chain: RacahChain, k: int, E: float) -> float:
    """Monic P_k(E) from P_{k+1} = (E - a_k) P_k - b^+_{k-1} b^-_k P_{k-1}"""
    if not 0 <= k <= chain.size:
        raise DomainError(f"Degree {k} outside [0, {chain.size}]")
    return float(monic_values(chain.a, chain.offprod, E)[k])


def racah_roots(chain: RacahChain) -> np.ndarray:
    """Roots E_0 > E_1 > ... > E_{N-1} of the top-degree polynomial"""
    if chain.roots is None:
        chain.roots = jacobi_roots(chain.a, chain.offprod)
    return chain.roots


def additive_A(chain: RacahChain, lam: Partition) -> float:
    n = chain.params.n
    return float(sum(chain.a[n - j + lam[j - 1]] for j in range(1, n + 1)))


def vandermonde_V(params: CouplingParams, lam: Partition, ctx=None) -> LogSigned:
    """V_lambda = prod_{j<k, delta} [rho_j + delta rho_k + lam_j + delta lam_k]_1 / [rho_j + delta rho_k]_1"""
    ctx = ctx if ctx is not None else params.theta_context()
    rho = params.rho
    num, den = [], []
    for j in range(params.n):
        for k in range(j + 1, params.n):
            for delta in (1, -1):
                x = rho[j] + delta * rho[k]
                num.append(x + lam[j] + delta * lam[k])
                den.append(x)
    if not num:
        return LogSigned.one()
    return LogSigned.ratio(bracket(ctx, np.array(num), 1), bracket(ctx, np.array(den), 1))


def factored_B(chain: RacahChain, lam: Partition, j: int, eps: int) -> float:
    """(V_{lam + eps e_j} / V_lam) b^{eps}_{n-j+lam_j}"""
    params = chain.params
    n = params.n
    idx = n - j + lam[j - 1]
    b = chain.b_plus[idx] if eps == 1 else chain.b_minus[idx]
    if b == 0.0:
        return 0.0
    moved = list(lam)
    moved[j - 1] += eps
    ratio = vandermonde_V(params, tuple(moved)) / vandermonde_V(params, lam)
    return ratio.to_float() * b


def weight_g1(chain: RacahChain, lam: Partition) -> LogSigned:
    """Delta_lambda at g = 1: V_lambda^2 prod_j Delta^(1)_{n-j+lam_j} / Delta^(1)_{n-j}"""
    n = chain.params.n
    ratio = [chain.delta1[n - j + lam[j - 1]] / chain.delta1[n - j] for j in range(1, n + 1)]
    return vandermonde_V(chain.params, lam) ** 2 * LogSigned.from_array(ratio)


def c_lambda_g1(chain: RacahChain, lam: Partition) -> LogSigned:
    """C_lambda at g = 1: (1/V_lambda) prod_j c_{n-j+lam_j} / c_{n-j}"""
    n = chain.params.n
    ratio = [chain.c1[n - j + lam[j - 1]] / chain.c1[n - j] for j in range(1, n + 1)]
    return LogSigned.from_array(ratio) / vandermonde_V(chain.params, lam)


def _lu_det(matrix: np.ndarray) -> float:
    """Determinant via LU with partial pivoting"""
    lu, piv = lu_factor(matrix)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return float((-1) ** swaps * np.prod(np.diag(lu)))


@dataclass
class SchurEigenfunction:
    """Generalized Schur eigenfunction for one spectral label nu"""
    nu: Partition
    energy: float
    s_values: np.ndarray
    a0: float
    c_lambda: List[LogSigned]
    weights: np.ndarray
    N_direct: float
    N_closed: float

    @property
    def h(self) -> np.ndarray:
        """h_lambda = c_lambda s_lambda / N_nu"""
        c = np.array([x.to_float() for x in self.c_lambda])
        return c * self.s_values / self.N_closed

    @property
    def unnormalized(self) -> np.ndarray:
        """c_lambda s_lambda"""
        return np.array([x.to_float() for x in self.c_lambda]) * self.s_values


def spectral_nodes(chain: RacahChain, nu: Partition) -> np.ndarray:
    """E_{n-j+nu_j} for j = 1..n"""
    n = chain.params.n
    roots = racah_roots(chain)
    return np.array([roots[n - j + nu[j - 1]] for j in range(1, n + 1)])


def schur_eigenfunction(chain: RacahChain, nu: Partition,
                        lattice: Optional[PartitionLattice] = None,
                        vandermonde_tol: float = 1e-9) -> SchurEigenfunction:
    """
    Determinant-ratio eigenfunction s^(nu)_lambda = a_lambda / a_0

    Args:
        chain: Racah chain with (or without) cached roots
        nu: spectral label
        lattice: lattice for lambda (built if omitted)
        vandermonde_tol: relative tolerance for the a_0 Vandermonde check

    Returns:
        SchurEigenfunction with both norm evaluations
    """
    params = chain.params
    n = params.n
    if lattice is None:
        lattice = PartitionLattice(n, params.m)
    nodes = spectral_nodes(chain, nu)
    table = np.array([monic_values(chain.a, chain.offprod, x) for x in nodes])  # table[j, degree]

    def a_det(lam: Partition) -> float:
        degrees = [n - i + lam[i - 1] for i in range(1, n + 1)]
        return _lu_det(table[:, degrees].T)

    a0 = a_det(lattice.zero)
    vdm = float(np.prod([nodes[j] - nodes[k] for j in range(n) for k in range(j + 1, n)]))
    if abs(a0) < np.finfo(float).tiny or vdm == 0.0:
        raise DegeneracyError(f"Vanishing a_0 for nu={nu}")
    if abs(a0 - vdm) > vandermonde_tol * abs(vdm):
        raise NumericError(f"a_0 deviates from the Vandermonde product for nu={nu}",
                           {'a0': a0, 'vandermonde': vdm})

    s_values = np.array([a_det(lam) / a0 for lam in lattice])
    c_lambda = [c_lambda_g1(chain, lam) for lam in lattice]
    weights = np.array([weight_g1(chain, lam).to_float() for lam in lattice])
    c = np.array([x.to_float() for x in c_lambda])
    N_direct = float(np.sum(c ** 2 * s_values ** 2 * weights))

    n1_direct, n1_closed = chain.one_body_norms()
    closed = 1.0 / a0 ** 2
    for j in range(1, n + 1):
        closed *= n1_closed[n - j + nu[j - 1]] / (chain.delta1[n - j] * chain.c1[n - j] ** 2)

    return SchurEigenfunction(nu=nu, energy=float(np.sum(nodes)), s_values=s_values, a0=a0,
                              c_lambda=c_lambda, weights=weights,
                              N_direct=N_direct, N_closed=float(closed))


def norms_g1(chain: RacahChain, nu: Partition,
             lattice: Optional[PartitionLattice] = None) -> Tuple[float, float]:
    """(direct sum, Cauchy-Binet closed form) of N_nu"""
    ef = schur_eigenfunction(chain, nu, lattice)
    return ef.N_direct, ef.N_closed


def one_body_orthogonality(chain: RacahChain) -> np.ndarray:
    """Matrix sum_k c_k^2 P_k(E_j) P_k(E_l) Delta^(1)_k over root pairs"""
    roots = racah_roots(chain)
    N = chain.size
    P = np.array([monic_values(chain.a, chain.offprod, E)[:N] for E in roots])
    weights = chain.c1 ** 2 * chain.delta1
    return (P * weights) @ P.T


def additive_spectrum(chain: RacahChain, lattice: Optional[PartitionLattice] = None) -> np.ndarray:
    """E_nu = sum_j E_{n-j+nu_j} in lattice order"""
    params = chain.params
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    return np.array([float(np.sum(spectral_nodes(chain, nu))) for nu in lattice])


def finite_g_limit_A(params: CouplingParams, lam: Partition, h: float = 1e-5) -> float:
    """
    Richardson-extrapolated limit of the generic A_lambda as g -> 1

    Symmetric averages at offsets h and h/2 are combined to cancel the
    O(h^2) term.
    """
    def symmetric(step: float) -> float:
        up = replace(params, g=1.0 + step, branch='generic')
        down = replace(params, g=1.0 - step, branch='generic')
        return 0.5 * (coeff_A(up, lam) + coeff_A(down, lam))

    return (4.0 * symmetric(h / 2) - symmetric(h)) / 3.0
