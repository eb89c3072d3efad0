"""
Elliptic weights Delta_lambda making H self-adjoint
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from kernel.theta_kernel import ThetaContext, bracket, shifted_factorial
from lattice.partition_lattice import Partition, PartitionLattice
from model.couplings import CouplingParams
from utils.log_signed import LogSigned

logger = logging.getLogger(__name__)


def _pairs(n: int):
    for j in range(n):
        for k in range(j + 1, n):
            for delta in (1, -1):
                yield j, k, delta


def weight_delta_raw(params: CouplingParams, lam: Partition,
                     ctx: Optional[ThetaContext] = None) -> LogSigned:
    """Delta_lambda in its defining form with [rho+1]_{r,l} / [rho]_{r,l} factors"""
    ctx = ctx if ctx is not None else params.theta_context()
    rho = params.rho
    total = LogSigned.one()
    for j in range(params.n):
        l = lam[j]
        for r in range(1, 5):
            g_r, gp_r = params.g_r[r - 1], params.gp_r[r - 1]
            num = shifted_factorial(ctx, [rho[j] + 1, rho[j] + g_r, rho[j] + gp_r + 0.5], r, l)
            den = shifted_factorial(ctx, [rho[j], rho[j] + 1 - g_r, rho[j] - gp_r + 0.5], r, l)
            total = total * num / den
    g = params.g
    for j, k, delta in _pairs(params.n):
        x = rho[j] + delta * rho[k]
        l = lam[j] + delta * lam[k]
        num = shifted_factorial(ctx, [x + g, x + 1], 1, l)
        den = shifted_factorial(ctx, [x, x + 1 - g], 1, l)
        total = total * num / den
    return total


def weight_delta(params: CouplingParams, lam: Partition,
                 ctx: Optional[ThetaContext] = None) -> LogSigned:
    """
    Delta_lambda in the form rewritten with the duplication formula

    Args:
        params: couplings
        lam: partition in Lambda^(n,m)
        ctx: theta context (built from params if omitted)

    Returns:
        Positive LogSigned weight, equal to 1 at the zero partition
    """
    ctx = ctx if ctx is not None else params.theta_context()
    rho = params.rho
    total = LogSigned.one()
    for j in range(params.n):
        l = lam[j]
        if l == 0:
            continue
        total = total * LogSigned.ratio([bracket(ctx, 2 * rho[j] + 2 * l, 1)], [bracket(ctx, 2 * rho[j], 1)])
        for r in range(1, 5):
            g_r, gp_r = params.g_r[r - 1], params.gp_r[r - 1]
            num = shifted_factorial(ctx, [rho[j] + g_r, rho[j] + gp_r + 0.5], r, l)
            den = shifted_factorial(ctx, [rho[j] + 1 - g_r, rho[j] - gp_r + 0.5], r, l)
            total = total * num / den
    g = params.g
    for j, k, delta in _pairs(params.n):
        l = lam[j] + delta * lam[k]
        if l == 0:
            continue
        x = rho[j] + delta * rho[k]
        total = total * LogSigned.ratio([bracket(ctx, x + l, 1)], [bracket(ctx, x, 1)])
        total = total * shifted_factorial(ctx, [x + g], 1, l) / shifted_factorial(ctx, [x + 1 - g], 1, l)
    return total


@dataclass
class WeightFunction:
    """Delta_lambda over a lattice, in rank order"""
    lattice: PartitionLattice
    delta: List[LogSigned]

    @property
    def log_delta(self) -> np.ndarray:
        return np.array([w.logmag for w in self.delta])

    @property
    def values(self) -> np.ndarray:
        return np.array([w.to_float() for w in self.delta])

    def all_positive(self) -> bool:
        return all(w.sign == 1 for w in self.delta)


def compute_weights(params: CouplingParams, lattice: Optional[PartitionLattice] = None) -> WeightFunction:
    if lattice is None:
        lattice = PartitionLattice(params.n, params.m)
    ctx = params.theta_context()
    delta = [weight_delta(params, lam, ctx) for lam in lattice]
    negative = [lam for lam, w in zip(lattice, delta) if w.sign != 1]
    if negative:
        logger.warning(f"Non-positive weights at {negative[:5]} ({params.label()})")
    return WeightFunction(lattice=lattice, delta=delta)
