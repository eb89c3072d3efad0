"""
Coupling parameters, truncation condition and deformed Weyl vectors
"""
import math
import logging
from dataclasses import dataclass, field, fields, replace, asdict
from typing import Dict, Tuple

import numpy as np

from config.config import Config
from kernel.theta_kernel import ThetaContext
from utils.errors import DomainError

logger = logging.getLogger(__name__)

BRANCHES = ('generic', 'g1')

# Keys accepted in flat JSON parameter files
PARAM_KEYS = ('n', 'm', 'g', 'g1', 'g2', 'g3', 'g4', 'gp1', 'gp2', 'gp3', 'gp4', 'p', 'tol')


@dataclass(frozen=True)
class CouplingParams:
    """
    The nine couplings together with particle number n, level m and nome p

    alpha is fixed by the truncation condition
    alpha = pi / (m + (n-1) g + g1 + g2).
    """
    n: int
    m: int
    g: float
    g1: float
    g2: float
    g3: float = 0.0
    g4: float = 0.0
    gp1: float = 0.0
    gp2: float = 0.0
    gp3: float = 0.0
    gp4: float = 0.0
    p: float = 0.0
    tol: float = field(default_factory=lambda: Config.SERIES_TOL)
    branch: str = 'generic'

    @classmethod
    def from_dict(cls, data: Dict) -> 'CouplingParams':
        """Build from a flat key-value mapping; unknown keys are rejected"""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"Unknown parameter keys: {sorted(unknown)}")
        missing = {'n', 'm', 'g', 'g1', 'g2'} - set(data)
        if missing:
            raise DomainError(f"Missing parameter keys: {sorted(missing)}")
        kwargs = {}
        for key, value in data.items():
            if key in ('n', 'm'):
                if float(value) != int(value):
                    raise DomainError(f"{key} must be an integer, got {value}")
                kwargs[key] = int(value)
            elif key == 'branch':
                kwargs[key] = str(value)
            else:
                kwargs[key] = float(value)
        return cls(**kwargs)

    def to_dict(self) -> Dict:
        return asdict(self)

    def with_p(self, p: float) -> 'CouplingParams':
        return replace(self, p=float(p))

    def with_g(self, g: float) -> 'CouplingParams':
        return replace(self, g=float(g))

    @property
    def alpha(self) -> float:
        denom = self.m + (self.n - 1) * self.g + self.g1 + self.g2
        if denom <= 0:
            raise DomainError(f"Truncation condition has nonpositive denominator {denom}")
        return math.pi / denom

    @property
    def g_r(self) -> Tuple[float, float, float, float]:
        return (self.g1, self.g2, self.g3, self.g4)

    @property
    def gp_r(self) -> Tuple[float, float, float, float]:
        return (self.gp1, self.gp2, self.gp3, self.gp4)

    @property
    def is_g1_branch(self) -> bool:
        return self.branch == 'g1'

    @property
    def primed_free(self) -> bool:
        """All primed couplings vanish (then A_lambda is identically zero)"""
        return all(gp == 0.0 for gp in self.gp_r)

    @property
    def rho(self) -> np.ndarray:
        """rho_j = (n-j) g + g1, j = 1..n"""
        return weyl_vector(self).rho

    @property
    def rho_hat(self) -> np.ndarray:
        return weyl_vector(self).rho_hat

    def theta_context(self, method: str = 'auto') -> ThetaContext:
        return ThetaContext(alpha=self.alpha, p=self.p, tol=self.tol, method=method)

    def label(self) -> str:
        """Compact human-readable summary for log lines"""
        return (f"n={self.n} m={self.m} g={self.g:g} g_r={self.g_r} gp_r={self.gp_r} "
                f"p={self.p:g} branch={self.branch}")


@dataclass(frozen=True, eq=False)
class WeylVector:
    """Deformed Weyl vector rho and its spectral counterpart rho_hat"""
    rho: np.ndarray
    rho_hat: np.ndarray

    def extended_rho(self, g: float) -> np.ndarray:
        """rho_0, rho_1, ..., rho_n, rho_{n+1} with rho_0 = rho_1 + g and rho_{n+1} = rho_n - g"""
        return np.concatenate([[self.rho[0] + g], self.rho, [self.rho[-1] - g]])


def weyl_vector(params: CouplingParams) -> WeylVector:
    j = np.arange(1, params.n + 1)
    base = (params.n - j) * params.g
    rho = base + params.g1
    rho_hat = base + (params.g1 + params.g2 + params.gp1 + params.gp2) / 2
    return WeylVector(rho=rho, rho_hat=rho_hat)
