"""
Parameter validation against the coupling and truncation conditions
"""
import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional

from config.config import Config
from lattice.partition_lattice import PartitionLattice
from model.couplings import BRANCHES, CouplingParams
from model.coefficients import min_denominator
from utils.errors import EllipticModelError, ParameterError

logger = logging.getLogger(__name__)


@dataclass
class ValidationReport:
    """Outcome of validate(); violations make the parameters unusable"""
    valid: bool
    branch: str
    alpha: Optional[float] = None
    violations: List[str] = field(default_factory=list)
    near_poles: List[str] = field(default_factory=list)
    genericity_warnings: List[str] = field(default_factory=list)
    min_denominator: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)

    def raise_if_invalid(self):
        if not self.valid:
            raise ParameterError("Invalid parameters: " + "; ".join(self.violations), report=self)


def _finite(params: CouplingParams) -> bool:
    values = [params.g, *params.g_r, *params.gp_r, params.p, params.tol]
    return all(math.isfinite(v) for v in values)


def _domain_violations(params: CouplingParams) -> List[str]:
    violations = []
    if params.n < 1:
        violations.append(f"n must be >= 1 (got {params.n})")
    if params.m < 1:
        violations.append(f"m must be >= 1 (got {params.m})")
    if params.branch not in BRANCHES:
        violations.append(f"branch must be one of {BRANCHES} (got {params.branch})")
    if not _finite(params):
        violations.append("all couplings, p and tol must be finite")
        return violations
    if params.g <= 0:
        violations.append(f"g must be positive (got {params.g})")
    for r in (1, 2):
        g_r, gp_r = params.g_r[r - 1], params.gp_r[r - 1]
        if g_r <= 0:
            violations.append(f"g{r} must be positive (got {g_r})")
        if not abs(gp_r) < g_r + 0.5:
            violations.append(f"|gp{r}| < g{r} + 1/2 violated (|{gp_r}| vs {g_r + 0.5})")
    if not abs(params.p) < 1:
        violations.append(f"nome must satisfy |p| < 1 (got {params.p})")
    if params.tol <= 0:
        violations.append(f"tol must be positive (got {params.tol})")

    at_one = abs(params.g - 1.0) < Config.POLE_TOL
    if params.branch == 'generic' and at_one and not params.primed_free:
        violations.append("g = 1 with nonzero primed couplings hits the pole of c_r; use branch g1")
    if params.branch == 'g1' and not at_one:
        violations.append(f"branch g1 requires g = 1 (got {params.g})")
    return violations


def genericity_warnings(params: CouplingParams, periods: int = 2) -> List[str]:
    """
    Check k g + l g1 against (1/2)Z + (pi/2alpha)Z for 0 <= k < n, l in {0,1}

    Only |b| <= periods multiples of pi/(2 alpha) are inspected.
    """
    half_period = math.pi / (2 * params.alpha)
    warnings = []
    for k in range(params.n):
        for l in (0, 1):
            if k == 0 and l == 0:
                continue
            x = k * params.g + l * params.g1
            for b in range(-periods, periods + 1):
                t = 2 * (x - b * half_period)
                if abs(t - round(t)) < Config.POLE_TOL:
                    warnings.append(f"{k}g + {l}g1 = {x:g} lies on (1/2)Z + (pi/2alpha)Z (b={b})")
                    break
    return warnings


def validate(params: CouplingParams, scan_poles: bool = True) -> ValidationReport:
    """
    Validate couplings, compute alpha and flag proximity to coefficient poles

    Args:
        params: couplings to check
        scan_poles: evaluate all coefficient denominators on the lattice

    Returns:
        ValidationReport (never raises for bad parameters)
    """
    report = ValidationReport(valid=False, branch=params.branch)
    report.violations = _domain_violations(params)
    if report.violations:
        logger.info(f"Parameter validation failed: {report.violations}")
        return report

    report.alpha = params.alpha
    report.genericity_warnings = genericity_warnings(params)
    report.valid = True

    if scan_poles:
        try:
            smallest = min_denominator(params, PartitionLattice(params.n, params.m))
            report.min_denominator = smallest
            if smallest < Config.POLE_TOL:
                report.near_poles.append(f"coefficient denominator of size {smallest:.3e}")
        except EllipticModelError as e:
            report.near_poles.append(f"pole scan failed: {e}")
    if report.near_poles:
        logger.warning(f"Near-pole parameters: {report.near_poles}")
    return report


def require_valid(params: CouplingParams) -> ValidationReport:
    report = validate(params)
    report.raise_if_invalid()
    return report
