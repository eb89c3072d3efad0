"""
Invariant checks across all modules at a parameter point and its neighborhood
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from config.config import Config
from kernel.theta_kernel import ThetaContext, bracket, bracket_prime_at_zero
from limits import racah_g1, tridiag_m1, trig_limit
from model.couplings import CouplingParams
from model.validation import require_valid, validate
from spectral.eigenbasis import (
    compute_spectrum, dual_orthogonality_residual, eigen_residual,
    orthogonality_residual, projector_agreement,
)
from spectral.labeling import diagonalize
from spectral.operator import (
    boundary_vanishing, build_operator, detailed_balance_residual, row_sums, symmetry_residual,
)
from utils.errors import ConditioningError, EllipticModelError

logger = logging.getLogger(__name__)

DETAILED_BALANCE_TOL = 1e-11
P0_SPECTRUM_TOL = 1e-10
NORM_PRODUCT_TOL = 1e-9
M1_ROOT_TOL = 1e-10
M1_NORM_TOL = 1e-9
G1_TOL = 1e-8
G1_LIMIT_TOL = 1e-5
THETA_TOL = 1e-12
THETA_DERIVATIVE_TOL = 1e-8
THETA_IDENTITY_SAMPLES = 1000


@dataclass
class VerifyReport:
    """Pass/fail per invariant with measured residuals"""
    table: pd.DataFrame

    @property
    def passed(self) -> bool:
        return bool(self.table['passed'].all()) if len(self.table) else True

    def failures(self) -> pd.DataFrame:
        return self.table[~self.table['passed']]


class InvariantSuite:
    """Run every module's property checks at one parameter point"""

    def __init__(self, params: CouplingParams, seed: int = None):
        self.params = params
        self.seed = Config.DEFAULT_SEED if seed is None else seed
        self.rng = np.random.default_rng(self.seed)
        self.rows: List[Dict] = []

    def _record(self, check: str, value: float, tolerance: float, point: str = 'center',
                passed: Optional[bool] = None, note: str = ''):
        if passed is None:
            passed = bool(np.isfinite(value) and value <= tolerance)
        self.rows.append({
            'point': point,
            'check': check,
            'value': float(value),
            'tolerance': float(tolerance),
            'passed': passed,
            'note': note,
        })
        if not passed:
            logger.warning(f"Invariant {check} failed at {point}: {value:.3e} > {tolerance:.1e}")

    def _guarded(self, check: str, point: str, func: Callable[[], None]):
        """Run a group of checks; an exception becomes a failed row"""
        try:
            func()
        except EllipticModelError as e:
            logger.error(f"Check group {check} raised at {point}: {e}", exc_info=True)
            self._record(check, np.inf, 0.0, point, passed=False, note=f"{type(e).__name__}: {e}")

    # Individual groups

    def check_theta(self, params: CouplingParams, point: str = 'center'):
        """Parity, normalization and series/product agreement"""
        ctx = params.theta_context()
        z = self.rng.uniform(-3.0, 3.0, size=64)
        parity = np.max(np.abs(bracket(ctx, -z, 1) + bracket(ctx, z, 1)))
        for r in (2, 3, 4):
            parity = max(parity, np.max(np.abs(bracket(ctx, -z, r) - bracket(ctx, z, r))))
        self._record('theta_parity', parity, THETA_TOL, point)
        normalization = max(abs(bracket(ctx, 0.0, r) - 1.0) for r in (2, 3, 4))
        self._record('theta_normalization', normalization, THETA_TOL, point)
        step = 1e-6
        slope = (bracket(ctx, step, 1) - bracket(ctx, -step, 1)) / (2 * step)
        expected = bracket_prime_at_zero(ctx)
        self._record('theta_prime_at_zero', abs(slope - expected) / expected, THETA_DERIVATIVE_TOL, point)
        if abs(params.p) <= Config.SERIES_P_CUTOFF:
            series = ThetaContext(params.alpha, params.p, params.tol, method='series')
            product = ThetaContext(params.alpha, params.p, params.tol, method='product')
            worst = 0.0
            for r in range(1, 5):
                a, b = bracket(series, z, r), bracket(product, z, r)
                worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0))))
            self._record('theta_series_vs_product', worst, THETA_TOL, point)

    def check_theta_identities(self, samples: int = THETA_IDENTITY_SAMPLES, point: str = 'center'):
        """Duplication [2z]_1 = 2 prod_r [z]_r and parity over random (z, p, alpha)"""
        zs = self.rng.uniform(-3.0, 3.0, size=samples)
        nomes = self.rng.uniform(-0.9, 0.9, size=samples)
        alphas = self.rng.uniform(0.1, 3.0, size=samples)
        duplication, parity = 0.0, 0.0
        for z, p, alpha in zip(zs, nomes, alphas):
            ctx = ThetaContext(float(alpha), float(p))
            values = np.array([bracket(ctx, z, r) for r in range(1, 5)])
            mirrored = np.array([bracket(ctx, -z, r) for r in range(1, 5)])
            doubled = bracket(ctx, 2 * z, 1)
            duplication = max(duplication, abs(doubled - 2 * np.prod(values)) / max(1.0, abs(doubled)))
            mirrored[0] = -mirrored[0]
            parity = max(parity, float(np.max(np.abs(mirrored - values) / np.maximum(np.abs(values), 1.0))))
        self._record('theta_duplication', duplication, THETA_TOL, point, note=f"{samples} samples")
        self._record('theta_parity_sweep', parity, THETA_TOL, point, note=f"{samples} samples")

    def check_operator(self, params: CouplingParams, point: str = 'center'):
        op = build_operator(params)
        counts = boundary_vanishing(op)
        self._record('truncation_off_lattice_zero', counts['off_lattice_nonzero'], 0, point)
        self._record('truncation_on_lattice_positive', counts['on_lattice_nonpositive'], 0, point)
        self._record('weights_positive', 0 if op.weights.all_positive() else 1, 0, point)
        self._record('detailed_balance', detailed_balance_residual(op), DETAILED_BALANCE_TOL, point)
        self._record('self_adjoint', symmetry_residual(op), Config.SYM_TOL, point)
        pairs = diagonalize(op)
        trace = abs(np.sum(pairs.eigenvalues) - op.trace()) / max(1.0, np.max(np.abs(pairs.eigenvalues)))
        self._record('trace', trace, P0_SPECTRUM_TOL, point)

    def check_trig_limit(self, params: CouplingParams, point: str = 'center'):
        base = params.with_p(0.0)
        op = build_operator(base)
        pairs = diagonalize(op)
        closed = np.sort(trig_limit.spectrum_p0(base, op.lattice))
        width = max(1.0, float(np.max(np.abs(closed))))
        self._record('p0_spectrum', np.max(np.abs(np.sort(pairs.eigenvalues) - closed)) / width,
                     P0_SPECTRUM_TOL, point)
        c = trig_limit.row_sum_constant(base)
        self._record('p0_row_sum', np.max(np.abs(row_sums(op) - c)) / max(1.0, abs(c)), P0_SPECTRUM_TOL, point)
        mass = trig_limit.total_mass(base, op.lattice)
        self._record('p0_total_mass', abs(mass - trig_limit.total_dual_mass(base, op.lattice)) / mass,
                     NORM_PRODUCT_TOL, point)
        if trig_limit.product_is_exact(base):
            self._record('p0_mass_product', abs(mass - trig_limit.total_mass_product(base)) / mass,
                         NORM_PRODUCT_TOL, point)

    def check_eigenbasis(self, params: CouplingParams, point: str = 'center'):
        op, result = compute_spectrum(params)
        self._record('eigen_residual', eigen_residual(op, result), Config.EIG_RESIDUAL_TOL, point)
        self._record('orthogonality', orthogonality_residual(result), Config.ORTHO_TOL, point)
        self._record('dual_orthogonality', dual_orthogonality_residual(result), Config.ORTHO_TOL, point)
        worst, skipped = 0.0, 0
        for nu in result.lattice:
            if nu in result.unresolved or nu in result.zero_locus:
                skipped += 1
                continue
            try:
                worst = max(worst, projector_agreement(op, result, nu))
            except ConditioningError:
                skipped += 1
        self._record('projector_route', worst, Config.PROJECTOR_TOL, point,
                     note=f"{skipped} labels skipped" if skipped else '')
        if params.p == 0.0:
            h0 = result.eigenfunctions[:, 0]
            nq = np.array([trig_limit.norm_product_nq(params, nu) for nu in result.lattice])
            self._record('p0_norm_product', np.max(np.abs(h0 * nq - 1.0)), NORM_PRODUCT_TOL, point)

    def check_m1(self, params: CouplingParams, point: str = 'center'):
        model = tridiag_m1.coeffs_m1(params)
        roots = tridiag_m1.spectrum_m1(model)
        op = build_operator(params)
        numeric = np.sort(diagonalize(op).eigenvalues)[::-1]
        scale = max(1.0, float(np.max(np.abs(roots))))
        self._record('m1_roots_vs_solver', np.max(np.abs(roots - numeric)) / scale, M1_ROOT_TOL, point)
        worst = 0.0
        for l in range(len(roots)):
            direct, closed = tridiag_m1.norms_m1(model, l)
            worst = max(worst, abs(direct - closed) / abs(direct))
        self._record('m1_christoffel_darboux_norms', worst, M1_NORM_TOL, point)
        x = float(np.max(roots) + self.rng.uniform(0.1, 1.0))
        self._record('m1_characteristic', tridiag_m1.characteristic_residual(model, x), M1_NORM_TOL, point)

    def check_g1(self, params: CouplingParams, point: str = 'center'):
        chain = racah_g1.coeffs_g1(params)
        op = build_operator(params)
        lattice = op.lattice
        numeric = np.sort(diagonalize(op).eigenvalues)
        additive = np.sort(racah_g1.additive_spectrum(chain, lattice))
        scale = max(1.0, float(np.max(np.abs(additive))))
        self._record('g1_additive_spectrum', np.max(np.abs(numeric - additive)) / scale, G1_TOL, point)
        worst_res, worst_norm = 0.0, 0.0
        for nu in lattice:
            ef = racah_g1.schur_eigenfunction(chain, nu, lattice)
            u = ef.unnormalized
            r = op.apply(u) - ef.energy * u
            worst_res = max(worst_res, float(np.max(np.abs(r)) / np.max(np.abs(u))))
            worst_norm = max(worst_norm, abs(ef.N_direct - ef.N_closed) / abs(ef.N_direct))
        self._record('g1_schur_residual', worst_res, G1_TOL, point)
        self._record('g1_cauchy_binet_norms', worst_norm, G1_TOL, point)
        lam = lattice.unrank(len(lattice) - 1)
        limit = racah_g1.finite_g_limit_A(params, lam)
        closed = racah_g1.additive_A(chain, lam)
        self._record('g1_finite_g_limit', abs(limit - closed) / max(1.0, abs(closed)), G1_LIMIT_TOL, point)

    # Neighborhood

    def neighborhood(self, size: int, perturbation: float) -> List[CouplingParams]:
        """Random valid perturbations of the couplings"""
        points = []
        attempts = 0
        keys = ('g1', 'g2', 'g3', 'g4', 'gp1', 'gp2', 'gp3', 'gp4')
        if not self.params.is_g1_branch:
            keys = ('g',) + keys
        while len(points) < size and attempts < 20 * size:
            attempts += 1
            changes = {k: getattr(self.params, k) * (1 + self.rng.uniform(-perturbation, perturbation))
                       for k in keys}
            candidate = replace(self.params, **changes)
            report = validate(candidate, scan_poles=False)
            if report.valid:
                points.append(candidate)
        return points

    def run(self, neighborhood_size: int = None, perturbation: float = None) -> VerifyReport:
        """Full suite at the center and the core checks on the neighborhood"""
        size = Config.VERIFY_NEIGHBORHOOD_SIZE if neighborhood_size is None else neighborhood_size
        perturbation = Config.VERIFY_PERTURBATION if perturbation is None else perturbation
        params = self.params
        require_valid(params)

        self._guarded('theta', 'center', lambda: self.check_theta(params))
        self._guarded('theta_identities', 'center', self.check_theta_identities)
        self._guarded('operator', 'center', lambda: self.check_operator(params))
        self._guarded('trig_limit', 'center', lambda: self.check_trig_limit(params))
        self._guarded('eigenbasis', 'center', lambda: self.check_eigenbasis(params))
        if not params.is_g1_branch:
            self._guarded('eigenbasis_p0', 'center_p0', lambda: self.check_eigenbasis(params.with_p(0.0), 'center_p0'))
        if params.m == 1 and not params.is_g1_branch:
            self._guarded('m1', 'center', lambda: self.check_m1(params))
        if params.is_g1_branch:
            self._guarded('g1', 'center', lambda: self.check_g1(params))

        for i, candidate in enumerate(self.neighborhood(size, perturbation)):
            point = f"neighbor_{i}"
            self._guarded('operator', point, lambda c=candidate, pt=point: self.check_operator(c, pt))
            self._guarded('trig_limit', point, lambda c=candidate, pt=point: self.check_trig_limit(c, pt))

        report = VerifyReport(table=pd.DataFrame(self.rows))
        logger.info(f"Verify: {int(report.table['passed'].sum())}/{len(report.table)} invariants passed")
        return report


def run_verify(params: CouplingParams, seed: int = None, neighborhood_size: int = None) -> VerifyReport:
    return InvariantSuite(params, seed).run(neighborhood_size)
