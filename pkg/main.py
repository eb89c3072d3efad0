#!/usr/bin/env python3
"""
Elliptic Hyperoctahedral Eigenbasis - Main Execution Script
Builds, diagonalizes and cross-checks the truncated elliptic difference operator
"""

import argparse
import logging
import sys
import os
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.config import Config
from limits import racah_g1, tridiag_m1
from model.couplings import CouplingParams, PARAM_KEYS
from model.validation import validate
from spectral.eigenbasis import compute_spectrum, eigen_residual
from spectral.operator import build_operator
from storage.results_store import ResultsStore
from sweeps.parameter_sweep import continuity_report, p_grid, run_sweep, dedupe_grid
from utils.errors import (
    BranchError, DegeneracyError, DomainError, EllipticModelError, LabelingError,
    NumericError, ParameterError, PoleError,
)
from verification.invariant_suite import run_verify

# Configure logging
logging.basicConfig(
    level=Config.LOG_LEVEL,
    format=Config.LOG_FORMAT,
    handlers=[
        logging.FileHandler(Config.LOG_FILE),
        logging.StreamHandler()
    ]
)

logger = logging.getLogger(__name__)

COMMANDS = ('spectrum', 'verify', 'special-m1', 'special-g1', 'sweep')
FORMATS = ('json', 'csv')

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_PARAMS = 2
EXIT_NUMERIC_FAILURE = 3

# CLI flag -> Config tolerance name
TOLERANCE_FLAGS = {
    'gap_tol': 'gap_tol_rel',
    'overlap_min': 'overlap_min',
    'sym_tol': 'sym_tol',
    'residual_tol': 'eig_residual_tol',
}


@dataclass
class RunConfig:
    """One CLI invocation"""
    command: str
    params: CouplingParams
    fmt: str = 'json'
    out: Optional[str] = None
    seed: int = Config.DEFAULT_SEED
    tolerances: Dict[str, float] = field(default_factory=dict)
    grid: List[float] = field(default_factory=list)
    workers: Optional[int] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise DomainError(f"Unknown command {self.command}")
        if self.fmt not in FORMATS:
            raise DomainError(f"Unknown format {self.fmt}")
        for name, value in self.tolerances.items():
            if not value > 0:
                raise DomainError(f"Tolerance {name} must be positive (got {value})")
        if self.command == 'sweep' and not self.grid:
            raise DomainError("sweep needs --p-values or --p-start/--p-stop/--p-step")

    def digest_payload(self) -> Dict:
        return {
            'command': self.command,
            'params': self.params.to_dict(),
            'tolerances': self.tolerances,
            'seed': self.seed,
            'grid': self.grid,
        }


class EigenbasisPipeline:
    """Main orchestrator for the eigenbasis commands"""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.store = ResultsStore()

    def _output_path(self) -> str:
        if self.cfg.out:
            return self.cfg.out
        return self.store.default_path(self.cfg.command.replace('-', '_'), self.cfg.digest_payload(), self.cfg.fmt)

    def _require_valid(self, params: CouplingParams):
        report = validate(params)
        report.raise_if_invalid()
        for warning in report.genericity_warnings:
            logger.info(f"Genericity note: {warning}")
        return report

    def run_spectrum(self) -> Dict:
        """
        Labeled spectrum and normalized eigenbasis

        Returns:
            Dictionary with the output path and the SpectralResult
        """
        params = self.cfg.params
        logger.info("=" * 50)
        logger.info("STEP 1: VALIDATION")
        logger.info("=" * 50)
        self._require_valid(params)

        logger.info("=" * 50)
        logger.info("STEP 2: DIAGONALIZATION AND LABELING")
        logger.info("=" * 50)
        op, result = compute_spectrum(params)
        logger.info(f"Eigen-residual {eigen_residual(op, result):.3e}, min gap {result.min_gap:.3e}")

        logger.info("=" * 50)
        logger.info("STEP 3: SAVING RESULTS")
        logger.info("=" * 50)
        path = self._output_path()
        if self.cfg.fmt == 'json':
            self.store.save_spectral_json(result, path)
        else:
            self.store.save_spectral_csv(result, path)
        self.print_spectrum(result)
        return {'path': path, 'result': result}

    def run_verify(self) -> Dict:
        params = self.cfg.params
        logger.info("=" * 50)
        logger.info("STEP 1: INVARIANT SUITE")
        logger.info("=" * 50)
        report = run_verify(params, seed=self.cfg.seed)

        path = self._output_path()
        if self.cfg.fmt == 'json':
            self.store.write_json({'params': params.to_dict(), 'seed': self.cfg.seed,
                                   'passed': report.passed,
                                   'checks': report.table.to_dict(orient='records')}, path)
        else:
            self.store.save_table(report.table, path, {'params': json.dumps(params.to_dict(), sort_keys=True),
                                                       'seed': self.cfg.seed})
        print(report.table.to_string(index=False))
        return {'path': path, 'report': report}

    def run_special_m1(self) -> Dict:
        params = self.cfg.params
        self._require_valid(params)
        model = tridiag_m1.coeffs_m1(params)
        roots = tridiag_m1.spectrum_m1(model)
        norms = [tridiag_m1.norms_m1(model, l) for l in range(len(roots))]
        table = tridiag_m1.eigenfunction_table(model)

        path = self._output_path()
        if self.cfg.fmt == 'json':
            self.store.write_json({
                'params': params.to_dict(),
                'A': model.A.tolist(),
                'B_plus': model.B_plus.tolist(),
                'B_minus': model.B_minus.tolist(),
                'roots': roots.tolist(),
                'norms': [{'l': l, 'direct': d, 'closed': c} for l, (d, c) in enumerate(norms)],
                'eigenfunctions': table.tolist(),
                'form_deviation': model.form_deviation,
            }, path)
        else:
            rows = [{'l': l, 'k': k, 'E': roots[l], 'h': table[l, k], 'N': norms[l][1]}
                    for l in range(len(roots)) for k in range(table.shape[1])]
            self.store.save_table(pd.DataFrame(rows), path,
                                  {'params': json.dumps(params.to_dict(), sort_keys=True)})
        logger.info(f"m=1 roots: {roots}")
        return {'path': path, 'model': model}

    def run_special_g1(self) -> Dict:
        params = self.cfg.params
        self._require_valid(params)
        if not params.is_g1_branch:
            raise BranchError("special-g1 needs the g1 branch (g = 1)")
        chain = racah_g1.coeffs_g1(params)
        roots = racah_g1.racah_roots(chain)
        lattice_eigs = []
        op = build_operator(params)
        for nu in op.lattice:
            ef = racah_g1.schur_eigenfunction(chain, nu, op.lattice)
            u = ef.unnormalized
            residual = float(np.max(np.abs(op.apply(u) - ef.energy * u)) / np.max(np.abs(u)))
            lattice_eigs.append((nu, ef, residual))

        path = self._output_path()
        if self.cfg.fmt == 'json':
            self.store.write_json({
                'params': params.to_dict(),
                'a': chain.a.tolist(),
                'b_plus': chain.b_plus.tolist(),
                'b_minus': chain.b_minus.tolist(),
                'roots': roots.tolist(),
                'lattice_order': [list(lam) for lam in op.lattice],
                'schur': [{'nu': list(nu), 'E': ef.energy, 's': ef.s_values.tolist(),
                           'N_direct': ef.N_direct, 'N_closed': ef.N_closed, 'residual': res}
                          for nu, ef, res in lattice_eigs],
            }, path)
        else:
            rows = [{'nu': str(nu), 'lambda': str(lam), 'E': ef.energy, 's': s,
                     'N': ef.N_closed, 'residual': res}
                    for nu, ef, res in lattice_eigs for lam, s in zip(op.lattice, ef.s_values)]
            self.store.save_table(pd.DataFrame(rows), path,
                                  {'params': json.dumps(params.to_dict(), sort_keys=True)})
        logger.info(f"g=1 chain roots: {roots}")
        return {'path': path, 'chain': chain}

    def run_sweep(self) -> Dict:
        params = self.cfg.params
        self._require_valid(params)
        logger.info("=" * 50)
        logger.info("STEP 1: SWEEP")
        logger.info("=" * 50)
        table = run_sweep(params, self.cfg.grid, self.cfg.workers, self.cfg.tolerances)

        logger.info("=" * 50)
        logger.info("STEP 2: CONTINUITY MONITOR")
        logger.info("=" * 50)
        continuity = continuity_report(table)

        path = self._output_path()
        if self.cfg.fmt == 'json':
            self.store.write_json({'params': params.to_dict(), 'grid': self.cfg.grid,
                                   'rows': table.to_dict(orient='records'),
                                   'continuity': continuity.to_dict(orient='records')}, path)
        else:
            self.store.save_table(table, path, {'params': json.dumps(params.to_dict(), sort_keys=True)})
        return {'path': path, 'table': table, 'continuity': continuity}

    def run(self) -> Dict:
        handlers = {
            'spectrum': self.run_spectrum,
            'verify': self.run_verify,
            'special-m1': self.run_special_m1,
            'special-g1': self.run_special_g1,
            'sweep': self.run_sweep,
        }
        with Config.override(**self.cfg.tolerances):
            return handlers[self.cfg.command]()

    @staticmethod
    def print_spectrum(result):
        """Print labeled eigenvalues to console"""
        print("\n" + "=" * 60)
        print(f"SPECTRUM ({result.params.label()})")
        print("=" * 60)
        for nu, E, h0 in zip(result.lattice, result.eigenvalues, result.eigenfunctions[:, 0]):
            print(f"  nu={nu}  E={E: .12f}  h0={h0:.6e}")
        print(f"Min gap: {result.min_gap:.3e}  Path: {len(result.path)} steps")
        print("=" * 60)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Elliptic Hyperoctahedral Eigenbasis - spectra, eigenfunctions and invariant checks"
    )
    common = argparse.ArgumentParser(add_help=False)
    for key in ('n', 'm'):
        common.add_argument(f'--{key}', type=int, default=None)
    for key in ('g', 'g1', 'g2', 'g3', 'g4', 'gp1', 'gp2', 'gp3', 'gp4', 'p', 'tol'):
        common.add_argument(f'--{key}', type=float, default=None)
    common.add_argument('--branch', choices=['generic', 'g1'], default=None)
    common.add_argument('--params', type=str, default=None, help='JSON file with parameter values')
    common.add_argument('--format', choices=FORMATS, default='json', dest='fmt')
    common.add_argument('--out', type=str, default=None)
    common.add_argument('--seed', type=int, default=Config.DEFAULT_SEED)
    common.add_argument('--gap-tol', type=float, default=None)
    common.add_argument('--overlap-min', type=float, default=None)
    common.add_argument('--sym-tol', type=float, default=None)
    common.add_argument('--residual-tol', type=float, default=None)

    sub = parser.add_subparsers(dest='command', required=True)
    for command in COMMANDS:
        p = sub.add_parser(command, parents=[common])
        if command == 'sweep':
            p.add_argument('--p-start', type=float, default=None)
            p.add_argument('--p-stop', type=float, default=None)
            p.add_argument('--p-step', type=float, default=None)
            p.add_argument('--p-values', type=str, default=None, help='Comma-separated nome values')
            p.add_argument('--workers', type=int, default=None)
    return parser


def params_from_args(args: argparse.Namespace) -> CouplingParams:
    """Defaults, then --params file, then individual flags"""
    if args.params:
        with open(args.params, 'r') as f:
            values = json.load(f)
        if not isinstance(values, dict):
            raise DomainError("Parameter file must hold a JSON object")
    else:
        values = dict(Config.DEFAULT_PARAMS)
    for key in PARAM_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if args.branch is not None:
        values['branch'] = args.branch
    if args.command == 'special-g1':
        values.setdefault('branch', 'g1')
        if args.g is None and values.get('branch') == 'g1':
            values['g'] = 1.0
    return CouplingParams.from_dict(values)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    tolerances = {TOLERANCE_FLAGS[name]: getattr(args, name)
                  for name in TOLERANCE_FLAGS if getattr(args, name) is not None}
    grid: List[float] = []
    workers = None
    if args.command == 'sweep':
        workers = args.workers
        if args.p_values:
            grid = dedupe_grid(float(x) for x in args.p_values.split(',') if x.strip())
        elif None not in (args.p_start, args.p_stop, args.p_step):
            grid = p_grid(args.p_start, args.p_stop, args.p_step)
    cfg = RunConfig(command=args.command, params=params_from_args(args), fmt=args.fmt, out=args.out,
                    seed=args.seed, tolerances=tolerances, grid=grid, workers=workers)
    cfg.validate()
    return cfg


def _report_invalid(error: Exception):
    report = getattr(error, 'report', None)
    payload = report.to_dict() if report is not None else {'valid': False, 'violations': [str(error)]}
    print(json.dumps(payload, indent=2, sort_keys=True, default=str), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)
    Config.create_directories()

    try:
        cfg = config_from_args(args)
        outcome = EigenbasisPipeline(cfg).run()
    except (ParameterError, DomainError, BranchError, ValueError) as e:
        logger.error(f"Invalid parameters: {e}")
        _report_invalid(e)
        return EXIT_INVALID_PARAMS
    except (NumericError, LabelingError, DegeneracyError, PoleError) as e:
        logger.error(f"Numeric failure: {e}", exc_info=True)
        diagnostics = {'error': type(e).__name__, 'message': str(e)}
        diagnostics.update({k: v for k, v in getattr(e, 'diagnostics', {}).items() if k != 'params'})
        if isinstance(e, LabelingError):
            diagnostics.update({'p': e.p, 'pair': e.pair})
        print(json.dumps(diagnostics, indent=2, sort_keys=True, default=str), file=sys.stderr)
        return EXIT_NUMERIC_FAILURE
    except EllipticModelError as e:
        logger.error(f"Pipeline failed: {e}", exc_info=True)
        return EXIT_NUMERIC_FAILURE

    if cfg.command == 'verify' and not outcome['report'].passed:
        logger.warning(f"{len(outcome['report'].failures())} invariant(s) failed")
        return EXIT_VERIFY_FAILED
    logger.info(f"Output written to {outcome['path']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
