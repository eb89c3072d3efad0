"""
Reading and writing spectra, eigenfunction tables, sweeps and verify reports
"""
import os
import json
import hashlib
import logging
from typing import Dict, Optional

import numpy as np
import pandas as pd

from config.config import Config
from lattice.partition_lattice import PartitionLattice
from model.couplings import CouplingParams
from spectral.labeling import SpectralResult
from utils.errors import DomainError

logger = logging.getLogger(__name__)


def _nu_key(nu) -> str:
    return "(" + ",".join(str(x) for x in nu) + ")"


def run_digest(payload: Dict) -> str:
    """Stable short digest of a run configuration"""
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha1(text.encode('utf-8')).hexdigest()[:12]


class ResultsStore:
    """Handle result files under Config.RESULTS_DIR"""

    def __init__(self, results_dir: str = None):
        if results_dir is None:
            results_dir = Config.RESULTS_DIR
        self.results_dir = results_dir

    def default_path(self, command: str, payload: Dict, fmt: str) -> str:
        """File name derived from the run configuration (no timestamps)"""
        os.makedirs(self.results_dir, exist_ok=True)
        return os.path.join(self.results_dir, f"{command}_{run_digest(payload)}.{fmt}")

    # Spectral results

    @staticmethod
    def spectral_payload(result: SpectralResult) -> Dict:
        """JSON-ready dict of a labeled, normalized spectrum"""
        if result.eigenfunctions is None:
            raise DomainError("Spectral result has no eigenfunctions; run eigenbasis_h first")
        lattice = list(result.lattice)
        return {
            'params': result.params.to_dict(),
            'lattice_order': [list(lam) for lam in lattice],
            'eigenvalues': [{'nu': list(nu), 'E': float(E)} for nu, E in zip(lattice, result.eigenvalues)],
            'eigenfunctions': [{'nu': list(nu), 'values': [float(x) for x in row]}
                               for nu, row in zip(lattice, result.eigenfunctions)],
            'norms': [{'nu': list(nu), 'norm': float(N)} for nu, N in zip(lattice, result.norms)],
            'log_delta': [float(x) for x in result.log_delta],
            'diagnostics': result.diagnostics(),
        }

    def save_spectral_json(self, result: SpectralResult, path: str) -> str:
        payload = self.spectral_payload(result)
        self.write_json(payload, path)
        logger.info(f"Spectrum saved to {path}")
        return path

    def load_spectral_json(self, path: str) -> SpectralResult:
        """Rebuild a SpectralResult from a saved JSON file"""
        with open(path, 'r') as f:
            payload = json.load(f)
        params = CouplingParams.from_dict(payload['params'])
        lattice = PartitionLattice(params.n, params.m)
        order = [tuple(lam) for lam in payload['lattice_order']]
        if order != list(lattice):
            raise DomainError(f"Lattice order in {path} does not match Lambda^({params.n},{params.m})")

        eigenvalues = np.array([row['E'] for row in payload['eigenvalues']])
        h = np.array([row['values'] for row in payload['eigenfunctions']])
        norms = np.array([row['norm'] for row in payload['norms']])
        log_delta = np.array(payload['log_delta'])
        diag = payload['diagnostics']
        zero_locus = [tuple(nu) for nu in diag.get('zero_locus', [])]

        # unit Delta-norm vectors in the symmetrized basis
        scale = np.array([1.0 if nu in zero_locus else np.sqrt(N) for nu, N in zip(lattice, norms)])
        vectors = (np.exp(0.5 * log_delta)[None, :] * h / scale[:, None]).T
        return SpectralResult(
            params=params, lattice=lattice, eigenvalues=eigenvalues, vectors=vectors,
            log_delta=log_delta, min_gap=diag['min_gap'], path=list(diag['path']),
            sym_residual=diag['sym_residual'], eig_residual=diag['eig_residual'],
            unresolved=[tuple(nu) for nu in diag.get('unresolved', [])],
            eigenfunctions=h, norms=norms, zero_locus=zero_locus,
        )

    def save_spectral_csv(self, result: SpectralResult, path: str) -> str:
        """lambda-major eigenfunction table with '#' metadata lines"""
        lattice = list(result.lattice)
        table = pd.DataFrame({'lambda': [_nu_key(lam) for lam in lattice]})
        for nu, row in zip(lattice, result.eigenfunctions):
            table[f"h{_nu_key(nu)}"] = row
        metadata = {
            'params': json.dumps(result.params.to_dict(), sort_keys=True),
            'lattice_order': " ".join(_nu_key(lam) for lam in lattice),
            'eigenvalues': " ".join(repr(float(E)) for E in result.eigenvalues),
            'norms': " ".join(repr(float(N)) for N in result.norms),
        }
        self.write_csv(table, path, metadata)
        logger.info(f"Eigenfunction table saved to {path}")
        return path

    # Generic writers

    @staticmethod
    def write_json(payload: Dict, path: str):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w') as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")

    @staticmethod
    def write_csv(df: pd.DataFrame, path: str, metadata: Optional[Dict] = None):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w') as f:
            for key, value in (metadata or {}).items():
                f.write(f"# {key}: {value}\n")
            df.to_csv(f, index=False, float_format='%.17g')

    @staticmethod
    def read_csv(path: str) -> pd.DataFrame:
        return pd.read_csv(path, comment='#', float_precision='round_trip')

    def save_table(self, df: pd.DataFrame, path: str, metadata: Optional[Dict] = None) -> str:
        """Sweep tables and verify reports"""
        self.write_csv(df, path, metadata)
        logger.info(f"Table with {len(df)} rows saved to {path}")
        return path
