"""
Parameter sweeps over the nome with a continuity monitor
"""
import logging
import concurrent.futures
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from config.config import Config
from model.couplings import CouplingParams
from spectral.eigenbasis import compute_spectrum
from utils.errors import EllipticModelError

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['p', 'rank', 'nu', 'E', 'h0', 'min_gap', 'status', 'message']
SLOPE_FACTOR = 10.0  # jumps above this multiple of the median slope are flagged


def dedupe_grid(values: Iterable[float], decimals: int = None) -> List[float]:
    """Round to `decimals` digits, drop duplicates, sort ascending"""
    decimals = Config.SWEEP_P_DECIMALS if decimals is None else decimals
    return sorted({round(float(p), decimals) for p in values})


def p_grid(start: float, stop: float, step: float) -> List[float]:
    """Inclusive arithmetic grid from start to stop"""
    if step <= 0:
        raise ValueError(f"Grid step must be positive (got {step})")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return dedupe_grid(start + step * np.arange(max(count, 0)))


def evaluate_point(param_dict: Dict, p: float, tolerances: Optional[Dict] = None) -> List[Dict]:
    """
    Spectrum at one grid point; failures come back as a status row

    Runs in a worker process, so parameters and tolerances travel as plain dicts.
    """
    params = CouplingParams.from_dict(param_dict).with_p(p)
    try:
        with Config.override(**(tolerances or {})):
            _, result = compute_spectrum(params)
    except EllipticModelError as e:
        return [{'p': p, 'rank': -1, 'nu': '', 'E': np.nan, 'h0': np.nan, 'min_gap': np.nan,
                 'status': type(e).__name__, 'message': str(e)}]
    rows = []
    for rank, nu in enumerate(result.lattice):
        status = 'unresolved' if nu in result.unresolved else (
            'zero_locus' if nu in result.zero_locus else 'ok')
        rows.append({
            'p': p, 'rank': rank, 'nu': str(tuple(nu)),
            'E': float(result.eigenvalues[rank]),
            'h0': float(result.eigenfunctions[rank, 0]),
            'min_gap': float(result.min_gap),
            'status': status, 'message': '',
        })
    return rows


class ParameterSweep:
    """Independent spectra over a nome grid"""

    def __init__(self, params: CouplingParams, workers: int = None):
        self.params = params
        self.workers = Config.SWEEP_WORKERS if workers is None else workers

    def run(self, grid: Iterable[float], tolerances: Optional[Dict] = None) -> pd.DataFrame:
        """
        Evaluate every grid point and collect one row per (p, nu)

        Args:
            grid: nome values (deduplicated here)
            tolerances: Config overrides applied inside each task

        Returns:
            DataFrame sorted by (p, rank)
        """
        points = dedupe_grid(grid)
        param_dict = self.params.to_dict()
        logger.info(f"Sweeping {len(points)} nome values with {self.workers} worker(s)")

        rows: List[Dict] = []
        if self.workers <= 1 or len(points) == 1:
            for p in tqdm(points, desc="Sweep"):
                rows.extend(evaluate_point(param_dict, p, tolerances))
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=self.workers) as executor:
                futures = {executor.submit(evaluate_point, param_dict, p, tolerances): p for p in points}
                for future in tqdm(concurrent.futures.as_completed(futures), total=len(futures), desc="Sweep"):
                    p = futures[future]
                    try:
                        rows.extend(future.result())
                    except Exception as e:
                        logger.error(f"Worker failed at p={p}: {e}", exc_info=True)
                        rows.append({'p': p, 'rank': -1, 'nu': '', 'E': np.nan, 'h0': np.nan,
                                     'min_gap': np.nan, 'status': 'WorkerError', 'message': str(e)})

        table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        table = table.sort_values(['p', 'rank']).reset_index(drop=True)
        failed = table[table['rank'] < 0]
        if len(failed):
            logger.warning(f"{len(failed)} sweep point(s) failed: {failed['p'].tolist()}")
        return table


def continuity_report(table: pd.DataFrame, slope_factor: float = SLOPE_FACTOR) -> pd.DataFrame:
    """
    Max |Delta E| between adjacent nome values per label, against a fitted slope bound

    The bound is slope_factor times the median observed slope over all
    labels and steps; it is monitored, not enforced.
    """
    ok = table[table['status'].isin(['ok', 'zero_locus'])]
    slopes = []
    per_label = []
    for nu, group in ok.groupby('nu', sort=False):
        group = group.sort_values('p')
        dp = np.diff(group['p'].to_numpy())
        dE = np.abs(np.diff(group['E'].to_numpy()))
        if len(dp) == 0:
            continue
        slope = dE / dp
        slopes.extend(slope.tolist())
        per_label.append({'nu': nu, 'max_jump': float(dE.max()), 'max_slope': float(slope.max())})

    report = pd.DataFrame(per_label, columns=['nu', 'max_jump', 'max_slope'])
    bound = slope_factor * float(np.median(slopes)) if slopes else np.inf
    report['slope_bound'] = bound
    report['flagged'] = report['max_slope'] > bound
    for _, row in report[report['flagged']].iterrows():
        logger.warning(f"Eigenvalue {row['nu']} jumps faster than the fitted bound ({row['max_slope']:.3e})")
    return report


def run_sweep(params: CouplingParams, grid: Iterable[float], workers: int = None,
              tolerances: Optional[Dict] = None) -> pd.DataFrame:
    return ParameterSweep(params, workers).run(grid, tolerances)
