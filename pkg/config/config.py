"""
Configuration settings for the elliptic hyperoctahedral eigenbasis toolkit
"""
import os
import logging
from contextlib import contextmanager
from dotenv import load_dotenv
from typing import Dict, Iterator

# Load environment variables
load_dotenv()

class Config:
    """Central configuration class"""

    # Theta kernel
    SERIES_TOL = 1e-16  # Relative truncation tolerance for theta series
    SERIES_MAX_TERMS = 64
    SERIES_P_CUTOFF = 0.5  # |p| above this switches to the product form
    PRODUCT_MAX_FACTORS = 4000
    POLE_TOL = 1e-9  # Distance to a theta zero treated as a pole / exact zero

    # Operator checks
    SYM_TOL = 1e-10  # max|S - S^T| relative to max|S|
    EIG_RESIDUAL_TOL = 1e-9
    ORTHO_TOL = 1e-9
    PROJECTOR_TOL = 1e-7
    PROJECTOR_MAX_AMPLIFICATION = 1e10

    # Eigenvalue labeling by continuation in p
    GAP_TOL_REL = 1e-8  # Relative to spectral width
    OVERLAP_MIN = 0.9
    P_STEP_INIT = 0.05
    P_STEP_FLOOR = 1e-4
    ZERO_LOCUS_TOL = 1e-12  # |f_0| below this is reported as the finite zero locus

    # Default coupling set (n=2, m=2 sample)
    DEFAULT_PARAMS = {
        'n': 2, 'm': 2,
        'g': 0.5,
        'g1': 0.6, 'g2': 0.7, 'g3': 0.1, 'g4': 0.1,
        'gp1': 0.05, 'gp2': 0.05, 'gp3': 0.05, 'gp4': 0.05,
        'p': 0.3,
    }

    # Verification
    VERIFY_NEIGHBORHOOD_SIZE = 3
    VERIFY_PERTURBATION = 0.05
    DEFAULT_SEED = 0

    # Sweeps
    SWEEP_WORKERS = int(os.getenv('ELLIPTIC_THREADS', '1'))
    SWEEP_P_DECIMALS = 12  # Rounding used to deduplicate grid points

    # Output Settings
    OUTPUT_DIR = os.getenv('ELLIPTIC_OUTPUT_DIR', 'outputs')
    RESULTS_DIR = os.path.join(OUTPUT_DIR, 'results')
    REPORTS_DIR = os.path.join(OUTPUT_DIR, 'reports')

    # Logging
    LOG_LEVEL = getattr(logging, os.getenv('ELLIPTIC_LOG_LEVEL', 'INFO').upper(), logging.INFO)
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_FILE = 'elliptic_eigenbasis.log'

    # Names accepted by override() and the CLI
    TOLERANCE_KEYS = (
        'SERIES_TOL', 'POLE_TOL', 'SYM_TOL', 'EIG_RESIDUAL_TOL', 'ORTHO_TOL',
        'PROJECTOR_TOL', 'GAP_TOL_REL', 'OVERLAP_MIN', 'P_STEP_INIT', 'P_STEP_FLOOR',
    )

    @classmethod
    def create_directories(cls):
        """Create necessary directories if they don't exist"""
        for directory in [cls.OUTPUT_DIR, cls.RESULTS_DIR, cls.REPORTS_DIR]:
            os.makedirs(directory, exist_ok=True)

    @classmethod
    def tolerances(cls) -> Dict[str, float]:
        """Snapshot of the current tolerance settings"""
        return {key.lower(): getattr(cls, key) for key in cls.TOLERANCE_KEYS}

    @classmethod
    @contextmanager
    def override(cls, **overrides: float) -> Iterator[None]:
        """
        Temporarily replace tolerance settings

        Args:
            **overrides: lower- or upper-case tolerance names with new values
        """
        saved = {}
        try:
            for name, value in overrides.items():
                if value is None:
                    continue
                key = name.upper()
                if key not in cls.TOLERANCE_KEYS:
                    raise ValueError(f"Unknown tolerance: {name}")
                saved[key] = getattr(cls, key)
                setattr(cls, key, float(value))
            cls.validate_config()
            yield
        finally:
            for key, value in saved.items():
                setattr(cls, key, value)

    @classmethod
    def validate_config(cls) -> bool:
        """Validate configuration settings"""
        for key in cls.TOLERANCE_KEYS:
            if getattr(cls, key) <= 0:
                raise ValueError(f"{key} must be positive")

        if not (0 < cls.OVERLAP_MIN <= 1):
            raise ValueError("OVERLAP_MIN must be in (0, 1]")

        if cls.P_STEP_FLOOR > cls.P_STEP_INIT:
            raise ValueError("P_STEP_FLOOR must not exceed P_STEP_INIT")

        if not (0 <= cls.SERIES_P_CUTOFF < 1):
            raise ValueError("SERIES_P_CUTOFF must be in [0, 1)")

        if cls.SWEEP_WORKERS < 1:
            raise ValueError("ELLIPTIC_THREADS must be at least 1")

        return True

# Initialize configuration
Config.validate_config()
