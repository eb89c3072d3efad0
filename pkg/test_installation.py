#!/usr/bin/env python3
"""
Script to verify installation and basic functionality
"""

import sys
import os

def test_imports():
    """Check that all modules can be imported"""
    print("Testing imports...")

    modules = [
        ('config.config', 'Config'),
        ('kernel.theta_kernel', 'ThetaContext'),
        ('lattice.partition_lattice', 'PartitionLattice'),
        ('model.couplings', 'CouplingParams'),
        ('spectral.eigenbasis', 'compute_spectrum'),
        ('limits.trig_limit', 'spectrum_p0'),
        ('limits.tridiag_m1', 'coeffs_m1'),
        ('limits.racah_g1', 'coeffs_g1'),
        ('verification.invariant_suite', 'run_verify'),
        ('storage.results_store', 'ResultsStore'),
        ('sweeps.parameter_sweep', 'run_sweep'),
    ]
    for module, name in modules:
        try:
            getattr(__import__(module, fromlist=[name]), name)
            print(f"✓ {module} imported")
        except Exception as e:
            print(f"✗ {module} import failed: {e}")
            return False

    return True

def test_config():
    """Check configuration"""
    print("\nTesting configuration...")

    try:
        from config.config import Config

        Config.validate_config()
        print(f"✓ Tolerances valid ({len(Config.TOLERANCE_KEYS)} settings)")
        print(f"✓ Sweep workers: {Config.SWEEP_WORKERS}")

        for dir_path in [Config.OUTPUT_DIR, Config.RESULTS_DIR, Config.REPORTS_DIR]:
            if os.path.exists(dir_path):
                print(f"✓ Directory exists: {dir_path}")
            else:
                print(f"⚠ Directory missing: {dir_path} (will be created on first run)")

        return True

    except Exception as e:
        print(f"✗ Configuration test failed: {e}")
        return False

def test_dependencies():
    """Check that required packages are installed"""
    print("\nTesting dependencies...")

    required_packages = ['numpy', 'scipy', 'pandas', 'tqdm', 'dotenv', 'mpmath', 'pytest']

    missing = []
    for package in required_packages:
        try:
            __import__(package)
            print(f"✓ {package} installed")
        except ImportError:
            print(f"✗ {package} not installed")
            missing.append(package)

    if missing:
        print(f"\n⚠ Missing packages: {', '.join(missing)}")
        print("Install them with: pip install -r requirements.txt")
        return False

    return True

def test_small_spectrum():
    """Diagonalize the smallest nontrivial lattice"""
    print("\nTesting a small spectrum...")

    try:
        from config.config import Config
        from model.couplings import CouplingParams
        from spectral.eigenbasis import compute_spectrum, orthogonality_residual

        params = CouplingParams.from_dict({**Config.DEFAULT_PARAMS, 'n': 1, 'm': 1})
        _, result = compute_spectrum(params)
        residual = orthogonality_residual(result)
        print(f"✓ Eigenvalues: {', '.join(f'{e:.6f}' for e in result.eigenvalues)}")
        print(f"✓ Orthogonality residual: {residual:.2e}")
        return residual < Config.ORTHO_TOL

    except Exception as e:
        print(f"✗ Spectrum test failed: {e}")
        return False

def main():
    """Run all checks"""
    print("=" * 60)
    print("Elliptic Eigenbasis - Installation Test")
    print("=" * 60)

    if not test_imports():
        print("\n❌ Import test failed. Check your installation.")
        sys.exit(1)

    if not test_dependencies():
        print("\n❌ Dependency test failed. Install missing packages.")
        sys.exit(1)

    if not test_config():
        print("\n⚠ Configuration invalid. Check your .env file.")
        sys.exit(1)

    if not test_small_spectrum():
        print("\n❌ Spectrum test failed.")
        sys.exit(1)

    print("\n" + "=" * 60)
    print("✅ Installation test completed!")
    print("\nNext steps:")
    print("1. Run: python main.py spectrum --p 0.3")
    print("2. Or: python main.py verify --n 2 --m 2")
    print("3. Run the test suite: pytest")
    print("=" * 60)

if __name__ == "__main__":
    main()
