"""
Tests for the command line, result files and sweeps
"""
import json

import numpy as np
import pandas as pd
import pytest

from config.config import Config
from main import EXIT_INVALID_PARAMS, EXIT_OK, main
from model.couplings import CouplingParams
from spectral.eigenbasis import compute_spectrum
from storage.results_store import ResultsStore, run_digest
from sweeps.parameter_sweep import continuity_report, dedupe_grid, p_grid, run_sweep


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def params():
    return CouplingParams.from_dict(Config.DEFAULT_PARAMS)


class TestResultsStore:
    def test_json_round_trip(self, params, workdir):
        _, result = compute_spectrum(params)
        store = ResultsStore(str(workdir / 'results'))
        path = store.save_spectral_json(result, str(workdir / 'spectrum.json'))
        loaded = store.load_spectral_json(path)
        assert loaded.params == params
        assert list(loaded.lattice) == list(result.lattice)
        np.testing.assert_array_equal(loaded.eigenvalues, result.eigenvalues)
        np.testing.assert_array_equal(loaded.eigenfunctions, result.eigenfunctions)
        np.testing.assert_allclose(np.abs(loaded.vectors), np.abs(result.vectors), atol=1e-12)

    def test_csv_layout(self, params, workdir):
        _, result = compute_spectrum(params)
        store = ResultsStore(str(workdir / 'results'))
        path = store.save_spectral_csv(result, str(workdir / 'spectrum.csv'))
        table = ResultsStore.read_csv(path)
        assert list(table['lambda']) == ['(0,0)', '(1,0)', '(2,0)', '(1,1)', '(2,1)', '(2,2)']
        np.testing.assert_allclose(table['h(1,0)'].to_numpy(), result.eigenfunctions[1], rtol=1e-15)
        with open(path) as f:
            header = [line for line in f if line.startswith('#')]
        assert any(line.startswith('# params:') for line in header)

    def test_csv_floats_are_exact(self, params, workdir):
        _, result = compute_spectrum(params)
        store = ResultsStore(str(workdir / 'results'))
        path = store.save_spectral_csv(result, str(workdir / 'spectrum.csv'))
        table = ResultsStore.read_csv(path)
        columns = [c for c in table.columns if c.startswith('h(')]
        np.testing.assert_array_equal(table[columns].to_numpy().T, result.eigenfunctions)

    def test_default_path_is_deterministic(self, workdir):
        store = ResultsStore(str(workdir / 'results'))
        payload = {'command': 'spectrum', 'params': {'n': 2}}
        assert store.default_path('spectrum', payload, 'json') == store.default_path('spectrum', payload, 'json')
        assert run_digest(payload) != run_digest({'command': 'spectrum', 'params': {'n': 3}})


class TestSweep:
    def test_grid_helpers(self):
        assert dedupe_grid([0.2, 0.1, 0.1, 0.1 + 1e-15]) == [0.1, 0.2]
        assert p_grid(0.0, 0.3, 0.1) == [0.0, 0.1, 0.2, 0.3]
        with pytest.raises(ValueError):
            p_grid(0.0, 0.3, 0.0)

    def test_in_process_sweep(self, params):
        table = run_sweep(params, [0.1, 0.0, 0.1], workers=1)
        assert sorted(table['p'].unique()) == [0.0, 0.1]
        assert len(table) == 2 * 6
        assert set(table['status']) == {'ok'}
        report = continuity_report(table)
        assert len(report) == 6
        assert list(report.columns) == ['nu', 'max_jump', 'max_slope', 'slope_bound', 'flagged']

    def test_failed_point_is_reported(self, params):
        table = run_sweep(params, [0.1], workers=1, tolerances={'gap_tol_rel': 1.0})
        assert len(table) == 1
        assert table['rank'].iloc[0] == -1
        assert table['status'].iloc[0] == 'LabelingError'


class TestCommandLine:
    def test_spectrum_json(self, workdir):
        out = workdir / 'spectrum.json'
        assert main(['spectrum', '--p', '0.2', '--out', str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload['params']['p'] == 0.2
        assert len(payload['eigenvalues']) == 6
        assert payload['lattice_order'][0] == [0, 0]
        assert 'min_gap' in payload['diagnostics']

    def test_spectrum_is_deterministic(self, workdir):
        first, second = workdir / 'a.json', workdir / 'b.json'
        assert main(['spectrum', '--out', str(first)]) == EXIT_OK
        assert main(['spectrum', '--out', str(second)]) == EXIT_OK
        assert first.read_text() == second.read_text()

    def test_params_file(self, workdir):
        values = {**Config.DEFAULT_PARAMS, 'n': 1, 'm': 3}
        path = workdir / 'params.json'
        path.write_text(json.dumps(values))
        out = workdir / 'spectrum.csv'
        assert main(['spectrum', '--params', str(path), '--format', 'csv', '--out', str(out)]) == EXIT_OK
        assert len(ResultsStore.read_csv(str(out))) == 4

    def test_invalid_parameters(self, workdir, capsys):
        assert main(['spectrum', '--g', '-0.5', '--out', str(workdir / 'x.json')]) == EXIT_INVALID_PARAMS
        err = capsys.readouterr().err
        report = json.loads(err[err.index('{'):])
        assert report['valid'] is False
        assert report['violations']

    def test_m1_on_wrong_level(self, workdir):
        assert main(['special-m1', '--out', str(workdir / 'm1.json')]) == EXIT_INVALID_PARAMS

    def test_m1(self, workdir):
        out = workdir / 'm1.json'
        assert main(['special-m1', '--n', '3', '--m', '1', '--out', str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert len(payload['roots']) == 4
        for row in payload['norms']:
            assert row['closed'] == pytest.approx(row['direct'], rel=1e-9)

    def test_g1_defaults_to_branch(self, workdir):
        out = workdir / 'g1.json'
        assert main(['special-g1', '--p', '0.1', '--out', str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload['params']['branch'] == 'g1'
        assert payload['params']['g'] == 1.0
        assert max(row['residual'] for row in payload['schur']) < 1e-8

    def test_verify(self, workdir):
        out = workdir / 'verify.json'
        code = main(['verify', '--n', '1', '--m', '2', '--out', str(out)])
        payload = json.loads(out.read_text())
        assert payload['passed'] == (code == EXIT_OK)
        assert {row['check'] for row in payload['checks']} >= {'detailed_balance', 'p0_spectrum', 'orthogonality'}

    def test_verify_passes_at_defaults(self, workdir):
        out = workdir / 'verify_defaults.json'
        assert main(['verify', '--out', str(out)]) == EXIT_OK
        checks = {row['check'] for row in json.loads(out.read_text())['checks']}
        assert {'p0_total_mass', 'p0_norm_product', 'theta_duplication', 'theta_parity_sweep'} <= checks
        assert 'p0_mass_product' not in checks

    def test_sweep_csv(self, workdir):
        out = workdir / 'sweep.csv'
        assert main(['sweep', '--p-values', '0.1,0.1,0.2', '--format', 'csv', '--out', str(out)]) == EXIT_OK
        table = pd.read_csv(out, comment='#')
        assert sorted(table['p'].unique()) == [0.1, 0.2]

    def test_sweep_needs_grid(self, workdir):
        assert main(['sweep', '--out', str(workdir / 's.json')]) == EXIT_INVALID_PARAMS

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(['plot'])

    def test_rejects_nonpositive_tolerance(self, workdir):
        assert main(['spectrum', '--gap-tol', '0', '--out', str(workdir / 'x.json')]) == EXIT_INVALID_PARAMS
