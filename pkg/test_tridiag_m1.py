"""
Tests for the closed-form m = 1 solver
"""
from dataclasses import replace

import numpy as np
import pytest

from limits import tridiag_m1
from limits.jacobi_chain import jacobi_matrix
from limits.trig_limit import eigenvalue_p0
from model.couplings import CouplingParams
from spectral.eigenbasis import compute_spectrum
from spectral.labeling import diagonalize
from spectral.operator import build_operator
from utils.errors import DomainError

COLUMN = {
    'n': 3, 'm': 1, 'g': 0.4,
    'g1': 0.6, 'g2': 0.7, 'g3': 0.1, 'g4': 0.15,
    'gp1': 0.1, 'gp2': 0.05, 'gp3': 0.02, 'gp4': 0.03,
    'p': 0.25,
}


@pytest.fixture
def params():
    return CouplingParams.from_dict(COLUMN)


@pytest.fixture
def model(params):
    return tridiag_m1.coeffs_m1(params)


class TestCoefficients:
    def test_telescoped_forms_agree(self, model):
        assert model.form_deviation < tridiag_m1.FORM_TOL

    @pytest.mark.parametrize("p", [0.0, -0.3, 0.7])
    def test_forms_agree_across_nomes(self, params, p):
        assert tridiag_m1.coeffs_m1(params.with_p(p)).form_deviation < tridiag_m1.FORM_TOL

    def test_boundary_entries(self, model):
        assert model.B_plus[-1] == 0.0
        assert model.B_minus[0] == 0.0
        assert np.all(model.offprod > 0)

    def test_matches_operator(self, params, model):
        op = build_operator(params)
        np.testing.assert_allclose(np.diag(op.matrix), model.A, rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(np.diag(op.matrix, 1), model.B_plus[:-1], rtol=1e-13)
        np.testing.assert_allclose(np.diag(op.matrix, -1), model.B_minus[1:], rtol=1e-13)

    def test_weights_from_chain(self, params, model):
        op = build_operator(params)
        np.testing.assert_allclose(model.delta, op.weights.values, rtol=1e-11)

    def test_wrong_level(self, params):
        with pytest.raises(DomainError):
            tridiag_m1.coeffs_m1(replace(params, m=2))

    def test_wrong_branch(self, params):
        with pytest.raises(DomainError):
            tridiag_m1.coeffs_m1(replace(params, g=1.0, branch='g1'))


class TestPolynomials:
    @pytest.mark.parametrize("E", [-2.3, 0.37, 1.9])
    def test_determinant_matches_recurrence(self, model, E):
        for k in range(model.n + 1):
            recurrence = tridiag_m1.poly_P(model, k, E)
            determinant = tridiag_m1.poly_P_determinant(model, k, E)
            assert recurrence == pytest.approx(determinant, rel=1e-11, abs=1e-12)

    def test_degree_range(self, model):
        with pytest.raises(DomainError):
            tridiag_m1.poly_P(model, model.n + 2, 0.0)

    def test_roots_are_zeros(self, model):
        for E in tridiag_m1.spectrum_m1(model):
            scale = np.prod(np.abs(E - model.A)) + 1.0
            assert abs(tridiag_m1.poly_P(model, model.n + 1, E)) < 1e-10 * scale

    def test_characteristic_polynomial(self, model):
        roots = tridiag_m1.spectrum_m1(model)
        for x in (roots[0] + 0.5, 0.5 * (roots[0] + roots[1]), roots[-1] - 1.0):
            assert tridiag_m1.characteristic_residual(model, x) < 1e-10

    def test_christoffel_darboux(self, model):
        lhs, rhs = tridiag_m1.christoffel_darboux(model, 0.4, -1.1)
        assert lhs == pytest.approx(rhs, rel=1e-10)
        lhs, rhs = tridiag_m1.confluent_christoffel_darboux(model, 0.4)
        assert lhs == pytest.approx(rhs, rel=1e-10)


class TestSpectrum:
    def test_roots_descending(self, model):
        roots = tridiag_m1.spectrum_m1(model)
        assert len(roots) == model.n + 1
        assert np.all(np.diff(roots) < 0)

    def test_roots_match_solver(self, params, model):
        numeric = np.sort(diagonalize(build_operator(params)).eigenvalues)[::-1]
        np.testing.assert_allclose(tridiag_m1.spectrum_m1(model), numeric, atol=1e-10)

    def test_roots_match_jacobi_matrix(self, model):
        matrix = jacobi_matrix(model.A, model.offprod)
        np.testing.assert_allclose(tridiag_m1.spectrum_m1(model), np.linalg.eigvalsh(matrix)[::-1], atol=1e-12)

    def test_norms(self, model):
        for l in range(model.n + 1):
            direct, closed = tridiag_m1.norms_m1(model, l)
            assert direct > 0
            assert closed == pytest.approx(direct, rel=1e-9)

    def test_eigenfunctions_match_eigenbasis(self, params, model):
        table = tridiag_m1.eigenfunction_table(model)
        _, result = compute_spectrum(params)
        np.testing.assert_allclose(result.eigenfunctions, table, rtol=1e-8, atol=1e-12)

    def test_zero_nome_matches_closed_spectrum(self, params):
        base = params.with_p(0.0)
        roots = tridiag_m1.spectrum_m1(tridiag_m1.coeffs_m1(base))
        expected = [eigenvalue_p0(base, tuple([1] * k + [0] * (base.n - k))) for k in range(base.n + 1)]
        np.testing.assert_allclose(roots, expected, atol=1e-10)
