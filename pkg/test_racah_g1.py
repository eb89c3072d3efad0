"""
Tests for the g = 1 branch
"""
import numpy as np
import pytest

from lattice.partition_lattice import PartitionLattice
from limits import racah_g1
from model.coefficients import coeff_A, coeff_B
from model.couplings import CouplingParams
from model.weights import weight_delta
from spectral.eigenbasis import compute_spectrum
from spectral.labeling import diagonalize
from spectral.operator import build_operator
from utils.errors import BranchError, DomainError

AT_ONE = {
    'n': 2, 'm': 2, 'g': 1.0,
    'g1': 0.6, 'g2': 0.7, 'g3': 0.1, 'g4': 0.1,
    'gp1': 0.05, 'gp2': 0.05, 'gp3': 0.05, 'gp4': 0.05,
    'p': 0.2, 'branch': 'g1',
}


@pytest.fixture
def params():
    return CouplingParams.from_dict(AT_ONE)


@pytest.fixture
def chain(params):
    return racah_g1.coeffs_g1(params)


@pytest.fixture
def lattice(params):
    return PartitionLattice(params.n, params.m)


class TestChain:
    def test_size_and_boundary(self, params, chain):
        assert chain.size == params.n + params.m
        assert chain.b_minus[0] == 0.0
        assert chain.b_plus[-1] == 0.0
        assert np.all(chain.offprod > 0)

    def test_generic_branch_rejected(self, params):
        with pytest.raises(DomainError):
            racah_g1.coeffs_g1(CouplingParams.from_dict({**AT_ONE, 'g': 0.5, 'branch': 'generic'}))

    def test_telescoped_weights(self, chain):
        np.testing.assert_allclose(chain.delta1, racah_g1.delta1_telescoped(chain), rtol=1e-10)
        np.testing.assert_allclose(chain.c1, racah_g1.c1_telescoped(chain), rtol=1e-10)

    def test_roots_are_zeros(self, chain):
        roots = racah_g1.racah_roots(chain)
        assert np.all(np.diff(roots) < 0)
        for E in roots:
            scale = np.prod(np.abs(E - chain.a)) + 1.0
            assert abs(racah_g1.racah_polys(chain, chain.size, E)) < 1e-10 * scale

    def test_one_body_orthogonality(self, chain):
        gram = racah_g1.one_body_orthogonality(chain)
        diag = np.diag(gram)
        assert np.all(diag > 0)
        off = np.abs(gram - np.diag(diag)) / np.sqrt(np.outer(diag, diag))
        assert off.max() < 1e-9

    def test_one_body_norms(self, chain):
        direct, closed = chain.one_body_norms()
        np.testing.assert_allclose(closed, direct, rtol=1e-9)


class TestOperatorAtOne:
    def test_generic_diagonal_is_refused(self, params, lattice):
        with pytest.raises(BranchError):
            coeff_A(params, lattice.zero)

    def test_additive_spectrum(self, params, chain, lattice):
        numeric = np.sort(diagonalize(build_operator(params, lattice)).eigenvalues)
        additive = np.sort(racah_g1.additive_spectrum(chain, lattice))
        np.testing.assert_allclose(numeric, additive, atol=1e-10)

    def test_factored_hopping(self, params, chain, lattice):
        for lam in lattice:
            for j, eps in lattice.moves(lam):
                assert racah_g1.factored_B(chain, lam, j, eps) == pytest.approx(coeff_B(params, lam, j, eps),
                                                                               rel=1e-10)

    def test_weights(self, params, chain, lattice):
        for lam in lattice:
            assert racah_g1.weight_g1(chain, lam).is_close(weight_delta(params, lam), rtol=1e-10)

    def test_finite_g_limit(self, params, chain, lattice):
        for lam in lattice:
            limit = racah_g1.finite_g_limit_A(params, lam)
            assert limit == pytest.approx(racah_g1.additive_A(chain, lam), abs=1e-5)


class TestSchurEigenfunctions:
    def test_vandermonde_at_zero(self, params):
        assert racah_g1.vandermonde_V(params, (0, 0)).to_float() == pytest.approx(1.0)

    def test_eigenvalue_equation(self, params, chain, lattice):
        op = build_operator(params, lattice)
        for nu in lattice:
            ef = racah_g1.schur_eigenfunction(chain, nu, lattice)
            u = ef.unnormalized
            residual = np.max(np.abs(op.apply(u) - ef.energy * u)) / np.max(np.abs(u))
            assert residual < 1e-8
            assert ef.s_values[0] == pytest.approx(1.0)

    def test_norms(self, chain, lattice):
        for nu in lattice:
            direct, closed = racah_g1.norms_g1(chain, nu, lattice)
            assert direct > 0
            assert closed == pytest.approx(direct, rel=1e-8)

    def test_matches_eigenbasis(self, params, chain, lattice):
        _, result = compute_spectrum(params, lattice)
        for k, nu in enumerate(lattice):
            ef = racah_g1.schur_eigenfunction(chain, nu, lattice)
            assert result.energy(nu) == pytest.approx(ef.energy, abs=1e-9)
            np.testing.assert_allclose(result.eigenfunctions[k], ef.h, rtol=1e-7, atol=1e-12)
