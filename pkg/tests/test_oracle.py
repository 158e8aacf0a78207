"""
Tests for the dense Gaussian oracle and the grid quadrature oracle.
"""

import numpy as np
import pytest

from conftest import cycle, random_dominant
from gaussloop.ep import moment_match_1d
from gaussloop.errors import DimensionTooLarge, NonIntegrable, NotPositiveDefinite, OracleInapplicable
from gaussloop.model import NonlinearPotential, PerturbedModel, build
from gaussloop.oracle import (
    exact_cavity,
    exact_cavity_covariances,
    exact_gaussian,
    exact_perturbed,
    is_positive_definite,
)


class TestExactGaussian:

    def test_pair(self, pair):
        exact = exact_gaussian(pair)
        np.testing.assert_allclose(exact.means, [4 / 3, 2 / 3], rtol=1e-14)
        np.testing.assert_allclose(exact.variances, [4 / 3, 4 / 3], rtol=1e-14)
        assert exact.covariance[0, 1] == pytest.approx(2 / 3, rel=1e-14)

    def test_cycle4(self, cycle4):
        exact = exact_gaussian(cycle4)
        np.testing.assert_allclose(exact.means, 2.5, rtol=1e-13)
        np.testing.assert_allclose(exact.variances, 1.28125, rtol=1e-13)

    @pytest.mark.parametrize("seed", range(10))
    def test_covariance_inverts_precision(self, seed):
        model = random_dominant(5 + 3 * seed, seed)
        lam, _ = model.precision_matrix()
        product = exact_gaussian(model).covariance @ lam
        np.testing.assert_allclose(product, np.eye(model.n), atol=1e-10)

    def test_symmetric_covariance(self):
        exact = exact_gaussian(random_dominant(20, seed=3))
        np.testing.assert_array_equal(exact.covariance, exact.covariance.T)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            exact_gaussian(cycle(4, J=0.6))
        assert not is_positive_definite(cycle(4, J=0.6).precision_matrix()[0])

    def test_empty(self):
        exact = exact_gaussian(build([]))
        assert exact.means.shape == (0,)

    def test_second_moments(self, pair):
        exact = exact_gaussian(pair)
        np.testing.assert_allclose(np.diag(exact.second_moments()), [4 / 3 + 16 / 9, 4 / 3 + 4 / 9])


class TestExactCavity:

    def test_cycle4_cavity(self, cycle4):
        cavity = exact_cavity(cycle4, 0)
        assert cavity.ids == (1, 2, 3)
        assert cavity.covariance[0, 2] == pytest.approx(0.09 / 0.82, rel=1e-13)

    def test_cavity_covariances(self, cycle4, triangle):
        A = exact_cavity_covariances(cycle4)
        np.testing.assert_allclose(A.block(0), [[0.0, 0.09 / 0.82], [0.09 / 0.82, 0.0]], rtol=1e-13)
        A = exact_cavity_covariances(triangle)
        assert A.block(1)[0, 1] == pytest.approx(0.2 / 0.96, rel=1e-13)

    def test_tree_cavity_is_zero(self, star):
        assert exact_cavity_covariances(star).is_zero()


class TestGridOracle:

    def test_gaussian_limit(self, pair):
        solution = exact_perturbed(PerturbedModel(pair))
        exact = exact_gaussian(pair)
        np.testing.assert_allclose(solution.means, exact.means, atol=1e-7)
        np.testing.assert_allclose(solution.covariance, exact.covariance, atol=1e-7)

    def test_single_node_matches_hermite(self):
        model = PerturbedModel(build([(0, 0.4, 0.8)]), {0: NonlinearPotential.quartic(0.3)})
        solution = exact_perturbed(model)
        tilted = moment_match_1d(0.4, 0.8, NonlinearPotential.quartic(0.3))
        assert solution.mean(0) == pytest.approx(tilted.mean, abs=1e-7)
        assert solution.variance(0) == pytest.approx(tilted.variance, abs=1e-7)

    def test_symmetric_double_well(self):
        base = build([(0, 0.0, 1.0), (1, 0.0, 1.0)], [(0, 1, 0.2)])
        model = PerturbedModel(base, {0: NonlinearPotential.double_well(0.5, 1.0),
                                      1: NonlinearPotential.double_well(0.5, 1.0)})
        solution = exact_perturbed(model)
        np.testing.assert_allclose(solution.means, 0.0, atol=1e-9)
        assert solution.variance(0) == pytest.approx(solution.variance(1), rel=1e-8)

    def test_dimension_too_large(self):
        with pytest.raises(DimensionTooLarge):
            exact_perturbed(PerturbedModel(cycle(5)))

    def test_non_integrable(self):
        base = cycle(3, J=0.7)
        with pytest.raises(NonIntegrable):
            exact_perturbed(PerturbedModel(base, {0: NonlinearPotential.quartic(0.1)}))

    def test_inapplicable_when_all_confined(self):
        base = cycle(3, J=0.7)
        potentials = {i: NonlinearPotential.quartic(0.1) for i in base.ids}
        with pytest.raises(OracleInapplicable):
            exact_perturbed(PerturbedModel(base, potentials))
