"""
Tests for loop-corrected BP with given cavity covariances.
"""

import json

import numpy as np
import pytest

from conftest import random_dominant
from gaussloop.core import (
    CavityCovariance,
    compute_aux,
    init_messages,
    lcbp_marginal_moments,
    lcbp_step,
    run_gabp,
    run_lcbp,
    update_d_residuals,
)
from gaussloop.errors import ModelError, ShapeMismatch, UnknownNode
from gaussloop.oracle import exact_cavity_covariances, exact_gaussian


class TestCavityCovariance:

    def test_zeros(self, cycle4):
        A = CavityCovariance.zeros(cycle4)
        assert A.is_zero()
        assert A.block(0).shape == (2, 2)

    def test_validation(self, cycle4):
        good = np.array([[0.0, 0.1], [0.1, 0.0]])
        blocks = {i: good for i in cycle4.ids}
        assert not CavityCovariance.from_blocks(cycle4, blocks).is_zero()
        with pytest.raises(ShapeMismatch):
            CavityCovariance.from_blocks(cycle4, {**blocks, 0: np.zeros((3, 3))})
        with pytest.raises(ShapeMismatch):
            CavityCovariance.from_blocks(cycle4, {1: good, 2: good, 3: good})
        with pytest.raises(ModelError):
            CavityCovariance.from_blocks(cycle4, {**blocks, 0: np.eye(2)})
        with pytest.raises(ModelError):
            CavityCovariance.from_blocks(cycle4, {**blocks, 0: np.array([[0.0, 0.1], [0.2, 0.0]])})
        with pytest.raises(UnknownNode):
            CavityCovariance.from_blocks(cycle4, {**blocks, 9: good})

    def test_leaves_get_zero_blocks(self, star):
        A = CavityCovariance.from_blocks(star, {0: np.zeros((3, 3))})
        assert A.block(1).shape == (1, 1)

    def test_file_roundtrip(self, tmp_path, cycle4):
        A = exact_cavity_covariances(cycle4)
        path = tmp_path / "A.json"
        path.write_text(A.dumps())
        loaded = CavityCovariance.load(path, cycle4)
        for i in cycle4.ids:
            np.testing.assert_array_equal(loaded.block(i), A.block(i))
        records = json.loads(path.read_text())
        assert records[0] == {"node": 0, "neighbors": [1, 3], "A": A.block(0).tolist()}

    def test_file_neighbors_must_match(self, tmp_path, cycle4):
        path = tmp_path / "A.json"
        path.write_text(json.dumps([{"node": 0, "neighbors": [1, 2], "A": [[0, 0], [0, 0]]}]))
        with pytest.raises(ShapeMismatch):
            CavityCovariance.load(path, cycle4)

    @pytest.mark.parametrize("matrix", [[0.0, 0.1, 0.1], [[0.0, "x"], [0.1, 0.0]], None])
    def test_file_matrix_of_wrong_size(self, tmp_path, cycle4, matrix):
        path = tmp_path / "A.json"
        path.write_text(json.dumps([{"node": 0, "neighbors": [1, 3], "A": matrix}]))
        with pytest.raises(ShapeMismatch):
            CavityCovariance.load(path, cycle4)

    def test_file_not_a_list(self, tmp_path, cycle4):
        path = tmp_path / "A.json"
        path.write_text("3")
        with pytest.raises(ModelError):
            CavityCovariance.load(path, cycle4)


class TestLCBP:

    def test_zero_A_is_gabp(self, cycle4, tight):
        gabp = run_gabp(cycle4, tight)
        lcbp = run_lcbp(cycle4, CavityCovariance.zeros(cycle4), tight)
        np.testing.assert_array_equal(lcbp.messages.m, gabp.messages.m)
        np.testing.assert_array_equal(lcbp.messages.v, gabp.messages.v)

    def test_cycle4_exact_A(self, cycle4, tight):
        run = run_lcbp(cycle4, exact_cavity_covariances(cycle4), tight)
        assert run.report.converged
        np.testing.assert_allclose(run.marginals.variances, 1.28125, atol=1e-10)
        np.testing.assert_allclose(run.marginals.means, 2.5, atol=1e-10)

    def test_epsilon(self, cycle4, tight):
        A = exact_cavity_covariances(cycle4)
        aux = compute_aux(cycle4, init_messages(cycle4), A)
        # ε_1^0 = [A_1 J_1]_0 = Cov(σ_0, σ_2 | G\\{1}) * J_12
        assert aux.epsilon(1, 0) == pytest.approx(0.09 / 0.82 * 0.3, rel=1e-13)
        # D = 1 at initialization: α_0^1 = J², α_0 = 2J²(1 + a)
        assert aux.alpha_ij(0, 1) == pytest.approx(0.09, rel=1e-13)
        assert aux.alpha_i(0) == pytest.approx(0.18 * (1 + 0.09 / 0.82), rel=1e-13)

    @pytest.mark.parametrize("seed", range(50))
    def test_exact_with_oracle_A(self, seed, tight):
        model = random_dominant(5 + seed % 46, seed)
        run = run_lcbp(model, exact_cavity_covariances(model), tight)
        exact = exact_gaussian(model)
        assert run.report.converged
        np.testing.assert_allclose(run.marginals.variances, exact.variances, atol=1e-8)
        np.testing.assert_allclose(run.marginals.means, exact.means, atol=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_messages_are_cavity_moments(self, seed, tight):
        model = random_dominant(5 + seed, seed)
        run = run_lcbp(model, exact_cavity_covariances(model), tight)
        assert run.report.converged
        for edge in model.edges:
            for i, j in ((edge.i, edge.j), (edge.j, edge.i)):
                cavity = exact_gaussian(model.remove_node(j))
                assert run.messages.mean(i, j) == pytest.approx(cavity.mean(i), abs=1e-8)
                assert run.messages.variance(i, j) == pytest.approx(cavity.variance(i), abs=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_update_d_identity(self, seed, tight):
        model = random_dominant(6 + seed, seed)
        A = exact_cavity_covariances(model)
        run = run_lcbp(model, A, tight)
        assert update_d_residuals(model, run.messages, A).max() <= 1e-9

    def test_local_moments_match_oracle(self, grid3, tight):
        A = exact_cavity_covariances(grid3)
        run = run_lcbp(grid3, A, tight)
        exact = exact_gaussian(grid3)
        local = lcbp_marginal_moments(grid3, run.messages, A, 4)
        np.testing.assert_allclose(local.means, [exact.mean(i) for i in local.ids], atol=1e-9)
        np.testing.assert_allclose(local.covariance, exact.block(local.ids), atol=1e-9)

    def test_step_does_not_mutate(self, triangle, tight):
        A = exact_cavity_covariances(triangle)
        messages = init_messages(triangle)
        _, residual, _ = lcbp_step(triangle, messages, A, tight)
        assert residual > 0
        np.testing.assert_array_equal(messages.v, 1.0)
