"""
Tests for cavity covariances from BP runs: response propagation, variance
correction from cavity graphs and full covariance by growing graphs.
"""

import numpy as np
import pytest

from conftest import cycle, random_dominant
from gaussloop.cavity import (
    cavity_bp_pair,
    cavity_covariances_by_response,
    covariance_by_cavity_runs,
    covariance_entries,
    full_covariance_growing,
    kappa_u,
    lc_variance,
    lc_variance_via_cavity_bp,
    nearest_neighbor_moment,
    next_nearest_neighbor_moment,
    node_order,
    resolve_cavity_covariance,
    response_propagation,
    response_state,
)
from gaussloop.core import Schedule, run_gabp
from gaussloop.errors import (
    CavityGraphNotConverged,
    DegenerateMean,
    NonConvergence,
    ShapeMismatch,
    UsageError,
)
from gaussloop.model import build
from gaussloop.oracle import exact_cavity, exact_cavity_covariances, exact_gaussian


def _assert_same_blocks(A, B, model, atol):
    for i in model.ids:
        np.testing.assert_allclose(A.block(i), B.block(i), atol=atol)


class TestResponsePropagation:

    def test_cycle4(self, cycle4, tight):
        block = response_propagation(cycle4, 0, tight)
        np.testing.assert_allclose(block, [[0.0, 0.09 / 0.82], [0.09 / 0.82, 0.0]], atol=1e-12)

    def test_triangle(self, triangle, tight):
        block = response_propagation(triangle, 2, tight)
        assert block[0, 1] == pytest.approx(0.2 / 0.96, abs=1e-12)

    def test_full_cavity_covariance(self, grid3, tight):
        state = response_state(grid3, 4, tight)
        exact = exact_cavity(grid3, 4).block(state.neighbors)
        np.testing.assert_allclose(state.cavity_covariance(), exact, atol=1e-10)
        assert state.asymmetry < 1e-10

    @pytest.mark.parametrize("model_name", ["cycle5", "cycle8", "grid3"])
    def test_structured_graphs(self, model_name, grid3, tight):
        model = {"cycle5": cycle(5, J=0.35), "cycle8": cycle(8, J=0.45), "grid3": grid3}[model_name]
        _assert_same_blocks(cavity_covariances_by_response(model, tight),
                            exact_cavity_covariances(model), model, 1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_dominant(self, seed, tight):
        model = random_dominant(5 + 2 * seed, seed)
        _assert_same_blocks(cavity_covariances_by_response(model, tight),
                            exact_cavity_covariances(model), model, 1e-8)

    def test_parallel_matches_serial(self, tight):
        model = random_dominant(12, seed=4)
        serial = cavity_covariances_by_response(model, tight, jobs=1)
        parallel = cavity_covariances_by_response(model, tight, jobs=2)
        _assert_same_blocks(serial, parallel, model, 0.0)

    def test_cavity_not_converged(self, cycle4):
        with pytest.raises(CavityGraphNotConverged):
            response_propagation(cycle4, 0, Schedule(max_iters=1))

    def test_resolve_sources(self, tmp_path, cycle4, tight):
        exact = resolve_cavity_covariance(cycle4, "exact-oracle")
        path = tmp_path / "A.json"
        path.write_text(exact.dumps())
        from_file = resolve_cavity_covariance(cycle4, f"file:{path}")
        from_response = resolve_cavity_covariance(cycle4, "response", tight)
        _assert_same_blocks(exact, from_file, cycle4, 0.0)
        _assert_same_blocks(exact, from_response, cycle4, 1e-12)
        with pytest.raises(UsageError):
            resolve_cavity_covariance(cycle4, "guess")


class TestVarianceCorrection:

    def test_cycle4(self, cycle4, tight):
        assert lc_variance(cycle4, 0, tight) == pytest.approx(1.28125, abs=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_dominant(self, seed, tight):
        model = random_dominant(5 + seed % 10, seed)
        exact = exact_gaussian(model)
        for i in model.ids:
            assert lc_variance(model, i, tight) == pytest.approx(exact.variance(i), abs=1e-8)

    def test_from_explicit_runs(self, cycle4, tight):
        full = run_gabp(cycle4, tight)
        cavity = run_gabp(cycle4.remove_node(2), tight)
        assert lc_variance_via_cavity_bp(cycle4, 2, full, cavity) == pytest.approx(1.28125, abs=1e-12)

    def test_degenerate_mean_triggers_shift(self, tight):
        model = cycle(5, J=0.3, mu=0.0)
        pair = cavity_bp_pair(model, 0, tight)
        assert pair.shift == 1.0 and pair.bp_runs == 4
        exact = exact_gaussian(model)
        for i in model.ids:
            assert lc_variance(model, i, tight) == pytest.approx(exact.variance(i), abs=1e-8)

    def test_degenerate_without_shift_raises(self, tight):
        model = cycle(4, mu=0.0)
        full = run_gabp(model, tight)
        cavity = run_gabp(model.remove_node(0), tight)
        with pytest.raises(DegenerateMean):
            kappa_u(model, 0, full, cavity)

    def test_unconverged_runs_rejected(self, cycle4):
        full = run_gabp(cycle4, Schedule(max_iters=1))
        cavity = run_gabp(cycle4.remove_node(0), Schedule(max_iters=1))
        with pytest.raises(NonConvergence):
            kappa_u(cycle4, 0, full, cavity)

    @pytest.mark.parametrize("delta", [0.3, 1.0, -2.0])
    @pytest.mark.parametrize("seed", range(20))
    def test_kappa_is_field_free(self, seed, delta, tight):
        model = random_dominant(6 + seed % 5, seed)
        shifted = model.shift_fields(delta)
        for i in model.ids:
            a = cavity_bp_pair(model, i, tight)
            b = cavity_bp_pair(shifted, i, tight)
            ka = kappa_u(a.model, i, a.full, a.cavity).kappa
            kb = kappa_u(b.model, i, b.full, b.cavity).kappa
            np.testing.assert_allclose(ka, kb, atol=1e-8)

    def test_covariance_entries(self, grid3, tight):
        exact = exact_gaussian(grid3)
        i = 4
        pair = cavity_bp_pair(grid3, i, tight)
        c = kappa_u(pair.model, i, pair.full, pair.cavity)
        inherited = exact_cavity(grid3, i).block(c.neighbors)
        moments = covariance_entries(grid3, i, c.kappa, c.u, c.variance, c.mean, inherited)
        ids = (i,) + c.neighbors
        np.testing.assert_allclose(moments, exact.second_moments()[np.ix_(
            [exact.index[k] for k in ids], [exact.index[k] for k in ids])], atol=1e-9)

        for a, j in enumerate(c.neighbors):
            assert nearest_neighbor_moment(c, j) == pytest.approx(moments[0, a + 1], abs=1e-10)
            for b, k in enumerate(c.neighbors):
                value = next_nearest_neighbor_moment(c, j, k, inherited[a, b])
                assert value == pytest.approx(moments[a + 1, b + 1], abs=1e-10)

    def test_covariance_entries_shape(self, cycle4):
        with pytest.raises(ShapeMismatch):
            covariance_entries(cycle4, 0, np.zeros(2), np.zeros(2), 1.0, 1.0, np.zeros((3, 3)))


class TestGrowingGraphs:

    @pytest.mark.parametrize("n", [10, 20, 50])
    def test_random_dominant(self, n, tight):
        model = random_dominant(n, seed=n)
        grown = full_covariance_growing(model, "id", tight)
        exact = exact_gaussian(model)
        assert np.abs(grown.covariance - exact.covariance).max() <= 1e-7
        np.testing.assert_allclose(grown.means, exact.means, atol=1e-8)
        if grown.shift == 0.0:
            assert grown.bp_runs == n - 1

    def test_degree_order(self, grid3, tight):
        grown = full_covariance_growing(grid3, "degree", tight)
        assert grown.order[0] in (0, 2, 6, 8)
        np.testing.assert_allclose(grown.covariance, exact_gaussian(grid3).covariance, atol=1e-9)

    def test_zero_fields(self, tight):
        model = cycle(6, J=0.3, mu=0.0)
        grown = full_covariance_growing(model, "id", tight)
        exact = exact_gaussian(model)
        assert grown.shift > 0.0
        np.testing.assert_allclose(grown.covariance, exact.covariance, atol=1e-9)
        np.testing.assert_allclose(grown.means, 0.0, atol=1e-9)

    def test_explicit_order(self, cycle4, tight):
        grown = full_covariance_growing(cycle4, [2, 0, 3, 1], tight)
        assert grown.ids == (0, 1, 2, 3)
        np.testing.assert_allclose(grown.covariance, exact_gaussian(cycle4).covariance, atol=1e-10)

    def test_node_order_validation(self, cycle4):
        with pytest.raises(UsageError):
            node_order(cycle4, "random")
        with pytest.raises(UsageError):
            node_order(cycle4, [0, 1, 2])

    def test_disconnected(self, tight):
        model = build([(0, 1.0, 1.0), (1, 0.5, 2.0), (2, -1.0, 1.0)], [(0, 2, 0.4)])
        grown = full_covariance_growing(model, "id", tight)
        np.testing.assert_allclose(grown.covariance, exact_gaussian(model).covariance, atol=1e-12)

    def test_isolated_zero_mean_node_needs_no_shift(self, tight):
        model = build([(0, 1.0, 1.0), (1, 1.0, 1.0), (2, 0.0, 1.5)], [(0, 1, 0.3)])
        grown = full_covariance_growing(model, "id", tight)
        assert grown.shift == 0.0
        assert grown.bp_runs == model.n - 1
        exact = exact_gaussian(model)
        np.testing.assert_allclose(grown.covariance, exact.covariance, atol=1e-12)
        np.testing.assert_allclose(grown.means, exact.means, atol=1e-12)

    def test_non_convergence_raises(self, cycle4):
        with pytest.raises(NonConvergence):
            full_covariance_growing(cycle4, "id", Schedule(max_iters=1))


class TestCavityRuns:

    def test_matches_oracle(self, tight):
        model = random_dominant(15, seed=9)
        result = covariance_by_cavity_runs(model, tight)
        exact = exact_gaussian(model)
        np.testing.assert_allclose(result.variances, exact.variances, atol=1e-8)
        np.testing.assert_allclose(result.means, exact.means, atol=1e-8)
        for (i, j), value in result.edge_covariances.items():
            assert value == pytest.approx(exact.covariance[exact.index[i], exact.index[j]], abs=1e-8)
        matrix = result.as_matrix()
        assert np.isnan(matrix).sum() == model.n * model.n - model.n - 2 * len(model.edges)
        assert result.bp_runs >= 2 * model.n + 1
