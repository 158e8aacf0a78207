"""
Tests for the schedule, the message structures and GaBP.
"""

import numpy as np
import pytest

from conftest import cycle, random_dominant, random_tree
from gaussloop.core import (
    Order,
    Schedule,
    edge_index,
    gabp_marginals,
    gabp_step,
    init_messages,
    iterate,
    run_gabp,
)
from gaussloop.errors import NegativeCavityPrecision, NonConvergence, UnknownNode, UsageError
from gaussloop.model import build
from gaussloop.oracle import exact_gaussian


class TestSchedule:

    def test_invalid_values(self):
        with pytest.raises(UsageError):
            Schedule(damping=1.0)
        with pytest.raises(UsageError):
            Schedule(tol=0.0)
        with pytest.raises(UsageError):
            Schedule(max_iters=-1)
        with pytest.raises(ValueError):
            Schedule(order="shuffled")

    def test_mix(self):
        assert Schedule().mix(2.0, 1.0) == 2.0
        assert Schedule(damping=0.25).mix(2.0, 1.0) == pytest.approx(1.75)

    def test_random_order_is_seeded(self):
        schedule = Schedule(order=Order.RANDOM_PERMUTATION, seed=5)
        a = schedule.sweep_order(10, schedule.rng())
        b = schedule.sweep_order(10, schedule.rng())
        np.testing.assert_array_equal(a, b)
        assert sorted(a) == list(range(10))

    def test_iterate_reports_non_convergence(self):
        def step(state, rng):
            return state + 1, 1.0, 0

        state, report = iterate(step, 0, Schedule(max_iters=5), "counter")
        assert state == 5
        assert report.iterations == 5 and not report.converged
        with pytest.raises(NonConvergence):
            report.raise_for_convergence()

    def test_report_as_dict(self):
        _, report = iterate(lambda s, rng: (s, 0.0, 0), None, Schedule(), "noop")
        data = report.as_dict()
        assert data["converged"] and data["iterations"] == 1 and data["algorithm"] == "noop"

    def test_iterate_requires_a_clean_sweep(self):
        skips = iter([2, 1, 0])
        _, report = iterate(lambda s, rng: (s, 0.0, next(skips)), None, Schedule(), "skips")
        assert report.converged
        assert report.iterations == 3 and report.skipped == 3


class TestMessages:

    def test_edge_index(self, cycle4):
        index = edge_index(cycle4)
        assert len(index) == 8
        assert index.pairs[0] == (0, 1)
        e = index.edge(0, 3)
        assert index.pairs[index.reverse[e]] == (3, 0)
        with pytest.raises(UnknownNode):
            index.edge(0, 2)

    def test_init_messages(self, pair):
        messages = init_messages(pair)
        assert messages.get(0, 1) == (1.0, 1.0)
        assert messages.get(1, 0) == (0.0, 1.0)


class TestGaBP:

    def test_cycle4_fixed_point(self, cycle4, tight):
        run = run_gabp(cycle4, tight)
        assert run.report.converged
        assert run.messages.variance(0, 1) == pytest.approx(10 / 9, rel=1e-12)
        assert run.messages.mean(0, 1) == pytest.approx(5 / 3, rel=1e-12)
        np.testing.assert_allclose(run.marginals.means, 2.5, rtol=1e-12)
        np.testing.assert_allclose(run.marginals.variances, 1.25, rtol=1e-12)

    def test_cycle4_variance_error(self, cycle4, tight):
        run = run_gabp(cycle4, tight)
        exact = exact_gaussian(cycle4)
        assert np.abs(run.marginals.variances - exact.variances).max() > 1e-4

    def test_pair_is_exact(self, pair, tight):
        run = run_gabp(pair, tight)
        np.testing.assert_allclose(run.marginals.means, [4 / 3, 2 / 3], rtol=1e-12)
        np.testing.assert_allclose(run.marginals.variances, [4 / 3, 4 / 3], rtol=1e-12)

    @pytest.mark.parametrize("seed", range(50))
    def test_tree_exactness(self, seed, tight):
        n = 2 + seed % 29
        model = random_tree(n, seed)
        run = run_gabp(model, tight)
        exact = exact_gaussian(model)
        assert run.report.converged
        np.testing.assert_allclose(run.marginals.means, exact.means, atol=1e-9)
        np.testing.assert_allclose(run.marginals.variances, exact.variances, atol=1e-9)

    @pytest.mark.parametrize("seed", range(50))
    def test_means_exact_on_loops(self, seed, tight):
        model = random_dominant(5 + seed % 46, seed)
        run = run_gabp(model, tight)
        assert run.report.converged
        np.testing.assert_allclose(run.marginals.means, exact_gaussian(model).means, atol=1e-8)

    def test_step_does_not_mutate(self, cycle4):
        messages = init_messages(cycle4)
        new, residual, skipped = gabp_step(cycle4, messages, Schedule())
        assert residual > 0 and skipped == 0
        np.testing.assert_array_equal(messages.v, 1.0)
        assert not np.array_equal(new.v, messages.v)

    def test_marginals_at_initialization(self, pair):
        marginals = gabp_marginals(pair, init_messages(pair))
        # v_0 = 1/(1 - 0.25 * 1)
        assert marginals.variance(0) == pytest.approx(4 / 3)

    def test_damping_reaches_same_fixed_point(self, cycle4, tight):
        damped = run_gabp(cycle4, tight.with_(damping=0.5))
        assert damped.report.converged
        np.testing.assert_allclose(damped.marginals.variances, 1.25, rtol=1e-11)

    def test_random_order(self, tight):
        model = random_dominant(15, seed=2)
        a = run_gabp(model, tight)
        b = run_gabp(model, tight.with_(order=Order.RANDOM_PERMUTATION, seed=3))
        np.testing.assert_allclose(a.marginals.means, b.marginals.means, atol=1e-10)

    def test_max_iters_reported(self, cycle4):
        run = run_gabp(cycle4, Schedule(max_iters=2))
        assert not run.report.converged
        assert run.report.iterations == 2

    def test_negative_precision_skipped_or_raised(self):
        model = cycle(4, J=0.9)
        run = run_gabp(model, Schedule(max_iters=50))
        assert run.report.skipped > 0
        with pytest.raises(NegativeCavityPrecision):
            run_gabp(model, Schedule(max_iters=50, strict=True))

    def test_isolated_node(self):
        run = run_gabp(build([(0, 2.0, 3.0)]))
        assert run.report.converged
        assert run.marginals.mean(0) == pytest.approx(2.0)
        assert run.marginals.variance(0) == pytest.approx(3.0)

    def test_skipped_updates_never_converge(self):
        # Λ is not positive definite: every update leaving node 1 is rejected
        model = build([(0, 0.0, 1.0), (1, 1.0, 1.0), (2, 0.0, 1.0)], [(0, 1, 2.0), (1, 2, 2.0)])
        run = run_gabp(model, Schedule(max_iters=20))
        assert run.report.skipped > 0
        assert not run.report.converged
        with pytest.raises(NonConvergence):
            run.report.raise_for_convergence()

    def test_three_chain_messages(self):
        model = build([(1, 1.0, 1.0), (2, 0.0, 1.0), (3, 0.0, 1.0)], [(1, 2, 0.25), (2, 3, 0.25)])
        run = run_gabp(model, Schedule(tol=1e-14))
        assert run.report.converged and run.report.iterations == 2
        assert run.messages.mean(2, 3) == pytest.approx(4 / 15, rel=1e-14)
        assert run.messages.variance(2, 3) == pytest.approx(16 / 15, rel=1e-14)
        # leaves always send their own parameters
        assert run.messages.get(1, 2) == (1.0, 1.0)
        assert run.messages.get(3, 2) == (0.0, 1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_messages_are_cavity_moments_on_trees(self, seed, tight):
        model = random_tree(3 + seed, seed)
        run = run_gabp(model, tight)
        for edge in model.edges:
            for i, j in ((edge.i, edge.j), (edge.j, edge.i)):
                cavity = exact_gaussian(model.remove_node(j))
                assert run.messages.mean(i, j) == pytest.approx(cavity.mean(i), abs=1e-9)
                assert run.messages.variance(i, j) == pytest.approx(cavity.variance(i), abs=1e-9)
