"""
Tests for the model: structure, graph surgery, precision matrix, file format.
"""

import json

import numpy as np
import pytest

from conftest import cycle
from gaussloop.errors import DanglingNeighbor, DuplicateNode, ModelError, UnknownNode
from gaussloop.model import (
    Edge,
    GaussianModel,
    NonlinearPotential,
    Node,
    PerturbedModel,
    PotentialKind,
    build,
    dumps_model,
    load_model,
    loads_model,
    save_model,
)


class TestGaussianModel:

    def test_edges_are_normalized_and_sorted(self):
        model = build([(2, 0.0, 1.0), (0, 0.0, 1.0), (1, 0.0, 1.0)], [(2, 0, 0.1), (1, 0, 0.2)])
        assert model.ids == (0, 1, 2)
        assert [(e.i, e.j) for e in model.edges] == [(0, 1), (0, 2)]
        assert model.neighbors(0) == (1, 2)
        assert model.coupling(2, 0) == 0.1
        assert model.coupling(1, 2) == 0.0

    def test_invalid_nodes_and_edges(self):
        with pytest.raises(ModelError):
            build([(0, 0.0, 0.0)])
        with pytest.raises(ModelError):
            build([(0, float("nan"), 1.0)])
        with pytest.raises(DuplicateNode):
            build([(0, 0.0, 1.0), (0, 1.0, 1.0)])
        with pytest.raises(DanglingNeighbor):
            build([(0, 0.0, 1.0)], [(0, 5, 0.1)])
        with pytest.raises(ModelError):
            build([(0, 0.0, 1.0), (1, 0.0, 1.0)], [(0, 1, 0.0)])
        with pytest.raises(ModelError):
            build([(0, 0.0, 1.0)], [(0, 0, 0.1)])

    def test_unknown_node(self, cycle4):
        with pytest.raises(UnknownNode):
            cycle4.neighbors(9)
        with pytest.raises(UnknownNode):
            cycle4.remove_node(9)

    def test_remove_node(self, cycle4):
        cavity = cycle4.remove_node(0)
        assert cavity.ids == (1, 2, 3)
        assert len(cavity.edges) == 2
        assert cavity.neighbors(1) == (2,)
        # the original model is unchanged
        assert len(cycle4.edges) == 4

    def test_attach_node(self, triangle):
        grown = triangle.attach_node((7, 0.5, 2.0), [(0, 0.1), (2, -0.1)])
        assert grown.neighbors(7) == (0, 2)
        assert grown.node(7).s == 2.0
        with pytest.raises(DuplicateNode):
            triangle.attach_node((1, 0.0, 1.0))
        with pytest.raises(DanglingNeighbor):
            triangle.attach_node((8, 0.0, 1.0), [(42, 0.1)])

    @pytest.mark.parametrize("name", ["pair", "triangle", "cycle4", "star", "grid3"])
    def test_remove_then_attach_restores_model(self, name, request):
        model = request.getfixturevalue(name)
        for i in model.ids:
            node = model.node(i)
            edges = [(k, model.coupling(i, k)) for k in model.neighbors(i)]
            restored = model.remove_node(i).attach_node((node.id, node.mu, node.s), edges)
            assert restored == model
            assert restored.remove_node(i) == model.remove_node(i)

    @pytest.mark.parametrize("name", ["pair", "triangle", "cycle4", "star", "grid3"])
    def test_precision_of_cavity_graph(self, name, request):
        model = request.getfixturevalue(name)
        lam, h = model.precision_matrix()
        for p, i in enumerate(model.ids):
            cavity_lam, cavity_h = model.remove_node(i).precision_matrix()
            np.testing.assert_array_equal(cavity_lam, np.delete(np.delete(lam, p, axis=0), p, axis=1))
            np.testing.assert_array_equal(cavity_h, np.delete(h, p))

    def test_precision_matrix(self, pair):
        lam, h = pair.precision_matrix()
        np.testing.assert_array_equal(lam, [[1.0, -0.5], [-0.5, 1.0]])
        np.testing.assert_array_equal(h, [1.0, 0.0])

    def test_shift_fields(self, pair):
        shifted = pair.shift_fields(1.0)
        assert [n.mu for n in shifted.nodes] == [2.0, 1.0]
        partial = pair.shift_fields({1: 0.5})
        assert [n.mu for n in partial.nodes] == [1.0, 0.5]

    def test_is_tree(self, cycle4, star):
        assert star.is_tree()
        assert not cycle4.is_tree()

    def test_validate(self, cycle4):
        report = cycle4.validate()
        assert report.spd and report.symmetric and report.positive_variances
        assert report.diagonally_dominant
        assert report.n_edges == 4

    def test_validate_not_spd(self):
        report = cycle(4, J=0.6).validate()
        assert not report.spd
        assert not report.diagonally_dominant

    def test_hashable_and_equal(self, cycle4):
        assert cycle4 == cycle(4)
        assert hash(cycle4) == hash(cycle(4))


class TestPotentials:

    def test_constructors(self):
        assert NonlinearPotential.none().is_none
        assert NonlinearPotential.quartic(0.0).is_none
        quartic = NonlinearPotential.quartic(0.5)
        assert quartic.kind is PotentialKind.QUARTIC
        assert float(quartic(2.0)) == 8.0
        well = NonlinearPotential.double_well(1.0, 1.0)
        assert float(well(1.0)) == 0.0

    def test_invalid_parameters(self):
        with pytest.raises(ModelError):
            NonlinearPotential.quartic(-1.0)
        with pytest.raises(ModelError):
            NonlinearPotential.double_well(-1.0, 0.0)

    def test_perturbed_model(self, pair):
        model = PerturbedModel(pair, {1: NonlinearPotential.quartic(0.1)})
        assert not model.is_gaussian
        assert model.potential(0).is_none
        assert model.potential_list()[1].lam == 0.1
        with pytest.raises(UnknownNode):
            PerturbedModel(pair, {3: NonlinearPotential.quartic(0.1)})


class TestModelFile:

    def test_roundtrip(self, tmp_path, star):
        model = PerturbedModel(star, {2: NonlinearPotential.double_well(0.1, 0.5)})
        path = save_model(model, tmp_path / "model.json")
        loaded = load_model(path)
        assert loaded.base == star
        assert loaded.potential(2) == model.potential(2)
        assert dumps_model(loaded) == path.read_text()

    def test_format(self, pair):
        data = json.loads(dumps_model(pair))
        assert data == {
            "nodes": [{"id": 0, "mu": 1.0, "s": 1.0}, {"id": 1, "mu": 0.0, "s": 1.0}],
            "edges": [{"i": 0, "j": 1, "J": 0.5}],
        }

    def test_malformed(self, tmp_path):
        with pytest.raises(ModelError):
            loads_model("{not json")
        with pytest.raises(ModelError):
            loads_model('{"edges": []}')
        with pytest.raises(ModelError):
            loads_model('{"nodes": [{"id": 0}]}')
        with pytest.raises(ModelError):
            load_model(tmp_path / "missing.json")

    @pytest.mark.parametrize("text", [
        '{"nodes": [{"id": 0, "mu": "abc", "s": 1.0}]}',
        '{"nodes": [{"id": 0, "mu": 0.0, "s": [1]}]}',
        '{"nodes": [{"id": "a", "mu": 0.0, "s": 1.0}]}',
        '{"nodes": [{"id": 0, "mu": 0.0, "s": 1.0}, {"id": 1, "mu": 0.0, "s": 1.0}],'
        ' "edges": [{"i": 0, "j": 1, "J": "x"}]}',
        '{"nodes": [{"id": 0, "mu": 0.0, "s": 1.0}], "potentials": [{"id": 0, "kind": "quartic", "lambda": "big"}]}',
        '{"nodes": [{"id": 0, "mu": 0.0, "s": 1.0}], "potentials": [7]}',
        '{"nodes": [{"id": 0, "mu": 0.0, "s": 1.0}], "potentials": [{"id": [0], "kind": "none"}]}',
    ])
    def test_malformed_values(self, text):
        with pytest.raises(ModelError):
            loads_model(text)

    def test_direct_construction(self):
        model = GaussianModel((Node(1, 0.0, 1.0), Node(0, 0.0, 1.0)), (Edge(1, 0, 0.3),))
        assert model.edges == (Edge(0, 1, 0.3),)
