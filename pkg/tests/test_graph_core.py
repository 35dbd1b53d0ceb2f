import numpy as np
import pytest
import warnings
from hypothesis import given, strategies as st

from walksearch.errors import (
    DegenerateChainWarning,
    GraphConstructionError,
    NotErgodicError,
    NotReversibleError,
)
from walksearch.graph_core import (
    Distribution,
    ReversibleChain,
    WeightedGraph,
    build_chain,
    chain_power,
    chain_to_graph,
    check_ergodic,
    spectral_gap,
)
from walksearch.instances import path_three, random_connected_graph

from oracles import stationary_by_eigensolve


def path3_graph():
    return path_three().graph


def single_edge():
    return WeightedGraph(np.array([[0.0, 1.0], [1.0, 0.0]]))


class TestBuildChain:
    def test_path_transitions_and_stationary(self):
        c = build_chain(path3_graph())
        assert c.P[0, 1] == 1.0
        assert c.P[1, 0] == 0.5 and c.P[1, 2] == 0.5
        np.testing.assert_allclose(c.pi, [0.25, 0.5, 0.25], atol=1e-15)

    def test_single_edge_is_swap(self):
        c = build_chain(single_edge())
        np.testing.assert_allclose(c.P, [[0, 1], [1, 0]], atol=0)
        np.testing.assert_allclose(c.pi, [0.5, 0.5], atol=0)

    def test_random_graph_detailed_balance(self):
        g = random_connected_graph(8, 11)
        c = build_chain(g)
        flow = c.pi[:, None] * c.P
        assert np.max(np.abs(flow - flow.T)) < 1e-12

    def test_stationary_matches_generic_eigensolver(self):
        g = random_connected_graph(7, 3)
        c = build_chain(g)
        np.testing.assert_allclose(c.pi, stationary_by_eigensolve(c.P), atol=1e-10)

    def test_isolated_vertex_named(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 1.0
        with pytest.raises(GraphConstructionError, match="vertex 2"):
            WeightedGraph(w)

    def test_asymmetric_weights_rejected(self):
        w = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(GraphConstructionError, match="asymmetric"):
            WeightedGraph(w)

    def test_negative_weight_rejected(self):
        w = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(GraphConstructionError, match="negative"):
            WeightedGraph(w)

    def test_vertex_cap(self):
        with pytest.raises(GraphConstructionError, match="cap"):
            WeightedGraph(np.ones((65, 65)))
        WeightedGraph(np.ones((65, 65)), vertex_cap=65)


class TestChainToGraph:
    def test_swap_chain(self):
        g = chain_to_graph(build_chain(single_edge()))
        assert g.weights[0, 1] == pytest.approx(1.0, abs=0)
        assert g.total_weight == pytest.approx(2.0, abs=0)

    def test_total_weight_always_two(self):
        g = chain_to_graph(build_chain(random_connected_graph(9, 5)))
        assert g.total_weight == pytest.approx(2.0, abs=1e-14)

    def test_round_trip_path(self):
        c = build_chain(path3_graph())
        c2 = build_chain(chain_to_graph(c))
        np.testing.assert_allclose(c2.P, c.P, atol=1e-15)
        np.testing.assert_allclose(c2.pi, c.pi, atol=1e-15)

    @given(st.integers(min_value=0, max_value=50))
    def test_round_trip_random(self, seed):
        c = build_chain(random_connected_graph(6, seed))
        c2 = build_chain(chain_to_graph(c))
        assert np.max(np.abs(c2.P - c.P)) < 1e-12
        assert np.max(np.abs(c2.pi - c.pi)) < 1e-12

    def test_non_reversible_rejected_with_residual(self):
        P = np.array([[0.1, 0.6, 0.3], [0.3, 0.4, 0.3], [0.5, 0.25, 0.25]])
        pi = stationary_by_eigensolve(P)
        with pytest.raises(NotReversibleError, match="residual"):
            ReversibleChain(P, pi)


class TestErgodicity:
    def test_path_is_bipartite(self):
        assert check_ergodic(path3_graph()) == "bipartite"

    def test_triangle_is_ergodic(self):
        w = np.ones((3, 3)) - np.eye(3)
        assert check_ergodic(WeightedGraph(w)) == "ergodic"

    def test_two_disjoint_edges_disconnected(self):
        w = np.zeros((4, 4))
        w[0, 1] = w[1, 0] = 1.0
        w[2, 3] = w[3, 2] = 1.0
        assert check_ergodic(WeightedGraph(w)) == "disconnected"

    def test_self_loop_breaks_bipartiteness(self):
        w = np.array([[0.5, 1.0], [1.0, 0.0]])
        assert check_ergodic(WeightedGraph(w)) == "ergodic"


class TestSpectralGap:
    def test_complete_graph_three(self):
        w = np.ones((3, 3)) - np.eye(3)
        c = build_chain(WeightedGraph(w))
        assert spectral_gap(c) == pytest.approx(0.5, abs=1e-12)

    def test_triangle_with_loop_matches_eigensolver(self):
        w = np.ones((3, 3)) - np.eye(3)
        w[0, 0] = 1.0
        c = build_chain(WeightedGraph(w))
        evals = np.sort(np.abs(np.linalg.eigvals(c.P)))
        expected = 1.0 - evals[-2]
        assert spectral_gap(c) == pytest.approx(expected, abs=1e-10)

    def test_bipartite_chain_rejected(self):
        c = build_chain(single_edge())
        with pytest.raises(NotErgodicError, match="bipartite"):
            spectral_gap(c)


class TestChainPower:
    def test_path_two_steps(self):
        c = build_chain(path3_graph())
        c2 = chain_power(c, 2)
        assert c2.P[0, 0] == pytest.approx(0.5, abs=0)
        assert c2.P[0, 2] == pytest.approx(0.5, abs=0)

    def test_power_one_is_same_chain(self):
        c = build_chain(path3_graph())
        assert chain_power(c, 1) is c

    def test_symmetric_form_power(self):
        from walksearch.quantum_core import discriminant

        c = build_chain(random_connected_graph(6, 9))
        d1 = discriminant(c).matrix
        d4 = discriminant(chain_power(c, 4)).matrix
        assert np.max(np.abs(np.linalg.matrix_power(d1, 4) - d4)) < 1e-10

    def test_zero_power_warns(self):
        c = build_chain(path3_graph())
        with pytest.warns(DegenerateChainWarning):
            ident = chain_power(c, 0)
        np.testing.assert_allclose(ident.P, np.eye(3), atol=0)

    @given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4))
    def test_power_composition(self, s, t):
        c = build_chain(random_connected_graph(5, 17))
        lhs = chain_power(c, s + t).P
        rhs = chain_power(c, s).P @ chain_power(c, t).P
        assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestDistribution:
    def test_validation(self):
        with pytest.raises(GraphConstructionError):
            Distribution(np.array([0.5, 0.6]))
        with pytest.raises(GraphConstructionError):
            Distribution(np.array([-0.1, 1.1]))

    def test_support_and_restriction(self):
        pi = build_chain(path3_graph()).pi
        d = Distribution.restriction(pi, [0, 1])
        assert d.support == (0, 1)
        np.testing.assert_allclose(d.probabilities, [1 / 3, 2 / 3, 0.0], atol=1e-15)

    def test_point_mass(self):
        d = Distribution.point_mass(4, 2)
        assert d.support == (2,)
