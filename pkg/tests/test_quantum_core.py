import numpy as np
import pytest

from walksearch.classical_walk import InterpolationParams, interpolate_absorbing, interpolate_two
from walksearch.electric import build_modified_graph
from walksearch.errors import PreconditionError, SizeLimitError, StateIntegrityError
from walksearch.graph_core import Distribution, build_chain
from walksearch.instances import path_three, random_connected_graph, random_instance
from walksearch.quantum_core import (
    BlockUnitary,
    QuantumState,
    apply_unitary,
    discriminant,
    embed_modified_discriminant,
    interpolated_walk_unitary,
    lambda_unitary,
    lift,
    measure_vertex,
    modified_walk_unitary,
    sqrt_state,
    szegedy_walk,
    verify_block_encoding,
)

from oracles import stationary_by_eigensolve


@pytest.fixture(scope="module")
def p3():
    return path_three()


@pytest.fixture(scope="module")
def p3_chain(p3):
    return p3.chain


class TestDiscriminant:
    def test_symmetric_chain_fixed_point(self):
        # uniform stationary distribution: the symmetric form is P itself
        w = np.ones((4, 4)) - np.eye(4)
        c = build_chain(__import__("walksearch.graph_core", fromlist=["x"]).WeightedGraph(w))
        d = discriminant(c)
        np.testing.assert_allclose(d.matrix, c.P, atol=1e-14)

    def test_path_entry(self, p3_chain):
        d = discriminant(p3_chain)
        assert d.matrix[0, 1] == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-15)

    def test_spectrum_matches_transition_matrix(self):
        c = build_chain(random_connected_graph(7, 5))
        d = discriminant(c)
        evals_P = np.sort(np.linalg.eigvals(c.P).real)
        np.testing.assert_allclose(np.sort(d.eigenvalues), evals_P, atol=1e-10)

    def test_square_root_stationary_fixed(self):
        c = build_chain(random_connected_graph(6, 8))
        d = discriminant(c)
        root = np.sqrt(c.pi)
        for t in (1, 3, 7):
            np.testing.assert_allclose(d.power_apply(t, root), root, atol=1e-10)


class TestSzegedyWalk:
    def test_single_edge_block(self):
        import walksearch.graph_core as gc

        c = build_chain(gc.WeightedGraph(np.array([[0.0, 1.0], [1.0, 0.0]])))
        w = szegedy_walk(c)
        np.testing.assert_allclose(w.block(), [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)

    def test_path_block_is_symmetric_form(self, p3_chain):
        w = szegedy_walk(p3_chain)
        d = discriminant(p3_chain)
        assert verify_block_encoding(w, d.matrix, 1e-10) < 1e-10

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_block_norm_at_most_one(self, seed):
        c = build_chain(random_connected_graph(6, seed))
        w = szegedy_walk(c)
        assert np.linalg.norm(w.block(), 2) <= 1.0 + 1e-12

    def test_dimension_cap(self, p3_chain):
        with pytest.raises(SizeLimitError):
            szegedy_walk(p3_chain, pair_dim_cap=4)

    def test_deterministic_construction(self, p3_chain):
        a = szegedy_walk(p3_chain).matrix
        b = szegedy_walk(p3_chain).matrix
        np.testing.assert_array_equal(a, b)


class TestVerifyBlockEncoding:
    def test_exact_encoding(self, p3_chain):
        w = szegedy_walk(p3_chain)
        assert verify_block_encoding(w, discriminant(p3_chain).matrix, 1e-10) < 1e-10

    def test_identity(self):
        u = BlockUnitary(np.eye(6), 2, 3, flag=0)
        assert verify_block_encoding(u, np.eye(3), 1e-12) == 0.0

    def test_wrong_target_floor(self, p3_chain):
        w = szegedy_walk(p3_chain)
        d = discriminant(p3_chain).matrix
        wrong = d + 0.05 * np.eye(3)
        dev = verify_block_encoding(w, wrong, 1e-10)
        assert dev >= np.linalg.norm(d - wrong, 2) - 1e-10


class TestInterpolatedWalk:
    def test_zero_parameter_reproduces_base_block(self, p3_chain, p3):
        w = szegedy_walk(p3_chain)
        wi = interpolated_walk_unitary(w, p3.marked, 0.0)
        assert verify_block_encoding(wi, discriminant(p3_chain).matrix, 1e-10) < 1e-10

    @pytest.mark.parametrize("s", [0.25, 0.5, 0.9])
    def test_block_matches_interpolated_chain(self, p3_chain, p3, s):
        w = szegedy_walk(p3_chain)
        wi = interpolated_walk_unitary(w, p3.marked, s)
        target = discriminant(interpolate_absorbing(p3_chain, p3.marked, s)).matrix
        assert verify_block_encoding(wi, target, 1e-10) < 1e-10

    def test_call_counters(self, p3_chain, p3):
        w = szegedy_walk(p3_chain)
        wi = interpolated_walk_unitary(w, p3.marked, 0.5)
        assert wi.counters == {"walk": 1, "check": 2}

    @pytest.mark.parametrize("seed", [3, 4])
    def test_random_instances(self, seed):
        prob = random_instance(5, seed)
        c = prob.chain
        w = szegedy_walk(c)
        for s in (0.25, 0.9):
            wi = interpolated_walk_unitary(w, prob.marked, s)
            target = discriminant(interpolate_absorbing(c, prob.marked, s)).matrix
            assert verify_block_encoding(wi, target, 1e-10) < 1e-10

    def test_double_interpolation_composes(self):
        prob = random_instance(5, 11)
        c = prob.chain
        S, M = list(prob.start_set), sorted(prob.marked)
        params = InterpolationParams(0.3, 0.6)
        w = szegedy_walk(c)
        w_s = interpolated_walk_unitary(w, S, params.q_S)
        w_sm = interpolated_walk_unitary(w_s, M, params.q_M)
        target = discriminant(interpolate_two(c, S, M, params)).matrix
        assert verify_block_encoding(w_sm, target, 1e-10) < 1e-10


class TestLambdaUnitary:
    def test_balanced_split(self):
        # sigma_u = C pi_u everywhere forces an equal superposition per vertex
        n = 3
        pi = np.array([0.25, 0.5, 0.25])
        C = 1.0
        sigma = Distribution(pi * C)
        lam = lambda_unitary(sigma, pi, C)
        for u in range(n):
            col = lam.matrix[u::n, u]
            np.testing.assert_allclose(col, [1 / np.sqrt(2)] * 2, atol=1e-12)

    def test_zero_mass_keeps_flag(self):
        pi = np.array([0.25, 0.5, 0.25])
        sigma = Distribution(np.array([1.0, 0.0, 0.0]))
        lam = lambda_unitary(sigma, pi, 2.0)
        col = lam.matrix[1::3, 1]
        np.testing.assert_allclose(col, [1.0, 0.0], atol=0)

    def test_unitarity_random(self, rng):
        pi = rng.uniform(0.1, 1.0, size=5)
        pi /= pi.sum()
        raw = rng.uniform(0.0, 1.0, size=5)
        sigma = Distribution(raw / raw.sum())
        lam = lambda_unitary(sigma, pi, 3.0)
        res = np.max(np.abs(lam.matrix.T @ lam.matrix - np.eye(10)))
        assert res < 1e-12

    def test_dangling_vertex_rejected(self):
        # a vertex with neither stationary nor start mass cannot be split
        pi = np.array([0.5, 0.5, 0.0])
        sigma = Distribution(np.array([1.0, 0.0, 0.0]))
        with pytest.raises(PreconditionError, match="dangles"):
            lambda_unitary(sigma, pi, 2.0)


class TestModifiedWalk:
    def test_worked_path_gadget(self, p3, p3_chain):
        C = 40.0 / 9.0
        w = szegedy_walk(p3_chain)
        lam = lambda_unitary(p3.sigma, p3_chain.pi, C)
        wm = modified_walk_unitary(w, lam)
        mod = build_modified_graph(p3.graph, p3.sigma, sorted(p3.marked), C)
        dm = discriminant(build_chain(mod.graph))
        target = embed_modified_discriminant(dm, mod.base_size, mod.support)
        assert verify_block_encoding(wm, target, 1e-10) < 1e-10

    def test_unitarity(self, p3, p3_chain):
        w = szegedy_walk(p3_chain)
        lam = lambda_unitary(p3.sigma, p3_chain.pi, 2.0)
        wm = modified_walk_unitary(w, lam)
        res = np.max(np.abs(wm.matrix.T @ wm.matrix - np.eye(wm.dim)))
        assert res < 1e-10

    @pytest.mark.parametrize("seed", [0, 1])
    def test_random_instances(self, seed):
        prob = random_instance(5, 50 + seed, start_size=2)
        c = prob.chain
        C = 3.0
        w = szegedy_walk(c)
        lam = lambda_unitary(prob.sigma, c.pi, C)
        wm = modified_walk_unitary(w, lam)
        mod = build_modified_graph(prob.graph, prob.sigma, sorted(prob.marked), C)
        dm = discriminant(build_chain(mod.graph))
        target = embed_modified_discriminant(dm, mod.base_size, mod.support)
        assert verify_block_encoding(wm, target, 1e-10) < 1e-10


class TestStateEngine:
    def test_identity_application(self, p3):
        state = sqrt_state(p3.sigma)
        out = apply_unitary(BlockUnitary(np.eye(3), 1, 3), state)
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=0)

    def test_measure_full_space(self, p3):
        state = sqrt_state(p3.sigma)
        assert measure_vertex(state, range(3)) == pytest.approx(1.0, abs=1e-12)

    def test_parseval_partition(self, p3_chain, p3):
        w = szegedy_walk(p3_chain)
        state = apply_unitary(w, sqrt_state(p3.sigma, ancilla_dim=3, flag=0))
        total = sum(measure_vertex(state, [v]) for v in range(3))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_flag_projection_mode(self, p3_chain, p3):
        w = szegedy_walk(p3_chain)
        state = apply_unitary(w, sqrt_state(p3.sigma, ancilla_dim=3, flag=0))
        flagged = sum(measure_vertex(state, [v], flag=0) for v in range(3))
        marginal = measure_vertex(state, range(3))
        assert flagged <= marginal + 1e-12

    def test_norm_guard(self):
        state = QuantumState(np.array([1.0, 0.0], dtype=complex), 1, 2)
        shrink = BlockUnitary(np.eye(2), 1, 2)
        object.__setattr__(shrink, "matrix", 0.5 * np.eye(2))
        with pytest.raises(StateIntegrityError):
            apply_unitary(shrink, state)

    def test_bad_norm_rejected(self):
        with pytest.raises(StateIntegrityError):
            QuantumState(np.array([1.0, 1.0], dtype=complex), 1, 2)


class TestLift:
    def test_middle_factor(self):
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        dims = (2, 2, 2)
        full = lift(X, dims, (1,))
        expected = np.kron(np.eye(2), np.kron(X, np.eye(2)))
        np.testing.assert_array_equal(full, expected)

    def test_swapped_pair(self):
        A = np.arange(4.0).reshape(2, 2)
        B = np.arange(4.0, 13.0).reshape(3, 3)
        dims = (3, 2)
        full = lift(np.kron(A, B), dims, (1, 0))
        expected = np.kron(B, A)
        np.testing.assert_allclose(full, expected, atol=0)
