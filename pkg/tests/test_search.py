import math

import numpy as np
import pytest

from walksearch.classical_walk import InterpolationParams, interpolate_two
from walksearch.electric import build_modified_graph, commute_quantity
from walksearch.errors import ConfigError, DisjointnessError, DomainError
from walksearch.graph_core import Distribution, build_chain, chain_power, chain_to_graph, spectral_gap
from walksearch.instances import (
    complete_with_loops,
    cycle_with_loops,
    path_three,
    random_instance,
    suite_instances,
)
from walksearch.quantum_core import QuantumState, discriminant
from walksearch.search import (
    SearchConfig,
    amplitude_amplify,
    distribution_tv,
    doubling_sweep,
    fastforward_vertex_distribution,
    sample_binomial_offset,
    search_fastforward,
    search_simple,
    search_tstep,
    simple_vertex_distribution,
    success_probability_profile,
)

from oracles import binomial_offset_pmf, two_state_projection_norm


@pytest.fixture(scope="module")
def p3():
    return path_three()


class TestSearchConfig:
    def test_odd_horizon_rejected(self):
        with pytest.raises(ConfigError):
            SearchConfig(T=15)

    def test_grid_size(self):
        cfg = SearchConfig(T=64)
        assert len(cfg.Q) == math.ceil(math.log2(14 * 64)) + 1
        assert cfg.Q[0] == 1.0
        assert cfg.holding_times[-1] == 2 ** math.ceil(math.log2(14 * 64))

    def test_defaults(self):
        cfg = SearchConfig(T=120)
        assert cfg.r_S == pytest.approx(2.0)
        assert cfg.eps_ff == pytest.approx(1.0 / (8 * 7))
        assert cfg.aa_rounds == math.ceil(math.sqrt(math.log2(120)))

    def test_small_horizon_clamps_holding(self):
        cfg = SearchConfig(T=16)
        assert cfg.r_S == 1.0 and cfg.q_S == 0.0


class TestProfile:
    def test_empty_marked_set_is_zero(self, p3):
        cfg = SearchConfig(T=8)
        prof = success_probability_profile(p3.chain, [0, 1], [], cfg)
        assert prof.average == 0.0
        assert all(v == 0.0 for v in prof.values.values())

    def test_two_state_closed_form(self):
        import walksearch.graph_core as gc

        c = build_chain(gc.WeightedGraph(np.array([[0.0, 1.0], [1.0, 0.0]])))
        cfg = SearchConfig(T=8)
        prof = success_probability_profile(c, [0], [1], cfg)
        for (t, r_M), value in prof.values.items():
            params = InterpolationParams(cfg.q_S, 1.0 - 1.0 / r_M)
            cq = interpolate_two(c, [0], [1], params)
            assert value == pytest.approx(two_state_projection_norm(cq, t), abs=1e-12)

    def test_absorbing_limit_matches_classical_absorption(self):
        # rescaled by the stationary ratio, the projection norm is the squared
        # t-step arrival probability, which tends to full absorption
        import walksearch.graph_core as gc

        c = build_chain(gc.WeightedGraph(np.array([[0.0, 1.0], [1.0, 0.0]])))
        t = 5
        prev = 0.0
        for r_M in (2.0**10, 2.0**16, 2.0**22):
            cq = interpolate_two(c, [0], [1], InterpolationParams(0.0, 1.0 - 1.0 / r_M))
            d = discriminant(cq)
            value = float(d.power_apply(t, np.array([1.0, 0.0]))[1] ** 2)
            assert value == pytest.approx(two_state_projection_norm(cq, t), abs=1e-12)
            arrival = math.sqrt(value * cq.pi[1] / cq.pi[0])
            assert arrival > prev
            prev = arrival
        assert prev == pytest.approx(1.0, abs=1e-3)

    def test_average_dominates_classical_joint(self, p3):
        # grid average of projection norms is at least the classical witness
        C = commute_quantity(p3.graph, p3.sigma, p3.marked)
        mod = build_modified_graph(p3.graph, p3.sigma, sorted(p3.marked), C)
        c = build_chain(mod.graph)
        S, M = list(mod.start_support), sorted(mod.marked_prime)
        cfg = SearchConfig(T=16)
        prof = success_probability_profile(c, S, M, cfg)
        assert prof.hypothesis_ok
        sigma = mod.sigma_prime.probabilities
        for (t, r_M) in [(2, 1), (3, 2), (5, 4)]:
            params = InterpolationParams(cfg.q_S, 1.0 - 1.0 / r_M)
            cq = interpolate_two(c, S, M, params)
            t2 = t + 4
            mid = sigma @ np.linalg.matrix_power(cq.P, t)
            masked = np.zeros_like(mid)
            masked[M] = mid[M]
            joint = float(np.sum((masked @ np.linalg.matrix_power(cq.P, t2 - t))[S]))
            assert math.sqrt(prof.values[(t, r_M)]) >= joint - 1e-10


class TestAmplitudeAmplification:
    def test_zero_rounds_identity(self, rng):
        v = rng.normal(size=6)
        v /= np.linalg.norm(v)
        state = QuantumState(v.astype(complex), 1, 6)
        out = amplitude_amplify(state, [0, 1], 0)
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=0)

    def test_full_probability_is_stable(self):
        v = np.zeros(4, dtype=complex)
        v[0] = 1.0
        state = QuantumState(v, 1, 4)
        out = amplitude_amplify(state, [0], 3)
        assert abs(np.abs(out.amplitudes[0]) ** 2 - 1.0) < 1e-12

    @pytest.mark.parametrize("rounds", range(6))
    def test_sine_law(self, rounds, rng):
        p = float(rng.uniform(0.01, 0.7))
        dim = 10
        v = np.zeros(dim)
        v[:3] = math.sqrt(p / 3)
        v[3:] = math.sqrt((1 - p) / (dim - 3))
        state = QuantumState(v.astype(complex), 1, dim)
        out = amplitude_amplify(state, np.arange(3), rounds)
        got = float(np.sum(np.abs(out.amplitudes[:3]) ** 2))
        want = math.sin((2 * rounds + 1) * math.asin(math.sqrt(p))) ** 2
        assert got == pytest.approx(want, abs=1e-10)


class TestBinomialOffset:
    def test_smallest_case_pmf(self):
        draws = [sample_binomial_offset(2, 1, np.random.default_rng([9, k])) for k in range(20_000)]
        freqs = {n: draws.count(n) / len(draws) for n in (-1, 0, 1)}
        for n, expect in ((-1, 0.25), (0, 0.5), (1, 0.25)):
            se = math.sqrt(expect * (1 - expect) / len(draws))
            assert abs(freqs[n] - expect) < 4 * se

    def test_even_symmetry(self):
        pmf = binomial_offset_pmf(12, 4)
        for n in range(1, 5):
            assert pmf[n] == pytest.approx(pmf[-n], abs=1e-15)

    def test_mean_absolute_offset(self):
        t, cap = 36, 12
        pmf = binomial_offset_pmf(t, cap)
        exact_mean = sum(abs(n) * p for n, p in pmf.items())
        draws = np.array([sample_binomial_offset(t, cap, np.random.default_rng([17, k])) for k in range(20_000)])
        se = np.abs(draws).std() / math.sqrt(len(draws))
        assert abs(np.abs(draws).mean() - exact_mean) < 3 * se

    def test_tiny_window_rejected(self):
        # the centered window always keeps the binomial bulk, so only an
        # extremely spread distribution can starve it
        with pytest.raises(DomainError):
            sample_binomial_offset(10**14, 1, 0)


class TestFastForwardSearch:
    def test_start_on_marked_rejected(self, p3):
        sigma = Distribution.point_mass(3, 2)
        with pytest.raises(DisjointnessError):
            search_fastforward(p3.chain, sigma, [2], SearchConfig(T=8))

    def test_empty_marked_never_found(self, p3):
        out = search_fastforward(p3.chain, p3.sigma, [], SearchConfig(T=8))
        assert out.found is None and out.success_probability == 0.0

    def test_sweep_reaches_constant_success(self, p3):
        C = commute_quantity(p3.graph, p3.sigma, p3.marked)
        out, history = doubling_sweep(p3.chain, p3.sigma, sorted(p3.marked), SearchConfig(T=4, seed=7))
        assert out.success_probability >= 0.5
        assert out.config.T <= 64 * C
        assert out.found in (None, 2)

    def test_trace_keys_cover_grid(self, p3):
        cfg = SearchConfig(T=8, seed=1)
        out = search_fastforward(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        assert set(out.trace) == {(t, r) for t in range(1, 9) for r in cfg.holding_times}

    def test_pre_amplification_scaling(self):
        # recorded baseline: grid average times log2(T) stays above 0.09
        for prob in suite_instances():
            C = commute_quantity(prob.graph, prob.sigma, sorted(prob.marked))
            mod = build_modified_graph(prob.graph, prob.sigma, sorted(prob.marked), C)
            c_prime = commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime)
            T = 2 * math.ceil(2 * c_prime)
            if T > 256:
                continue
            cfg = SearchConfig(T=T, seed=3)
            out = search_fastforward(prob.chain, prob.sigma, sorted(prob.marked), cfg)
            assert out.pre_amplification_probability * math.log2(T) >= 0.09

    def test_determinism(self, p3):
        cfg = SearchConfig(T=16, seed=123)
        a = search_fastforward(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        b = search_fastforward(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        assert a.success_probability == b.success_probability
        assert a.found == b.found
        assert dict(a.counters) == dict(b.counters)


class TestSimpleSearch:
    def test_empty_marked_never_found(self, p3):
        out = search_simple(p3.chain, p3.sigma, [], SearchConfig(T=8))
        assert out.found is None

    def test_matches_fastforward_measurement_law(self, p3):
        cfg = SearchConfig(T=16, seed=4)
        nu1 = fastforward_vertex_distribution(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        nu2, _ = simple_vertex_distribution(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        assert distribution_tv(nu1, nu2) <= 1e-8
        assert nu1.sum() == pytest.approx(1.0, abs=1e-10)

    def test_single_shot_within_factor_of_fastforward(self, p3):
        cfg = SearchConfig(T=16, seed=4)
        out = search_simple(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        nu1 = fastforward_vertex_distribution(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        mod_marked = sorted(
            build_modified_graph(
                chain_to_graph(p3.chain), p3.sigma, sorted(p3.marked),
                commute_quantity(p3.graph, p3.sigma, p3.marked),
            ).marked_prime
        )
        alg1_marked_mass = float(nu1[mod_marked].sum())
        ratio = out.pre_amplification_probability / alg1_marked_mass
        assert 0.25 <= ratio <= 4.0

    def test_single_shot_baseline(self):
        # recorded baseline: single-shot success times log2(T) stays above 0.25
        for prob in suite_instances():
            C = commute_quantity(prob.graph, prob.sigma, sorted(prob.marked))
            mod = build_modified_graph(prob.graph, prob.sigma, sorted(prob.marked), C)
            c_prime = commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime)
            T = 2 * math.ceil(2 * c_prime)
            if T > 256:
                continue
            out = search_simple(prob.chain, prob.sigma, sorted(prob.marked), SearchConfig(T=T, seed=5))
            assert out.pre_amplification_probability * math.log2(T) >= 0.25

    def test_repetition_reaches_constant_success(self, p3):
        out = search_simple(p3.chain, p3.sigma, sorted(p3.marked), SearchConfig(T=32, seed=6))
        assert out.success_probability >= 0.5

    def test_zero_sector_measures_start_state(self, p3):
        # a zero-offset draw applies no walk step: the measurement law is the
        # start distribution itself, which carries no marked mass
        from walksearch.search import _mixture_components, _prepare_gadget

        cfg = SearchConfig(T=8, seed=0)
        space = _prepare_gadget(p3.chain, p3.sigma, sorted(p3.marked), None)
        _, margs = _mixture_components(space, cfg)
        for r_M in cfg.holding_times:
            base = margs[(r_M, 0)][0]
            np.testing.assert_allclose(base, space.mod.sigma_prime.probabilities, atol=1e-12)
            assert base[sorted(space.marked)].sum() == 0.0

    def test_determinism(self, p3):
        cfg = SearchConfig(T=16, seed=99)
        a = search_simple(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        b = search_simple(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        assert a.found == b.found
        assert a.success_probability == b.success_probability


class TestTStepSearch:
    def test_unit_inner_step_reduces_to_fastforward(self, p3):
        cfg = SearchConfig(T=16, seed=2)
        a = search_fastforward(p3.chain, p3.sigma, sorted(p3.marked), cfg)
        b = search_tstep(p3.chain, p3.sigma, sorted(p3.marked), 1, cfg)
        assert abs(a.success_probability - b.success_probability) < 1e-9
        assert b.counters["inner_walk_per_step"] == 1

    def test_mixing_regime_bounds_commute_quantity(self):
        k5 = complete_with_loops(5)
        c = k5.chain
        M = sorted(k5.marked)
        t_inner = math.ceil(1.0 / spectral_gap(c))
        ct = chain_power(c, t_inner)
        g_t = chain_to_graph(ct)
        C_t = commute_quantity(g_t, Distribution(ct.pi), M, on_marked="absorb")
        pi_M = float(c.pi[M].sum())
        assert C_t <= 2.0 / pi_M

    def test_single_marked_power_regime(self):
        # recorded baseline: HT(P^t, m) * pi(m) <= 2 at t = ceil(pi(m) HT)
        from walksearch.classical_walk import exact_hitting_time

        for prob in suite_instances():
            M = sorted(prob.marked)
            if len(M) != 1:
                continue
            c = prob.chain
            m = M[0]
            ht = exact_hitting_time(c, M)
            t_inner = max(1, math.ceil(c.pi[m] * ht))
            ht_t = exact_hitting_time(chain_power(c, t_inner), M)
            assert ht_t * c.pi[m] <= 2.0

    def test_inner_walk_counter_scaling(self):
        c5 = cycle_with_loops(5)
        cfg = SearchConfig(T=16, seed=2)
        for t_inner in (4, 16, 64):
            out = search_tstep(c5.chain, c5.sigma, sorted(c5.marked), t_inner, cfg)
            per = out.counters["inner_walk_per_step"]
            eps_inner = out.details["eps_inner"]
            assert per >= math.sqrt(t_inner)
            assert per <= 4 * math.ceil(math.sqrt(2 * t_inner * math.log(2 / eps_inner))) + 4
            assert out.counters["inner_walk"] == per * out.counters["walk"]
