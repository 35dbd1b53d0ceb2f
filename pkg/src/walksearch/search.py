"""The two search algorithms over the two-layer gadget, evaluated exactly.

Success probabilities are state-vector norms computed without sampling
noise: the fast-forwarding block acts on eigenvalues through the truncated
expansion, amplitude amplification is an exact two-dimensional rotation,
and the simpler algorithm's measurement law is an explicitly enumerated
mixture.  Seeds only drive the reported sampled outcomes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ._rng import as_rng
from .errors import ConfigError, DisjointnessError, DomainError, PreconditionError
from .graph_core import (
    Distribution,
    ReversibleChain,
    build_chain,
    chain_power,
    chain_to_graph,
)
from .classical_walk import InterpolationParams, interpolate_two
from .electric import ModifiedInstance, build_modified_graph, commute_quantity
from .fast_forward import (
    ChebyshevExpansion,
    chebyshev_expansion,
    eval_block_values,
    ladder_levels,
    prep_unitary,
    reflection_product,
    truncation_degree,
)
from .quantum_core import QuantumState, discriminant, szegedy_walk


@dataclass(frozen=True)
class SearchConfig:
    """Knobs shared by the search algorithms.

    ``T`` is the time horizon (positive even integer).  Deferred defaults:
    start-holding time ``r_S = max(1, T/60)``, fast-forward precision
    ``eps_ff = 1/(8 ceil(log2 T))``, amplification rounds
    ``ceil(sqrt(log2 T))``.  ``Q`` is the reciprocal-holding-time grid
    {1, 1/2, ..., 2^-ceil(log2(14T))}.
    """

    T: int
    r_S: float | None = None
    eps_ff: float | None = None
    aa_rounds: int | None = None
    seed: int = 0
    success_threshold: float = 0.5
    shots_factor: int = 8

    def __post_init__(self):
        if not isinstance(self.T, int) or self.T < 2 or self.T % 2:
            raise ConfigError(f"T must be a positive even integer, got {self.T!r}")
        if self.r_S is None:
            object.__setattr__(self, "r_S", max(1.0, self.T / 60.0))
        if self.r_S < 1.0:
            raise ConfigError(f"r_S must be >= 1, got {self.r_S}")
        if self.eps_ff is None:
            object.__setattr__(self, "eps_ff", 1.0 / (8.0 * max(1, math.ceil(math.log2(self.T)))))
        if not (0.0 < self.eps_ff < 1.0):
            raise ConfigError(f"eps_ff must lie in (0, 1), got {self.eps_ff}")
        if self.aa_rounds is None:
            object.__setattr__(self, "aa_rounds", math.ceil(math.sqrt(math.log2(self.T))))
        if self.aa_rounds < 0:
            raise ConfigError("aa_rounds must be >= 0")
        if not (0.0 < self.success_threshold <= 1.0):
            raise ConfigError("success_threshold must lie in (0, 1]")
        if self.shots_factor < 1:
            raise ConfigError("shots_factor must be >= 1")

    @property
    def q_S(self) -> float:
        return 1.0 - 1.0 / self.r_S

    @property
    def Q(self) -> tuple[float, ...]:
        top = math.ceil(math.log2(14 * self.T))
        return tuple(2.0**-j for j in range(top + 1))

    @property
    def holding_times(self) -> tuple[int, ...]:
        """Integer marked-holding times r_M = 1/q for q in Q."""
        return tuple(int(round(1.0 / q)) for q in self.Q)

    @property
    def shots(self) -> int:
        return self.shots_factor * max(1, math.ceil(math.log2(self.T)))

    def replace(self, **kw) -> "SearchConfig":
        base = dict(
            T=self.T, r_S=self.r_S, eps_ff=self.eps_ff, aa_rounds=self.aa_rounds,
            seed=self.seed, success_threshold=self.success_threshold,
            shots_factor=self.shots_factor,
        )
        base.update(kw)
        return SearchConfig(**base)


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    """Result of one search run; probabilities are exact state-vector values."""

    found: int | None
    success_probability: float
    pre_amplification_probability: float
    flag_probability: float
    counters: Mapping[str, int]
    trace: Mapping[tuple[int, int], float]
    config: SearchConfig
    details: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ProfileResult:
    """Exact grid of marked-projection norms ||Pi_M D^t(q) sqrt(sigma)||^2."""

    values: Mapping[tuple[int, int], float]
    average: float
    hypothesis_ok: bool


# ---------------------------------------------------------------------------
# shared gadget plumbing


@dataclass(frozen=True, eq=False)
class _GadgetSpace:
    mod: ModifiedInstance
    chain: ReversibleChain
    start: tuple[int, ...]
    marked: tuple[int, ...]
    sqrt_sigma: np.ndarray
    C_sigma: float


def _prepare_gadget(
    c: ReversibleChain, sigma: Distribution, marked: Iterable[int], C: float | None
) -> _GadgetSpace:
    M = sorted(set(int(v) for v in marked))
    overlap = [u for u in sigma.support if u in set(M)]
    if overlap:
        raise DisjointnessError(f"start distribution touches marked vertices {overlap}")
    g = chain_to_graph(c)
    C_sigma = commute_quantity(g, sigma, M)
    if C is None:
        C = C_sigma
    elif C < C_sigma * (1.0 - 1e-9):
        raise PreconditionError(f"budget C = {C} is below the commute quantity {C_sigma}")
    mod = build_modified_graph(g, sigma, M, C)
    chain = build_chain(mod.graph)
    sqrt_sigma = np.sqrt(mod.sigma_prime.probabilities)
    return _GadgetSpace(
        mod=mod,
        chain=chain,
        start=mod.start_support,
        marked=tuple(sorted(mod.marked_prime)),
        sqrt_sigma=sqrt_sigma,
        C_sigma=C_sigma,
    )


def _interpolated_discriminants(space: _GadgetSpace, cfg: SearchConfig):
    """Eigendecompositions of D(q) for each marked-holding time in the grid."""
    out = []
    for r_M in cfg.holding_times:
        params = InterpolationParams(cfg.q_S, 1.0 - 1.0 / r_M)
        cq = interpolate_two(space.chain, space.start, space.marked, params)
        out.append((r_M, discriminant(cq)))
    return out


# ---------------------------------------------------------------------------
# exact profile (untruncated powers)


def success_probability_profile(
    c: ReversibleChain, start_set: Iterable[int], marked: Iterable[int], cfg: SearchConfig
) -> ProfileResult:
    """||Pi_M D^t(q) sqrt(pi|_S)||^2 over the (t, r_M) grid, by eigendecomposition.

    The guarantee behind the grid average needs pi(S) within [1/C, 2/C] of
    the commute quantity; a violation only warns, the values stay exact.
    """
    S = sorted(set(int(v) for v in start_set))
    M = sorted(set(int(v) for v in marked))
    if not M:
        values = {(t, r): 0.0 for t in range(1, cfg.T + 1) for r in cfg.holding_times}
        return ProfileResult(values=values, average=0.0, hypothesis_ok=True)
    sigma = Distribution.restriction(c.pi, S)
    g = chain_to_graph(c)
    C = commute_quantity(g, sigma, M)
    pi_S = float(c.pi[S].sum())
    ok = (1.0 / C) * (1 - 1e-9) <= pi_S <= (2.0 / C) * (1 + 1e-9)
    if not ok:
        warnings.warn(
            f"pi(S) = {pi_S!r} outside [1/C, 2/C] = [{1.0 / C!r}, {2.0 / C!r}]; "
            "grid average is not guaranteed",
            stacklevel=2,
        )
    sqrt_sigma = np.sqrt(sigma.probabilities)
    values: dict[tuple[int, int], float] = {}
    for r_M in cfg.holding_times:
        params = InterpolationParams(cfg.q_S, 1.0 - 1.0 / r_M)
        d = discriminant(interpolate_two(c, S, M, params))
        coeff = d.eigenvectors.T @ sqrt_sigma
        VM = d.eigenvectors[M, :]
        lam_t = np.ones_like(d.eigenvalues)
        for t in range(1, cfg.T + 1):
            lam_t = lam_t * d.eigenvalues
            amp = VM @ (lam_t * coeff)
            values[(t, r_M)] = float(amp @ amp)
    avg = float(np.mean(list(values.values())))
    return ProfileResult(values=values, average=avg, hypothesis_ok=ok)


# ---------------------------------------------------------------------------
# amplitude amplification


def amplitude_amplify(state: QuantumState, good, rounds: int) -> QuantumState:
    """Exact Grover iteration: reflect about the good subspace, then the state.

    ``good`` is a boolean mask or index set over the joint basis.  For an
    initial good-subspace probability p the result carries probability
    sin^2((2k+1) arcsin sqrt(p)) after k rounds.
    """
    if rounds < 0:
        raise PreconditionError("rounds must be >= 0")
    dim = state.amplitudes.shape[0]
    mask = np.zeros(dim, dtype=bool)
    good = np.asarray(good)
    if good.dtype == bool:
        mask = good.copy()
    else:
        mask[good.astype(int)] = True
    psi0 = state.amplitudes
    psi = psi0.copy()
    for _ in range(rounds):
        psi = np.where(mask, -psi, psi)
        psi = 2.0 * np.vdot(psi0, psi) * psi0 - psi
    return QuantumState(psi, state.ancilla_dim, state.system_dim)


def _amplified_probability(p: float, rounds: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return float(np.sin((2 * rounds + 1) * np.arcsin(np.sqrt(p))) ** 2)


# ---------------------------------------------------------------------------
# fast-forwarding search


def search_fastforward(
    c: ReversibleChain,
    sigma: Distribution,
    marked: Iterable[int],
    cfg: SearchConfig,
    *,
    C: float | None = None,
) -> SearchOutcome:
    """Fast-forwarding search over the gadget, with amplitude amplification.

    Prepares the uniform superposition over (t in [T], q_M in Q) tensored
    with the relocated start state, applies the controlled fast-forward of
    the doubly interpolated walk at precision ``eps_ff``, amplifies the
    flagged marked component, and reports the exact probability that the
    final vertex measurement is marked (flag verified), plus a seeded sample.
    """
    M = sorted(set(int(v) for v in marked))
    if not M:
        return SearchOutcome(
            found=None, success_probability=0.0, pre_amplification_probability=0.0,
            flag_probability=0.0, counters={}, trace={}, config=cfg,
        )
    space = _prepare_gadget(c, sigma, marked, C)
    grid = _interpolated_discriminants(space, cfg)
    exps = [chebyshev_expansion(t, cfg.eps_ff) for t in range(1, cfg.T + 1)]

    m_idx = list(space.marked)
    cells = cfg.T * len(grid)
    trace: dict[tuple[int, int], float] = {}
    good_amps = np.zeros((len(grid), cfg.T, len(m_idx)))
    flag_mass = 0.0
    for qi, (r_M, d) in enumerate(grid):
        coeff = d.eigenvectors.T @ space.sqrt_sigma
        VM = d.eigenvectors[m_idx, :]
        for t in range(1, cfg.T + 1):
            vals = eval_block_values(exps[t - 1], d.eigenvalues)
            vec = vals * coeff
            amp = VM @ vec
            good_amps[qi, t - 1, :] = amp
            trace[(t, r_M)] = float(amp @ amp)
            flag_mass += float(vec @ vec)

    p_good = float(good_amps.ravel() @ good_amps.ravel()) / cells
    flag_probability = flag_mass / cells

    # reduced state: the good component in full, the rest folded onto one axis
    good_vec = good_amps.ravel() / math.sqrt(cells)
    reduced = np.concatenate([good_vec, [math.sqrt(max(0.0, 1.0 - p_good))]])
    mask = np.zeros(reduced.size, dtype=bool)
    mask[:-1] = True
    amplified = amplitude_amplify(
        QuantumState(reduced.astype(complex), 1, reduced.size), mask, cfg.aa_rounds
    )
    success = float(np.sum(np.abs(amplified.amplitudes[:-1]) ** 2))

    rng = as_rng(cfg.seed)
    found = None
    if p_good > 0 and rng.random() < success:
        weights = good_amps.reshape(-1, len(m_idx)) ** 2
        per_marked = weights.sum(axis=0)
        pick = int(np.searchsorted(np.cumsum(per_marked / per_marked.sum()), rng.random()))
        found = m_idx[min(pick, len(m_idx) - 1)]

    d_max = exps[-1].d
    levels = ladder_levels(d_max)
    walk_per_u = 2 * ((1 << levels) - 1) + 1
    reflections = 2 * cfg.aa_rounds + 1
    counters = {
        "walk": walk_per_u * reflections,
        "check": 2 * walk_per_u * reflections + cfg.aa_rounds,
        "setup": 1 + 2 * cfg.aa_rounds,
        "ff_degree": d_max,
        "ff_levels": levels,
    }
    return SearchOutcome(
        found=found,
        success_probability=success,
        pre_amplification_probability=p_good,
        flag_probability=flag_probability,
        counters=counters,
        trace=trace,
        config=cfg,
        details={"C": space.mod.C, "C_sigma": space.C_sigma},
    )


def doubling_sweep(
    c: ReversibleChain,
    sigma: Distribution,
    marked: Iterable[int],
    base_cfg: SearchConfig,
    *,
    T_start: int = 4,
    T_cap: int | None = None,
    C: float | None = None,
) -> tuple[SearchOutcome, dict[int, float]]:
    """Double T until the post-amplification success clears the threshold.

    Returns the first passing outcome (or the best one if the cap is hit)
    together with the success value recorded at every horizon tried.
    """
    space_probe = _prepare_gadget(c, sigma, marked, C)
    if T_cap is None:
        T_cap = max(T_start, int(64 * space_probe.C_sigma))
    history: dict[int, float] = {}
    best: SearchOutcome | None = None
    T = max(2, T_start + (T_start % 2))
    while True:
        cfg = base_cfg.replace(T=T, r_S=None, eps_ff=None, aa_rounds=None)
        out = search_fastforward(c, sigma, marked, cfg, C=C)
        history[T] = out.success_probability
        if best is None or out.success_probability > best.success_probability:
            best = out
        if out.success_probability >= base_cfg.success_threshold:
            return out, history
        if 2 * T > T_cap:
            return best, history
        T *= 2


# ---------------------------------------------------------------------------
# simpler interpolated-walk search


def sample_binomial_offset(t: int, cap: int, seed) -> int:
    """Centered binomial offset by rejection, capped to the admissible window.

    For even t the returned n has law proportional to binom(t, t/2 + n) on
    |n| <= cap and indexes the Chebyshev degree 2n; for odd t the law is
    proportional to binom(t, (t-1)/2 + n) on -cap <= n <= cap + 1 with
    degree 2n - 1.  Raises if the window keeps less than 1e-6 of the mass.
    """
    if cap < 1:
        raise PreconditionError("cap must be >= 1")
    if t < 1:
        raise PreconditionError("t must be >= 1")
    center = t // 2 if t % 2 == 0 else (t - 1) // 2
    lo, hi = -cap, cap if t % 2 == 0 else cap + 1
    ks = np.arange(max(0, center + lo), min(t, center + hi) + 1)
    logw = (
        math.lgamma(t + 1)
        - np.vectorize(math.lgamma)(ks + 1.0)
        - np.vectorize(math.lgamma)(t - ks + 1.0)
        - t * math.log(2.0)
    )
    mass = float(np.exp(logw).sum())
    if mass < 1e-6:
        raise DomainError(f"window keeps only {mass:.3e} of the binomial mass")
    rng = as_rng(seed)
    for _ in range(100_000):
        n = int(rng.binomial(t, 0.5)) - center
        if lo <= n <= hi:
            return n
    raise RuntimeError("rejection sampling failed to terminate")  # pragma: no cover


def _sector_weights(exp: ChebyshevExpansion) -> np.ndarray:
    """Normalized ladder-sector law |<m|R|0>|^2; sums to one."""
    c = exp.lcu_coefficients()
    return c / exp.alpha


def _sector_states(w_matrix: np.ndarray, g_matrix: np.ndarray, v0: np.ndarray, half: int, odd: bool):
    """Vectors (W) G^m v0 for m = 0..half."""
    states = [v0]
    for _ in range(half):
        states.append(g_matrix @ states[-1])
    if odd:
        states = [w_matrix @ s for s in states]
    return states


def _mixture_components(space: _GadgetSpace, cfg: SearchConfig):
    """Per-(holding time, parity, sector) vertex marginals of the walk powers."""
    exps = [chebyshev_expansion(t, cfg.eps_ff) for t in range(1, cfg.T + 1)]
    max_half = max(e.half for e in exps)
    n_sys = space.chain.n
    margs = {}
    for r_M in cfg.holding_times:
        params = InterpolationParams(cfg.q_S, 1.0 - 1.0 / r_M)
        cq = interpolate_two(space.chain, space.start, space.marked, params)
        w = szegedy_walk(cq)
        G = reflection_product(w)
        v0 = np.zeros(w.dim)
        v0[w.flag * n_sys : (w.flag + 1) * n_sys] = space.sqrt_sigma
        even_states = _sector_states(w.matrix, G, v0, max_half, odd=False)
        odd_states = [w.matrix @ s for s in even_states]
        margs[(r_M, 0)] = np.stack(
            [(s.reshape(w.ancilla_dim, n_sys) ** 2).sum(axis=0) for s in even_states]
        )
        margs[(r_M, 1)] = np.stack(
            [(s.reshape(w.ancilla_dim, n_sys) ** 2).sum(axis=0) for s in odd_states]
        )
    return exps, margs


def simple_vertex_distribution(
    c: ReversibleChain,
    sigma: Distribution,
    marked: Iterable[int],
    cfg: SearchConfig,
    *,
    C: float | None = None,
) -> tuple[np.ndarray, _GadgetSpace]:
    """Exact vertex-measurement law of the simpler algorithm's mixture.

    Enumerates (r_M, t, sector) with the prep-column sector law and averages
    the vertex marginals of the corresponding walk-power states.
    """
    space = _prepare_gadget(c, sigma, marked, C)
    exps, margs = _mixture_components(space, cfg)
    dist = np.zeros(space.chain.n)
    cell = 1.0 / (cfg.T * len(cfg.holding_times))
    for r_M in cfg.holding_times:
        for t in range(1, cfg.T + 1):
            wts = _sector_weights(exps[t - 1])
            marg = margs[(r_M, t % 2)]
            dist += cell * (wts @ marg[: wts.size])
    return dist, space


def search_simple(
    c: ReversibleChain,
    sigma: Distribution,
    marked: Iterable[int],
    cfg: SearchConfig,
    *,
    C: float | None = None,
) -> SearchOutcome:
    """Simpler search: random (r_M, t, sector), walk-power application, measure.

    The single-shot marked probability is exact; ``shots`` seeded repetitions
    each draw (r_M, t, sector) and then a vertex from that component's
    measurement law, and the first marked draw is reported.
    """
    M = sorted(set(int(v) for v in marked))
    if not M:
        return SearchOutcome(
            found=None, success_probability=0.0, pre_amplification_probability=0.0,
            flag_probability=0.0, counters={}, trace={}, config=cfg,
        )
    space = _prepare_gadget(c, sigma, marked, C)
    exps, margs = _mixture_components(space, cfg)
    n_sys = space.chain.n
    dist = np.zeros(n_sys)
    cell = 1.0 / (cfg.T * len(cfg.holding_times))
    for r_M in cfg.holding_times:
        for t in range(1, cfg.T + 1):
            wts = _sector_weights(exps[t - 1])
            dist += cell * (wts @ margs[(r_M, t % 2)][: wts.size])
    m_idx = list(space.marked)
    single_shot = float(dist[m_idx].sum())
    shots = cfg.shots
    overall = 1.0 - (1.0 - single_shot) ** shots

    rng = as_rng(cfg.seed)
    found = None
    walk_calls = 0
    for _ in range(shots):
        t = int(rng.integers(1, cfg.T + 1))
        r_M = cfg.holding_times[int(rng.integers(0, len(cfg.holding_times)))]
        wts = _sector_weights(exps[t - 1])
        m_sector = min(int(np.searchsorted(np.cumsum(wts), rng.random())), wts.size - 1)
        walk_calls += 2 * m_sector + (t % 2)
        component = margs[(r_M, t % 2)][m_sector]
        cum = np.cumsum(component / component.sum())
        v = min(int(np.searchsorted(cum, rng.random())), n_sys - 1)
        if v in space.marked and found is None:
            found = v
    counters = {"walk": walk_calls, "check": shots, "setup": shots}
    trace = {(0, 0): single_shot}
    return SearchOutcome(
        found=found,
        success_probability=overall,
        pre_amplification_probability=single_shot,
        flag_probability=single_shot,
        counters=counters,
        trace=trace,
        config=cfg,
        details={"C": space.mod.C, "C_sigma": space.C_sigma, "shots": float(shots)},
    )


def fastforward_vertex_distribution(
    c: ReversibleChain,
    sigma: Distribution,
    marked: Iterable[int],
    cfg: SearchConfig,
    *,
    C: float | None = None,
) -> np.ndarray:
    """Vertex-measurement law of the fast-forwarding state before amplification.

    Applies the literal per-(t, q) circuit (prep, controlled ladder, parity
    walk, inverse prep) to the start vector and marginalizes the ancillas.
    """
    space = _prepare_gadget(c, sigma, marked, C)
    n_sys = space.chain.n
    exps = [chebyshev_expansion(t, cfg.eps_ff) for t in range(1, cfg.T + 1)]
    max_half = max(e.half for e in exps)
    dist = np.zeros(n_sys)
    cell = 1.0 / (cfg.T * len(cfg.Q))
    for r_M in cfg.holding_times:
        params = InterpolationParams(cfg.q_S, 1.0 - 1.0 / r_M)
        cq = interpolate_two(space.chain, space.start, space.marked, params)
        w = szegedy_walk(cq)
        G = reflection_product(w)
        v0 = np.zeros(w.dim)
        v0[w.flag * n_sys : (w.flag + 1) * n_sys] = space.sqrt_sigma
        powers = _sector_states(w.matrix, G, v0, max_half, odd=False)
        powers_odd = [w.matrix @ s for s in powers]
        for t in range(1, cfg.T + 1):
            exp = exps[t - 1]
            ell = ladder_levels(exp.d)
            counter = 1 << ell
            R = prep_unitary(exp, ell)
            base = powers_odd if t % 2 else powers
            # ladder (and parity walk) applied to (R (x) I) |0, v0>
            sectors = np.zeros((counter, w.dim))
            for m in range(exp.half + 1):
                sectors[m] = R[m, 0] * base[m]
            final = R.T @ sectors.reshape(counter, -1)
            amps = final.reshape(counter * w.ancilla_dim, n_sys)
            dist += cell * (amps**2).sum(axis=0)
    return dist


def distribution_tv(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


# ---------------------------------------------------------------------------
# t-step framework


def search_tstep(
    c: ReversibleChain,
    sigma: Distribution,
    marked: Iterable[int],
    t_inner: int,
    cfg: SearchConfig,
    *,
    C: float | None = None,
) -> SearchOutcome:
    """Fast-forwarding search against the t-step chain P^t.

    The inner walk operator is costed as a fast-forward of the base walk at
    precision scaled to the outer application count, so the inner-walk
    counter grows like sqrt(t_inner) per outer step; success probabilities
    use the exact t-step chain.
    """
    if t_inner < 1:
        raise PreconditionError(f"t_inner must be >= 1, got {t_inner}")
    ct = chain_power(c, t_inner)
    out = search_fastforward(ct, sigma, marked, cfg, C=C)
    outer_walks = out.counters.get("walk", 0)
    if t_inner == 1:
        inner_per = 1
        eps_inner = float("nan")
    else:
        eps_inner = 1.0 / (8.0 * max(2, outer_walks))
        d_inner = truncation_degree(t_inner, eps_inner)
        inner_per = 2 * ((1 << ladder_levels(d_inner)) - 1) + (t_inner % 2)
    counters = dict(out.counters)
    counters["inner_walk_per_step"] = inner_per
    counters["inner_walk"] = inner_per * outer_walks
    details = dict(out.details)
    details["t_inner"] = float(t_inner)
    if t_inner > 1:
        details["eps_inner"] = eps_inner
    return SearchOutcome(
        found=out.found,
        success_probability=out.success_probability,
        pre_amplification_probability=out.pre_amplification_probability,
        flag_probability=out.flag_probability,
        counters=counters,
        trace=out.trace,
        config=cfg,
        details=details,
    )
