"""Interpolated chains, exact stopping-time solvers, Monte Carlo, and box sequences.

The exact solvers are all first-step analysis: restrict the transition
matrix, solve a dense linear system, read off expectations.  They serve as
the classical ground truth the electric and quantum modules are checked
against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._rng import as_rng
from .errors import DisjointnessError, NotErgodicError, PreconditionError
from .graph_core import (
    Distribution,
    ReversibleChain,
    chain_to_graph,
    check_ergodic,
)
from . import electric


# ---------------------------------------------------------------------------
# interpolation


@dataclass(frozen=True)
class InterpolationParams:
    """Holding parameters (q_S, q_M) in [0,1); r = 1/(1-q) is the mean hold."""

    q_S: float
    q_M: float

    def __post_init__(self):
        for name, q in (("q_S", self.q_S), ("q_M", self.q_M)):
            if not (0.0 <= q < 1.0):
                raise PreconditionError(f"{name} must lie in [0, 1), got {q}")

    @property
    def r_S(self) -> float:
        return 1.0 / (1.0 - self.q_S)

    @property
    def r_M(self) -> float:
        return 1.0 / (1.0 - self.q_M)

    @classmethod
    def from_holding_times(cls, r_S: float, r_M: float) -> "InterpolationParams":
        if r_S < 1 or r_M < 1:
            raise PreconditionError("holding times must be >= 1")
        return cls(1.0 - 1.0 / r_S, 1.0 - 1.0 / r_M)


def absorbing_matrix(c: ReversibleChain, marked: Iterable[int]) -> np.ndarray:
    """Transition matrix of the walk that halts on the marked set.

    Not a reversible chain (it is not ergodic); exposed as the limit object
    for oracle computations.
    """
    M = sorted(set(int(v) for v in marked))
    P = np.array(c.P)
    P[M, :] = 0.0
    P[M, M] = 1.0
    return P


def interpolate_absorbing(c: ReversibleChain, marked: Iterable[int], s: float) -> ReversibleChain:
    """Convex mixture of the walk with its absorbing version on the marked set.

    Rows off the marked set are untouched; marked rows become
    (1-s) P_{u,.} + s e_u.  The stationary mass of a marked vertex scales by
    1/(1-s), which keeps the result reversible and ergodic for s in [0,1).
    """
    M = sorted(set(int(v) for v in marked))
    if not M:
        raise PreconditionError("marked set must be nonempty")
    if not (0.0 <= s < 1.0):
        raise PreconditionError(f"s must lie in [0, 1); s = 1 is the absorbing limit, got {s}")
    P = np.array(c.P)
    P[M, :] *= 1.0 - s
    P[M, M] += s
    pi = np.array(c.pi)
    pi[M] /= 1.0 - s
    return ReversibleChain(P, pi / pi.sum())


def interpolate_two(
    c: ReversibleChain,
    start_set: Iterable[int],
    marked: Iterable[int],
    params: InterpolationParams,
) -> ReversibleChain:
    """Hold on the start set with q_S and on the marked set with q_M.

    Rows in the start set become (1-q_S) P + q_S I, marked rows
    (1-q_M) P + q_M I, all others stay P.  The stationary distribution is
    the original one rescaled blockwise by 1/(1-q_S), 1/(1-q_M), 1.
    """
    S = sorted(set(int(v) for v in start_set))
    M = sorted(set(int(v) for v in marked))
    if set(S) & set(M):
        raise DisjointnessError(f"start and marked sets overlap on {sorted(set(S) & set(M))}")
    P = np.array(c.P)
    pi = np.array(c.pi)
    for block, q in ((S, params.q_S), (M, params.q_M)):
        if block:
            P[block, :] *= 1.0 - q
            P[block, block] += q
            pi[block] /= 1.0 - q
    return ReversibleChain(P, pi / pi.sum())


# ---------------------------------------------------------------------------
# exact stopping-time solvers


@dataclass(frozen=True)
class StoppingStats:
    """First-step-analysis summary for a (start set, marked set) pair."""

    hitting_time: float
    return_probability: float
    expected_return: float
    commute_time: float


def _support_reachable(P: np.ndarray, targets: Iterable[int]) -> np.ndarray:
    return electric._reachable_from(P > 0, targets)


def exact_hitting_time(
    c: ReversibleChain, marked: Iterable[int], sigma: Distribution | None = None
) -> float:
    """Expected steps from ``sigma`` (default stationary) until the marked set.

    Solves (I - P restricted off the marked set) h = 1 and returns sigma . h;
    start mass on the marked set contributes zero.  Returns ``inf`` if some
    start mass cannot reach the marked set.
    """
    M = sorted(set(int(v) for v in marked))
    if not M:
        raise PreconditionError("marked set must be nonempty")
    start = c.pi if sigma is None else sigma.probabilities
    reach = _support_reachable(c.P, M)
    stranded = (~reach) & (start > 0)
    stranded[M] = False
    if np.any(stranded):
        return math.inf
    U = np.array([u for u in range(c.n) if u not in set(M) and reach[u]], dtype=int)
    h = np.zeros(c.n)
    if U.size:
        A = np.eye(U.size) - c.P[np.ix_(U, U)]
        h[U] = np.linalg.solve(A, np.ones(U.size))
    return float(start @ h)


def _harmonic_escape(c: ReversibleChain, zeros: list[int], ones: list[int]) -> np.ndarray:
    """h with h=0 on ``zeros``, h=1 on ``ones``, harmonic elsewhere."""
    fixed = set(zeros) | set(ones)
    U = np.array([u for u in range(c.n) if u not in fixed], dtype=int)
    h = np.zeros(c.n)
    h[ones] = 1.0
    if U.size:
        A = np.eye(U.size) - c.P[np.ix_(U, U)]
        b = c.P[np.ix_(U, ones)].sum(axis=1)
        h[U] = np.linalg.solve(A, b)
    return h


def exact_return_prob(c: ReversibleChain, start_set: Iterable[int], marked: Iterable[int]) -> float:
    """Pr(hit the marked set before returning to the start set), from pi|_S.

    Uses the escape potential h (0 on S, 1 on M, harmonic elsewhere) and
    averages the one-step value over the stationary restriction to S.
    """
    S = sorted(set(int(v) for v in start_set))
    M = sorted(set(int(v) for v in marked))
    if set(S) & set(M):
        raise DisjointnessError(f"sets overlap on {sorted(set(S) & set(M))}")
    if not S or not M:
        raise PreconditionError("both vertex sets must be nonempty")
    h = _harmonic_escape(c, S, M)
    sigma = Distribution.restriction(c.pi, S)
    return float(sigma.probabilities[S] @ (c.P[S, :] @ h))


def exact_expected_return(c: ReversibleChain, start_set: Iterable[int]) -> float:
    """Expected first return time to the set, started from pi restricted to it.

    Solved as 1 + expected entry time from the one-step distribution; the
    closed form 1/pi(S) is asserted in the tests, not used here.
    """
    S = sorted(set(int(v) for v in start_set))
    if not S:
        raise PreconditionError("start set must be nonempty")
    if check_ergodic(chain_to_graph(c)) == "disconnected":
        raise NotErgodicError("expected return time needs an irreducible chain")
    U = np.array([u for u in range(c.n) if u not in set(S)], dtype=int)
    g = np.zeros(c.n)
    if U.size:
        A = np.eye(U.size) - c.P[np.ix_(U, U)]
        g[U] = np.linalg.solve(A, np.ones(U.size))
    sigma = Distribution.restriction(c.pi, S)
    return float(1.0 + sigma.probabilities[S] @ (c.P[S, :] @ g))


def exact_commute_time(
    c: ReversibleChain,
    start_set: Iterable[int],
    marked: Iterable[int],
    sigma: Distribution | None = None,
) -> float:
    """Expected steps to hit the marked set and then come back to the start set.

    Two-phase solve: expected hitting time, plus the expected entry time to
    the start set from the hitting distribution on the marked set.  Returns
    ``inf`` when either leg is unreachable.
    """
    S = sorted(set(int(v) for v in start_set))
    M = sorted(set(int(v) for v in marked))
    if set(S) & set(M):
        raise DisjointnessError(f"sets overlap on {sorted(set(S) & set(M))}")
    if sigma is None:
        sigma = Distribution.restriction(c.pi, S)
    if not set(sigma.support) <= set(S):
        raise PreconditionError("start distribution must be supported on the start set")

    t1 = exact_hitting_time(c, M, sigma)
    if math.isinf(t1):
        return math.inf

    # hitting distribution on the marked set
    U = np.array([u for u in range(c.n) if u not in set(M)], dtype=int)
    A = np.eye(U.size) - c.P[np.ix_(U, U)]
    H = np.linalg.solve(A, c.P[np.ix_(U, M)])
    mu = sigma.probabilities[U] @ H

    reach_S = _support_reachable(c.P, S)
    if np.any((mu > 0) & ~reach_S[M]):
        return math.inf
    U2 = np.array([u for u in range(c.n) if u not in set(S) and reach_S[u]], dtype=int)
    g = np.zeros(c.n)
    if U2.size:
        A2 = np.eye(U2.size) - c.P[np.ix_(U2, U2)]
        g[U2] = np.linalg.solve(A2, np.ones(U2.size))
    return float(t1 + mu @ g[M])


def stopping_stats(
    c: ReversibleChain, start_set: Iterable[int], marked: Iterable[int]
) -> StoppingStats:
    """Bundle the four exact stopping quantities for (S, M)."""
    return StoppingStats(
        hitting_time=exact_hitting_time(c, marked, Distribution.restriction(c.pi, start_set)),
        return_probability=exact_return_prob(c, start_set, marked),
        expected_return=exact_expected_return(c, start_set),
        commute_time=exact_commute_time(c, start_set, marked),
    )


# ---------------------------------------------------------------------------
# Monte Carlo


def simulate(c: ReversibleChain, sigma: Distribution, T: int, seed) -> np.ndarray:
    """One trajectory Y_0..Y_T with Y_0 ~ sigma; deterministic given the seed."""
    if T < 0:
        raise PreconditionError(f"T must be >= 0, got {T}")
    rng = as_rng(seed)
    cum = np.cumsum(c.P, axis=1)
    path = np.empty(T + 1, dtype=np.int64)
    path[0] = min(int(np.searchsorted(np.cumsum(sigma.probabilities), rng.random(), side="right")), c.n - 1)
    for t in range(T):
        u = rng.random()
        path[t + 1] = min(int(np.searchsorted(cum[path[t]], u, side="right")), c.n - 1)
    return path


def _sample_start(cum_sigma: np.ndarray, rng, trials: int, n: int) -> np.ndarray:
    states = np.searchsorted(cum_sigma, rng.random(trials), side="right")
    return np.minimum(states, n - 1).astype(np.int64)


def _step_batch(cum_rows: np.ndarray, states: np.ndarray, rng) -> np.ndarray:
    rows = cum_rows[states]
    mask = rng.random(states.shape[0])[:, None] < rows
    nxt = mask.argmax(axis=1)
    nxt[~mask.any(axis=1)] = cum_rows.shape[0] - 1
    return nxt


def simulate_batch(c: ReversibleChain, sigma: Distribution, T: int, trials: int, seed) -> np.ndarray:
    """``trials`` independent trajectories, one per row; shape (trials, T+1)."""
    rng = as_rng(seed)
    cum = np.cumsum(c.P, axis=1)
    paths = np.empty((trials, T + 1), dtype=np.int64)
    paths[:, 0] = _sample_start(np.cumsum(sigma.probabilities), rng, trials, c.n)
    for t in range(T):
        paths[:, t + 1] = _step_batch(cum, paths[:, t], rng)
    return paths


def hit_and_return_frequency(
    c: ReversibleChain,
    start_set: Iterable[int],
    marked: Iterable[int],
    p: float,
    T: int,
    trials: int = 100_000,
    seed=0,
) -> float:
    """Empirical Pr(hit the marked set, then return to the start set, within T steps).

    The walk starts from pi restricted to the start set.  The hypotheses
    2/T <= pi(S) p <= 1/C_{S,M} are verified exactly first; violating them
    raises with both sides in the message.
    """
    S = sorted(set(int(v) for v in start_set))
    M = sorted(set(int(v) for v in marked))
    if set(S) & set(M):
        raise DisjointnessError(f"sets overlap on {sorted(set(S) & set(M))}")
    g = chain_to_graph(c)
    C_SM = g.total_weight * electric.set_resistance(g, S, M)
    pi_S = float(c.pi[S].sum())
    lo, mid, hi = 2.0 / T, pi_S * p, 1.0 / C_SM
    if not (lo <= mid + 1e-12 and mid <= hi + 1e-12):
        raise PreconditionError(
            f"hypotheses fail: need 2/T = {lo!r} <= pi(S) p = {mid!r} <= 1/C_(S,M) = {hi!r}"
        )

    rng = as_rng(seed)
    sigma = Distribution.restriction(c.pi, S)
    cum = np.cumsum(c.P, axis=1)
    in_S = np.zeros(c.n, dtype=bool)
    in_S[S] = True
    in_M = np.zeros(c.n, dtype=bool)
    in_M[M] = True
    states = _sample_start(np.cumsum(sigma.probabilities), rng, trials, c.n)
    hit = np.zeros(trials, dtype=bool)
    done = np.zeros(trials, dtype=bool)
    for _ in range(T):
        states = _step_batch(cum, states, rng)
        done |= hit & in_S[states]
        hit |= in_M[states]
    return float(done.mean())


@dataclass(frozen=True)
class BaselineOutcome:
    """Result of a classical walk-and-check search run."""

    found: int | None
    checks: int
    updates: int
    steps_to_found: int | None


def classical_search_baseline(
    c: ReversibleChain,
    marked: Iterable[int],
    sigma: Distribution,
    t_between_checks: int,
    budget: int,
    seed,
) -> BaselineOutcome:
    """Walk, checking every ``t_between_checks`` steps, up to ``budget`` checks.

    ``t_between_checks = 1`` is the step-and-check baseline; setting it near
    the inverse spectral gap checks approximately independent stationary
    samples instead.
    """
    if budget < 1:
        raise PreconditionError("budget must be at least one check")
    if t_between_checks < 1:
        raise PreconditionError("check interval must be >= 1")
    marked = set(int(v) for v in marked)
    rng = as_rng(seed)
    cum = np.cumsum(c.P, axis=1)
    state = min(int(np.searchsorted(np.cumsum(sigma.probabilities), rng.random(), side="right")), c.n - 1)
    checks = updates = steps = 0
    while True:
        checks += 1
        if state in marked:
            return BaselineOutcome(found=state, checks=checks, updates=updates, steps_to_found=steps)
        if checks >= budget:
            return BaselineOutcome(found=None, checks=checks, updates=updates, steps_to_found=None)
        for _ in range(t_between_checks):
            state = min(int(np.searchsorted(cum[state], rng.random(), side="right")), c.n - 1)
        updates += t_between_checks
        steps += t_between_checks


# ---------------------------------------------------------------------------
# box sequences

_BOX_CODES = {".": 0, "S": 1, "M": 2}


@dataclass(frozen=True)
class BoxSequence:
    """Trajectory abstraction: per step, membership in S ('S'), M ('M'), or neither ('.')."""

    labels: str

    def __post_init__(self):
        if not self.labels:
            raise PreconditionError("box sequence must be nonempty")
        bad = set(self.labels) - set(_BOX_CODES)
        if bad:
            raise PreconditionError(f"unknown box labels {sorted(bad)}; use 'S', 'M', '.'")

    def codes(self) -> np.ndarray:
        return np.fromiter((_BOX_CODES[ch] for ch in self.labels), dtype=np.int8, count=len(self.labels))

    @property
    def ht(self) -> int | None:
        """Index of the first M-box, if any."""
        i = self.labels.find("M")
        return i if i >= 0 else None

    @property
    def ct(self) -> int | None:
        """Index of the first S-box after ``ht``, if any."""
        if self.ht is None:
            return None
        i = self.labels.find("S", self.ht + 1)
        return i if i >= 0 else None

    def count(self, label: str, lo: int, hi: int) -> int:
        """Number of positions in [lo, hi] carrying ``label``."""
        window = self.labels[max(lo, 0) : hi + 1]
        return window.count(label)

    def __len__(self) -> int:
        return len(self.labels)


def _integer_holding_times(params: InterpolationParams) -> tuple[int, int]:
    r_S, r_M = params.r_S, params.r_M
    if abs(r_S - round(r_S)) > 1e-9 or abs(r_M - round(r_M)) > 1e-9:
        raise PreconditionError(f"holding times must be integers, got ({r_S}, {r_M})")
    return int(round(r_S)), int(round(r_M))


def stretch_deterministic(y: BoxSequence, params: InterpolationParams) -> BoxSequence:
    """Replace each S-box by r_S copies and each M-box by r_M copies."""
    r_S, r_M = _integer_holding_times(params)
    reps = {"S": r_S, "M": r_M, ".": 1}
    return BoxSequence("".join(ch * reps[ch] for ch in y.labels))


def stretch_geometric(y: BoxSequence, params: InterpolationParams, seed) -> BoxSequence:
    """Replace each S/M-box by a Geometric(1/r) >= 1 number of copies.

    This is exactly the holding-time law of the doubly interpolated walk
    with q = 1 - 1/r, so stretched base trajectories and interpolated-walk
    trajectories share one distribution over box patterns.
    """
    if params.r_S < 1 or params.r_M < 1:
        raise PreconditionError("holding times must be >= 1")
    rng = as_rng(seed)
    pieces = []
    for ch in y.labels:
        if ch == "S":
            pieces.append("S" * int(rng.geometric(1.0 / params.r_S)))
        elif ch == "M":
            pieces.append("M" * int(rng.geometric(1.0 / params.r_M)))
        else:
            pieces.append(".")
    return BoxSequence("".join(pieces))


def stretched_count(y: BoxSequence, r_S: int, r_M: int, label: str, lo: int, hi: int) -> int:
    """Count of ``label`` positions in [lo, hi] of the deterministic stretch.

    Computed arithmetically from box lengths; never materializes the
    stretched sequence.
    """
    codes = y.codes()
    lengths = np.ones(len(codes), dtype=np.int64)
    lengths[codes == 1] = r_S
    lengths[codes == 2] = r_M
    ends = np.cumsum(lengths)
    starts = ends - lengths
    overlap = np.minimum(ends, hi + 1) - np.maximum(starts, lo)
    overlap = np.maximum(overlap, 0)
    return int(overlap[codes == _BOX_CODES[label]].sum())


def find_stretch_witness(y: BoxSequence, T: int) -> int | None:
    """A marked-holding time r_M in {1, 2, 4, ..., 2^ceil(log2(14T))} that works.

    With r_S = T/2, a witness r_M makes the stretched sequence carry at
    least T/2 M-boxes in [0, 2T] and at least T/4 S-boxes in [7T, 15T].
    Hypotheses on ``y`` (first box in S, commute index <= T, single S-box
    before the first M-box) are validated and named on failure.
    """
    if T < 2 or T % 2:
        raise PreconditionError(f"T must be a positive even integer, got {T}")
    if y.labels[0] != "S":
        raise PreconditionError("hypothesis failed: first box is not an S-box")
    ht = y.ht
    if ht is None:
        raise PreconditionError("hypothesis failed: no M-box, hitting index undefined")
    ct = y.ct
    if ct is None or ct > T:
        raise PreconditionError(f"hypothesis failed: commute index {ct} missing or exceeds T = {T}")
    if y.count("S", 0, ht) != 1:
        raise PreconditionError("hypothesis failed: more than one S-box before the first M-box")
    r_S = T // 2
    candidates = [2**j for j in range(math.ceil(math.log2(14 * T)) + 1)]
    for r_M in candidates:
        m_ok = stretched_count(y, r_S, r_M, "M", 0, 2 * T) >= T / 2
        s_ok = stretched_count(y, r_S, r_M, "S", 7 * T, 15 * T) >= T / 4
        if m_ok and s_ok:
            return r_M
    return None
