"""Weighted graphs, reversible Markov chains, and their spectral basics.

Everything downstream consumes these three types.  All matrices are dense:
the intended scale is tens of vertices, where every identity can be checked
against an exact solver.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import (
    DegenerateChainWarning,
    GraphConstructionError,
    NotErgodicError,
    NotReversibleError,
    PreconditionError,
)

#: Tolerance for purely algebraic identities (row sums, detailed balance, ...).
ALGEBRAIC_TOL = 1e-12
#: Tolerance for identities that pass through an eigendecomposition.
SPECTRAL_TOL = 1e-10
#: Default cap on the number of vertices; dense matrices only.
DEFAULT_VERTEX_CAP = 64

Ergodicity = Literal["ergodic", "disconnected", "bipartite"]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric nonnegative edge weights over vertices 0..n-1.

    Weights act as conductances; a zero weight means the edge is absent.
    Self-loops are permitted and counted once in both the vertex weight
    ``w_u`` and the total weight ``W``.
    """

    weights: np.ndarray
    vertex_cap: int = DEFAULT_VERTEX_CAP

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise GraphConstructionError(f"weights must be square, got shape {w.shape}")
        n = w.shape[0]
        if n > self.vertex_cap:
            raise GraphConstructionError(
                f"{n} vertices exceeds the cap of {self.vertex_cap}; pass vertex_cap= to raise it"
            )
        if np.any(w < 0):
            u, v = np.argwhere(w < 0)[0]
            raise GraphConstructionError(f"negative weight on edge ({u}, {v})")
        if np.max(np.abs(w - w.T), initial=0.0) > ALGEBRAIC_TOL:
            u, v = np.argwhere(np.abs(w - w.T) > ALGEBRAIC_TOL)[0]
            raise GraphConstructionError(f"asymmetric weights on edge ({u}, {v})")
        w = (w + w.T) / 2.0
        degrees = w.sum(axis=1)
        if np.any(degrees <= 0):
            u = int(np.argmin(degrees))
            raise GraphConstructionError(f"vertex {u} is isolated (zero total weight)")
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def vertex_weights(self) -> np.ndarray:
        """w_u = sum_v w_{u,v}."""
        return self.weights.sum(axis=1)

    @property
    def total_weight(self) -> float:
        """W = sum_{u,v} w_{u,v}."""
        return float(self.weights.sum())

    def laplacian(self) -> np.ndarray:
        """L = diag(w_u) - weights; self-loops cancel out of L."""
        return np.diag(self.vertex_weights) - self.weights

    def adjacency(self) -> np.ndarray:
        return self.weights > 0


@dataclass(frozen=True, eq=False)
class ReversibleChain:
    """Row-stochastic transition matrix with its stationary distribution.

    Construction validates row sums, positivity of ``pi``, detailed balance
    pi_u P_{u,v} = pi_v P_{v,u}, and stationarity pi P = pi, all to
    ``ALGEBRAIC_TOL``.
    """

    P: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        n = P.shape[0]
        if P.ndim != 2 or P.shape != (n, n) or pi.shape != (n,):
            raise NotReversibleError(f"shape mismatch: P {P.shape}, pi {pi.shape}")
        if np.any(P < -ALGEBRAIC_TOL):
            raise NotReversibleError("negative transition probability")
        row_err = np.max(np.abs(P.sum(axis=1) - 1.0))
        if row_err > ALGEBRAIC_TOL:
            raise NotReversibleError(f"row sums deviate from 1 by {row_err:.3e}")
        if np.any(pi <= 0):
            raise NotReversibleError("stationary distribution must be strictly positive")
        if abs(pi.sum() - 1.0) > ALGEBRAIC_TOL:
            raise NotReversibleError(f"pi sums to {pi.sum()!r}, not 1")
        flow = pi[:, None] * P
        balance_err = np.max(np.abs(flow - flow.T))
        if balance_err > ALGEBRAIC_TOL:
            raise NotReversibleError(f"detailed balance fails, max residual {balance_err:.3e}")
        stat_err = np.max(np.abs(pi @ P - pi))
        if stat_err > ALGEBRAIC_TOL:
            raise NotReversibleError(f"pi P != pi, max residual {stat_err:.3e}")
        object.__setattr__(self, "P", _readonly(P))
        object.__setattr__(self, "pi", _readonly(pi))

    @property
    def n(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over vertices 0..n-1."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1:
            raise GraphConstructionError("a distribution is a 1-d vector")
        if np.any(p < 0):
            raise GraphConstructionError("distribution entries must be nonnegative")
        if abs(p.sum() - 1.0) > ALGEBRAIC_TOL:
            raise GraphConstructionError(f"distribution sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "probabilities", _readonly(p))

    @property
    def n(self) -> int:
        return self.probabilities.shape[0]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.probabilities > 0)[0])

    @classmethod
    def point_mass(cls, n: int, vertex: int) -> "Distribution":
        p = np.zeros(n)
        p[vertex] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def restriction(cls, weights: np.ndarray, subset: Iterable[int]) -> "Distribution":
        """Normalized restriction of a nonnegative vector to ``subset``."""
        weights = np.asarray(weights, dtype=float)
        p = np.zeros_like(weights)
        idx = sorted(set(int(v) for v in subset))
        p[idx] = weights[idx]
        total = p.sum()
        if total <= 0:
            raise GraphConstructionError("restriction has zero mass")
        return cls(p / total)


def build_chain(g: WeightedGraph) -> ReversibleChain:
    """Random walk on ``g``: P_{u,v} = w_{u,v}/w_u with pi_u = w_u/W."""
    w_u = g.vertex_weights
    P = g.weights / w_u[:, None]
    pi = w_u / g.total_weight
    return ReversibleChain(P, pi)


def chain_to_graph(c: ReversibleChain) -> WeightedGraph:
    """Weighted graph realizing a reversible chain; total weight is always 2.

    Uses w_{u,v} = w_{v,u} = 2 pi_u P_{u,v}.  ``build_chain`` of the result
    reproduces ``c`` exactly (up to float round-off).
    """
    w = 2.0 * c.pi[:, None] * c.P
    return WeightedGraph((w + w.T) / 2.0, vertex_cap=max(DEFAULT_VERTEX_CAP, c.n))


def check_ergodic(g: WeightedGraph) -> Ergodicity:
    """Structural verdict: connected and non-bipartite, else why not.

    Connectivity is breadth-first search; bipartiteness is a two-coloring.
    A self-loop or any odd cycle breaks bipartiteness.  Disconnection is
    reported before bipartiteness.
    """
    adj = g.adjacency()
    n = g.n
    color = np.full(n, -1, dtype=int)
    color[0] = 0
    queue = [0]
    odd_cycle = bool(np.any(np.diag(g.weights) > 0))
    while queue:
        u = queue.pop()
        for v in np.nonzero(adj[u])[0]:
            if v == u:
                continue
            if color[v] == -1:
                color[v] = 1 - color[u]
                queue.append(int(v))
            elif color[v] == color[u]:
                odd_cycle = True
    if np.any(color == -1):
        return "disconnected"
    return "ergodic" if odd_cycle else "bipartite"


def symmetric_form(c: ReversibleChain) -> np.ndarray:
    """diag(sqrt(pi)) P diag(sqrt(pi))^{-1}: symmetric, same spectrum as P."""
    s = np.sqrt(c.pi)
    D = s[:, None] * c.P / s[None, :]
    return (D + D.T) / 2.0


def spectral_gap(c: ReversibleChain) -> float:
    """delta = min(1 - |lambda_1|, 1 - |lambda_{n-1}|), from the symmetric form.

    Raises ``NotErgodicError`` on a disconnected or bipartite chain; that is
    decided structurally on the underlying graph rather than by inspecting
    eigenvalues near -1.
    """
    verdict = check_ergodic(chain_to_graph(c))
    if verdict != "ergodic":
        raise NotErgodicError(f"spectral gap undefined: chain is {verdict}")
    if c.n == 1:
        return 1.0
    evals = np.linalg.eigvalsh(symmetric_form(c))
    return float(1.0 - np.max(np.abs(evals[:-1])))


def chain_power(c: ReversibleChain, t: int) -> ReversibleChain:
    """The t-step chain P^t, sharing pi; reversibility is preserved.

    t = 0 returns the identity chain and emits ``DegenerateChainWarning``
    (a walk that never moves).
    """
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    if t == 0:
        warnings.warn(
            "t = 0 yields the identity chain, which never moves",
            DegenerateChainWarning,
            stacklevel=2,
        )
        return ReversibleChain(np.eye(c.n), c.pi)
    if t == 1:
        return c
    return ReversibleChain(np.linalg.matrix_power(c.P, t), c.pi)
