"""Built-in problem instances and seeded random generators for the suites."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import as_rng
from .graph_core import Distribution, WeightedGraph, build_chain, check_ergodic


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A graph with a start distribution, its support, and a marked set."""

    name: str
    graph: WeightedGraph
    sigma: Distribution
    start_set: tuple[int, ...]
    marked: frozenset[int]

    @property
    def chain(self):
        return build_chain(self.graph)


def _path_weights(n: int) -> np.ndarray:
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = 1.0
    return w


def path_three() -> ProblemInstance:
    """Three-vertex unit path; start on the stationary restriction to {0, 1}.

    The worked example where the electric bound strictly exceeds the
    set-commute time: R = 10/9, W R = 40/9, escape probability 1/3,
    commute time 13/3.
    """
    g = WeightedGraph(_path_weights(3))
    sigma = Distribution(np.array([1.0 / 3.0, 2.0 / 3.0, 0.0]))
    return ProblemInstance("path3", g, sigma, (0, 1), frozenset({2}))


def path_endpoints(n: int = 8) -> ProblemInstance:
    """Unit path with a point-mass start at one end and the other end marked."""
    g = WeightedGraph(_path_weights(n))
    return ProblemInstance(
        f"path{n}", g, Distribution.point_mass(n, 0), (0,), frozenset({n - 1})
    )


def cycle_with_loops(n: int = 5) -> ProblemInstance:
    """n-cycle with unit self-loops; point-mass start, antipodal-ish mark."""
    w = np.zeros((n, n))
    for i in range(n):
        w[i, (i + 1) % n] += 1.0
        w[(i + 1) % n, i] += 1.0
        w[i, i] = 1.0
    g = WeightedGraph(w)
    return ProblemInstance(
        f"cycle{n}+loops", g, Distribution.point_mass(n, 0), (0,), frozenset({n // 2})
    )


def complete_with_loops(n: int = 5) -> ProblemInstance:
    """Complete graph with unit self-loops; one marked vertex, point start."""
    w = np.ones((n, n))
    g = WeightedGraph(w)
    return ProblemInstance(
        f"K{n}+loops", g, Distribution.point_mass(n, 0), (0,), frozenset({n - 1})
    )


def two_cliques_bridge(half: int = 8) -> ProblemInstance:
    """Two cliques joined by one edge; start in one clique, mark in the other."""
    n = 2 * half
    w = np.zeros((n, n))
    w[:half, :half] = 1.0
    w[half:, half:] = 1.0
    np.fill_diagonal(w, 0.0)
    w[half - 1, half] = w[half, half - 1] = 1.0
    g = WeightedGraph(w)
    return ProblemInstance(
        f"cliques{half}+{half}", g, Distribution.point_mass(n, 0), (0,), frozenset({n - 1})
    )


def suite_instances() -> tuple[ProblemInstance, ...]:
    """The five standing test graphs (all with at most 16 vertices)."""
    return (
        path_three(),
        path_endpoints(8),
        cycle_with_loops(5),
        complete_with_loops(5),
        two_cliques_bridge(8),
    )


def random_connected_graph(n: int, seed, *, extra_edges: int | None = None,
                           ensure_nonbipartite: bool = True) -> WeightedGraph:
    """Random spanning tree plus extra weighted edges; connected by construction."""
    rng = as_rng(seed)
    w = np.zeros((n, n))
    order = rng.permutation(n)
    for i in range(1, n):
        u = int(order[i])
        v = int(order[rng.integers(0, i)])
        w[u, v] = w[v, u] = rng.uniform(0.5, 2.0)
    if extra_edges is None:
        extra_edges = n
    for _ in range(extra_edges):
        u, v = rng.integers(0, n, size=2)
        if u != v:
            weight = rng.uniform(0.5, 2.0)
            w[u, v] = w[v, u] = weight
    g = WeightedGraph(w, vertex_cap=max(64, n))
    if ensure_nonbipartite and check_ergodic(g) == "bipartite":
        u = int(rng.integers(0, n))
        w = np.array(g.weights)
        w[u, u] = rng.uniform(0.5, 2.0)
        g = WeightedGraph(w, vertex_cap=max(64, n))
    return g


def random_instance(n: int, seed, *, start_size: int = 1, marked_size: int = 1) -> ProblemInstance:
    """Random connected graph with disjoint random start and marked sets."""
    rng = as_rng(seed)
    g = random_connected_graph(n, rng)
    vertices = rng.permutation(n)
    start = tuple(int(v) for v in vertices[:start_size])
    marked = frozenset(int(v) for v in vertices[start_size : start_size + marked_size])
    pi = build_chain(g).pi
    sigma = Distribution.restriction(pi, start)
    return ProblemInstance(f"random{n}-{seed}", g, sigma, start, marked)
