"""Electric flows, effective resistance, and the two-layer source gadget.

Effective resistance is computed by a grounded Laplacian solve, which yields
the unique optimal unit flow together with its certifying potentials.  An
independent quadratic-program minimizer over flows lives only in the test
suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DisjointnessError,
    GraphConstructionError,
    InfiniteResistanceError,
    PreconditionError,
)
from .graph_core import Distribution, WeightedGraph, build_chain

FLOW_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class UnitFlow:
    """Antisymmetric edge flow routing source mass into a sink set.

    ``absorbed_mass`` is the part of the source that already sits on the
    sinks and therefore never flows; the net flow into the sinks is
    1 - absorbed_mass (so exactly 1 for a source supported off the sinks).
    """

    flow: np.ndarray
    source: Distribution
    sinks: frozenset[int]
    graph: WeightedGraph
    absorbed_mass: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.flow, dtype=float)
        w = self.graph.weights
        if np.max(np.abs(p + p.T), initial=0.0) > FLOW_TOL:
            raise GraphConstructionError("flow is not antisymmetric")
        if np.max(np.abs(p[w == 0]), initial=0.0) > FLOW_TOL:
            raise GraphConstructionError("flow crosses an absent edge")
        sigma = self.source.probabilities
        div = p.sum(axis=1)
        interior = [u for u in range(self.graph.n) if u not in self.sinks]
        err = np.max(np.abs(div[interior] - sigma[interior]), initial=0.0)
        if err > FLOW_TOL:
            raise GraphConstructionError(f"flow conservation fails by {err:.3e}")
        into_sinks = sum(p[u, v] for u in self.sinks for v in interior)
        if abs(into_sinks + (1.0 - self.absorbed_mass)) > FLOW_TOL:
            raise GraphConstructionError(
                f"net flow into sinks is {-into_sinks!r}, expected {1.0 - self.absorbed_mass!r}"
            )
        pp = np.array(p)
        pp.flags.writeable = False
        object.__setattr__(self, "flow", pp)

    def energy(self) -> float:
        """Dissipated power sum_{u<v} p_{u,v}^2 / w_{u,v}."""
        w = self.graph.weights
        iu = np.triu_indices(self.graph.n, k=1)
        mask = w[iu] > 0
        return float(np.sum(self.flow[iu][mask] ** 2 / w[iu][mask]))


@dataclass(frozen=True, eq=False)
class ModifiedInstance:
    """Two-layer gadget pinning the start distribution to the stationary one.

    Layer 0 holds a copy of the original graph; each support vertex u of the
    start distribution gains a pendant layer-1 twin attached by an edge of
    weight sigma_u * W / C.  The start mass moves to the twins, the marked
    set stays on layer 0, and the twins' stationary mass is exactly
    1 / (C + 2).
    """

    graph: WeightedGraph
    sigma_prime: Distribution
    marked_prime: frozenset[int]
    C: float
    base_size: int
    support: tuple[int, ...]

    @property
    def start_support(self) -> tuple[int, ...]:
        """Layer-1 vertex indices (the support of sigma_prime)."""
        return tuple(range(self.base_size, self.base_size + len(self.support)))


def _reachable_from(adj: np.ndarray, seeds: Iterable[int]) -> np.ndarray:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [int(s) for s in seeds]
    seen[stack] = True
    while stack:
        u = stack.pop()
        for v in np.nonzero(adj[u])[0]:
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return seen


def effective_resistance(
    g: WeightedGraph,
    sigma: Distribution,
    marked: Iterable[int],
    *,
    on_marked: str = "reject",
) -> tuple[float, UnitFlow]:
    """Effective resistance from ``sigma`` to ``marked`` with its optimal flow.

    Grounds the marked set, solves the restricted Laplacian system
    L phi = sigma, and reads off the unique minimizing flow
    p_{u,v} = (phi_u - phi_v) w_{u,v}; the resistance equals sigma . phi.

    ``on_marked`` controls source mass sitting on the sinks: ``"reject"``
    (default) raises; ``"absorb"`` drops that mass as already arrived, which
    is the convention under which W R from the stationary distribution equals
    the hitting time.
    """
    M = frozenset(int(v) for v in marked)
    if not M:
        raise PreconditionError("marked set must be nonempty")
    if not M < set(range(g.n)):
        raise PreconditionError("marked set must be a proper subset of the vertices")
    if sigma.n != g.n:
        raise PreconditionError("distribution size does not match the graph")
    source = np.array(sigma.probabilities)
    m_idx = sorted(M)
    absorbed = float(source[m_idx].sum())
    if absorbed > 0:
        if on_marked == "reject":
            raise DisjointnessError(
                f"source has mass {absorbed!r} on marked vertices; must be supported off them"
            )
        if on_marked != "absorb":
            raise PreconditionError(f"unknown on_marked mode {on_marked!r}")
        source[m_idx] = 0.0

    adj = g.adjacency()
    reach = _reachable_from(adj, M)
    bad = np.nonzero((~reach) & (source > 0))[0]
    if bad.size:
        raise InfiniteResistanceError(
            f"vertex {int(bad[0])} carries source mass but cannot reach the marked set"
        )

    interior = np.array([u for u in range(g.n) if u not in M and reach[u]], dtype=int)
    phi = np.zeros(g.n)
    if interior.size:
        L = g.laplacian()
        phi[interior] = np.linalg.solve(L[np.ix_(interior, interior)], source[interior])
    p = (phi[:, None] - phi[None, :]) * g.weights
    resistance = float(source @ phi)
    flow = UnitFlow(p, sigma, M, g, absorbed_mass=absorbed)
    return resistance, flow


def commute_quantity(
    g: WeightedGraph,
    sigma: Distribution,
    marked: Iterable[int],
    *,
    on_marked: str = "reject",
) -> float:
    """W * R_{sigma,M}: total weight times effective resistance."""
    r, _ = effective_resistance(g, sigma, marked, on_marked=on_marked)
    return g.total_weight * r


def contract_set(g: WeightedGraph, subset: Iterable[int]) -> WeightedGraph:
    """Merge ``subset`` into a single supervertex (index 0 of the result).

    Internal weights fold into a self-loop so the total weight is unchanged;
    remaining vertices keep their relative order at indices 1, 2, ....
    """
    S = sorted(set(int(v) for v in subset))
    if not S:
        raise PreconditionError("cannot contract the empty set")
    if len(S) >= g.n:
        raise PreconditionError("cannot contract the whole vertex set")
    rest = [v for v in range(g.n) if v not in set(S)]
    k = len(rest) + 1
    w = np.zeros((k, k))
    w[0, 0] = g.weights[np.ix_(S, S)].sum()
    w[0, 1:] = g.weights[np.ix_(S, rest)].sum(axis=0)
    w[1:, 0] = w[0, 1:]
    w[1:, 1:] = g.weights[np.ix_(rest, rest)]
    return WeightedGraph(w, vertex_cap=g.vertex_cap)


def contracted_index(g: WeightedGraph, subset: Iterable[int], vertex: int) -> int:
    """Index of an uncontracted ``vertex`` inside ``contract_set(g, subset)``."""
    S = set(int(v) for v in subset)
    if vertex in S:
        return 0
    return 1 + sum(1 for v in range(vertex) if v not in S)


def set_resistance(g: WeightedGraph, subset: Iterable[int], marked: Iterable[int]) -> float:
    """R_{S,M}: minimum of R_{rho,M} over start distributions on ``subset``.

    Realized by contracting ``subset`` to a single vertex and measuring the
    point-mass resistance from it, which attains the minimum.
    """
    S = frozenset(int(v) for v in subset)
    M = frozenset(int(v) for v in marked)
    if not S or not M:
        raise PreconditionError("both vertex sets must be nonempty")
    if S & M:
        raise DisjointnessError(f"sets overlap on vertices {sorted(S & M)}")
    cg = contract_set(g, S)
    m_new = [contracted_index(g, S, m) for m in sorted(M)]
    r, _ = effective_resistance(cg, Distribution.point_mass(cg.n, 0), m_new)
    return r


def build_modified_graph(
    g: WeightedGraph,
    sigma: Distribution,
    marked: Iterable[int],
    C: float,
) -> ModifiedInstance:
    """Attach a pendant twin of weight sigma_u W / C to each support vertex.

    ``C`` is the resistance budget; the twins' stationary mass comes out to
    exactly 1/(C+2) and the commute quantity from the relocated start obeys
    C' = (C_{sigma,M}/C + 1)(C + 2).
    """
    if C <= 0:
        raise PreconditionError(f"budget C must be positive, got {C}")
    if sigma.n != g.n:
        raise PreconditionError("distribution size does not match the graph")
    M = frozenset(int(v) for v in marked)
    if not M <= set(range(g.n)):
        raise PreconditionError("marked set out of range")
    support = sigma.support
    n, k = g.n, len(support)
    W = g.total_weight
    w = np.zeros((n + k, n + k))
    w[:n, :n] = g.weights
    for j, u in enumerate(support):
        w[u, n + j] = w[n + j, u] = sigma.probabilities[u] * W / C
    graph = WeightedGraph(w, vertex_cap=max(g.vertex_cap, n + k))

    sp = np.zeros(n + k)
    sp[n:] = sigma.probabilities[list(support)]
    sigma_prime = Distribution(sp)

    pi_prime = build_chain(graph).pi
    twin_mass = float(pi_prime[n:].sum())
    assert abs(twin_mass - 1.0 / (C + 2.0)) < 1e-12, "pendant layer mass off its closed form"

    return ModifiedInstance(
        graph=graph,
        sigma_prime=sigma_prime,
        marked_prime=M,
        C=float(C),
        base_size=n,
        support=support,
    )


def lift_to_layers(inst: ModifiedInstance, rho: Distribution) -> Distribution:
    """Move a distribution on the original support onto the layer-1 twins."""
    if rho.n != inst.base_size:
        raise PreconditionError("distribution size does not match the base graph")
    if not set(rho.support) <= set(inst.support):
        raise PreconditionError("distribution must be supported on the gadget support")
    p = np.zeros(inst.graph.n)
    for j, u in enumerate(inst.support):
        p[inst.base_size + j] = rho.probabilities[u]
    return Distribution(p)
