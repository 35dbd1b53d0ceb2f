"""Explicit walk unitaries, block-encoding checks, and a state-vector engine.

Unitaries are dense matrices over an ancilla (x) system tensor space; the
flagged ancilla basis state singles out the block that must reproduce the
symmetric form of the walk.  All compositions below are assembled literally
from their factor circuits so the advertised call counts are real.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    NotReversibleError,
    PreconditionError,
    SizeLimitError,
    StateIntegrityError,
)
from .graph_core import Distribution, ReversibleChain

UNITARY_TOL = 1e-10
#: Default cap on the dimension of pair-space unitaries (n^2 <= this).
PAIR_DIM_CAP = 4096


# ---------------------------------------------------------------------------
# tensor plumbing


def lift(op: np.ndarray, dims: tuple[int, ...], positions: tuple[int, ...]) -> np.ndarray:
    """Embed ``op`` acting on the tensor factors ``positions`` into the full space.

    ``positions`` lists the factors in the order ``op``'s own tensor
    structure uses them; all other factors get the identity.
    """
    k = len(dims)
    rest = [i for i in range(k) if i not in positions]
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    order = list(positions) + rest
    perm = np.argsort(order)
    shaped = full.reshape([dims[i] for i in order] * 2)
    shaped = shaped.transpose(list(perm) + [k + int(p) for p in perm])
    d = int(np.prod(dims))
    return np.ascontiguousarray(shaped.reshape(d, d))


def controlled(
    op_lifted: np.ndarray, projector_lifted: np.ndarray
) -> np.ndarray:
    """Apply ``op`` exactly on the range of the (commuting) projector."""
    d = op_lifted.shape[0]
    return op_lifted @ projector_lifted + (np.eye(d) - projector_lifted)


def complete_orthonormal(columns: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Extend orthonormal columns to a full orthonormal basis.

    Deterministic ordered sweep over the standard basis with one
    re-orthogonalization pass, so repeated runs build identical unitaries.
    """
    d = columns.shape[0]
    Q = np.array(columns, dtype=float)
    for i in range(d):
        if Q.shape[1] == d:
            break
        e = np.zeros(d)
        e[i] = 1.0
        r = e - Q @ (Q.T @ e)
        if np.linalg.norm(r) > tol:
            r = r - Q @ (Q.T @ r)
            r /= np.linalg.norm(r)
            Q = np.hstack([Q, r[:, None]])
    if Q.shape[1] != d:
        raise PreconditionError("orthonormal completion failed; input columns degenerate")
    return Q


# ---------------------------------------------------------------------------
# core types


@dataclass(frozen=True, eq=False)
class DiscriminantMatrix:
    """Symmetric form of a reversible chain with a cached eigendecomposition."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    pi: np.ndarray

    def power_apply(self, t: int, psi: np.ndarray) -> np.ndarray:
        """Exact D^t psi through the eigendecomposition."""
        if t == 0:
            return np.array(psi, dtype=float)
        V, lam = self.eigenvectors, self.eigenvalues
        return V @ (lam**t * (V.T @ psi))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class BlockUnitary:
    """Unitary over ancilla (x) system whose flagged block encodes a target.

    ``flag`` indexes the distinguished ancilla basis state; the encoded
    operator is the (flag, flag) block of the matrix reshaped over
    (ancilla, system, ancilla, system).
    """

    matrix: np.ndarray
    ancilla_dim: int
    system_dim: int
    flag: int = 0
    counters: Mapping[str, int] | None = None

    def __post_init__(self):
        d = self.ancilla_dim * self.system_dim
        U = np.asarray(self.matrix)
        if U.shape != (d, d):
            raise PreconditionError(f"matrix shape {U.shape} does not match dims {d}x{d}")
        err = np.max(np.abs(U.conj().T @ U - np.eye(d)))
        if err > UNITARY_TOL:
            raise PreconditionError(f"matrix is not unitary, residual {err:.3e}")
        if not (0 <= self.flag < self.ancilla_dim):
            raise PreconditionError("flag outside the ancilla range")

    @property
    def dim(self) -> int:
        return self.ancilla_dim * self.system_dim

    def block(self) -> np.ndarray:
        shaped = self.matrix.reshape(
            self.ancilla_dim, self.system_dim, self.ancilla_dim, self.system_dim
        )
        return np.ascontiguousarray(shaped[self.flag, :, self.flag, :])

    def dagger(self) -> "BlockUnitary":
        return BlockUnitary(
            self.matrix.conj().T, self.ancilla_dim, self.system_dim, self.flag, self.counters
        )


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Unit vector over ancilla (x) system."""

    amplitudes: np.ndarray
    ancilla_dim: int
    system_dim: int

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.shape != (self.ancilla_dim * self.system_dim,):
            raise PreconditionError("amplitude vector does not match the declared dims")
        if abs(np.linalg.norm(v) - 1.0) > UNITARY_TOL:
            raise StateIntegrityError(f"state norm is {np.linalg.norm(v)!r}, not 1")
        object.__setattr__(self, "amplitudes", v)


def sqrt_state(sigma: Distribution, ancilla_dim: int = 1, flag: int = 0) -> QuantumState:
    """|flag> (x) sum_u sqrt(sigma_u) |u>."""
    n = sigma.n
    amp = np.zeros(ancilla_dim * n, dtype=complex)
    amp[flag * n : (flag + 1) * n] = np.sqrt(sigma.probabilities)
    return QuantumState(amp, ancilla_dim, n)


def apply_unitary(u: BlockUnitary, state: QuantumState) -> QuantumState:
    """Exact matrix-vector product; guards against norm drift."""
    if state.ancilla_dim * state.system_dim != u.dim:
        raise PreconditionError("state and unitary dimensions differ")
    out = u.matrix @ state.amplitudes
    drift = abs(np.linalg.norm(out) - 1.0)
    if drift > 1e-8:
        raise StateIntegrityError(f"norm drifted by {drift:.3e} under application")
    return QuantumState(out / np.linalg.norm(out), state.ancilla_dim, state.system_dim)


def measure_vertex(state: QuantumState, subset: Iterable[int], flag: int | None = None) -> float:
    """Probability that measuring the system register lands in ``subset``.

    With ``flag`` given, additionally projects the ancilla onto that basis
    state; with ``flag=None`` the ancilla is summed out (a plain marginal).
    """
    idx = sorted(set(int(v) for v in subset))
    shaped = state.amplitudes.reshape(state.ancilla_dim, state.system_dim)
    if flag is None:
        return float(np.sum(np.abs(shaped[:, idx]) ** 2))
    return float(np.sum(np.abs(shaped[flag, idx]) ** 2))


# ---------------------------------------------------------------------------
# discriminant and walk constructions


def discriminant(c: ReversibleChain) -> DiscriminantMatrix:
    """Symmetric matrix sharing the chain's spectrum; validated both ways.

    The entrywise form sqrt(P o P^T) and the similarity form
    diag(sqrt(pi)) P diag(sqrt(pi))^{-1} must agree to 1e-12, which is
    exactly reversibility; disagreement raises.
    """
    entrywise = np.sqrt(c.P * c.P.T)
    s = np.sqrt(c.pi)
    conjugated = s[:, None] * c.P / s[None, :]
    err = np.max(np.abs(entrywise - conjugated))
    if err > 1e-12:
        raise NotReversibleError(f"the two symmetric forms disagree by {err:.3e}")
    D = (entrywise + entrywise.T) / 2.0
    lam, V = np.linalg.eigh(D)
    if lam[0] < -1.0 - 1e-10 or lam[-1] > 1.0 + 1e-10:
        raise NotReversibleError("spectrum escapes [-1, 1]")
    return DiscriminantMatrix(matrix=D, eigenvalues=lam, eigenvectors=V, pi=np.array(c.pi))


def szegedy_walk(c: ReversibleChain, *, pair_dim_cap: int = PAIR_DIM_CAP) -> BlockUnitary:
    """Walk unitary on the n^2 pair space whose flagged block is the symmetric form.

    The sampling isometry maps |0>|u> to (sum_v sqrt(P_uv) |v>) |u>; its
    free columns are completed per second-register block by a deterministic
    basis sweep, then composed with the pair swap.
    """
    n = c.n
    if n * n > pair_dim_cap:
        raise SizeLimitError(f"pair space dimension {n * n} exceeds cap {pair_dim_cap}")
    V = np.zeros((n * n, n * n))
    for u in range(n):
        first = np.sqrt(c.P[u])[:, None]
        block = complete_orthonormal(first)
        idx = np.arange(n) * n + u
        V[np.ix_(idx, idx)] = block
    pairs = np.arange(n * n)
    first, second = divmod(pairs, n)
    shift = np.zeros((n * n, n * n))
    shift[second * n + first, pairs] = 1.0
    W = V.T @ shift @ V
    return BlockUnitary(W, ancilla_dim=n, system_dim=n, flag=0, counters={"walk": 1})


def verify_block_encoding(u: BlockUnitary, target: np.ndarray, eps: float) -> float:
    """Spectral-norm deviation between the flagged block and ``target``.

    Returns the deviation; the caller compares against ``eps`` (a
    convenience boolean is ``verify_block_encoding(...) <= eps``).
    """
    dev = np.linalg.norm(u.block() - np.asarray(target), 2)
    return float(dev)


def _check_matrix(n: int, members: Iterable[int]) -> np.ndarray:
    """Qubit-(x)-system unitary flipping the qubit on member vertices."""
    members = set(int(v) for v in members)
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    I2 = np.eye(2)
    C = np.zeros((2 * n, 2 * n))
    for x in range(n):
        gate = X if x in members else I2
        C[x::n, x::n] = gate
    return C


def interpolated_walk_unitary(
    w: BlockUnitary, members: Iterable[int], s: float
) -> BlockUnitary:
    """Walk unitary for the chain interpolated toward absorption on ``members``.

    One extra control qubit; the circuit uses exactly one controlled
    application of ``w`` and two applications of the membership reflection,
    plus four single-qubit gates.  The flagged block equals the symmetric
    form of the interpolated chain.
    """
    if not (0.0 <= s < 1.0):
        raise PreconditionError(f"s must lie in [0, 1), got {s}")
    n = w.system_dim
    a = w.ancilla_dim
    dims = (2, a, n)
    theta = np.arccos(np.sqrt(s)) / 2.0
    V2 = np.array([[np.cos(theta), np.sin(theta)], [np.sin(theta), -np.cos(theta)]])
    Y2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

    check = lift(_check_matrix(n, members), dims, (0, 2))
    p1 = lift(np.diag([0.0, 1.0]), dims, (0,))
    cW = controlled(lift(w.matrix, dims, (1, 2)), p1)
    # entry map: unmarked vertices route to the walk branch, marked ones
    # split sqrt(s)|hold> + sqrt(1-s)|walk>; exit map inverts the routing
    entry = lift(-(Y2 @ V2), dims, (0,)) @ check @ lift(V2, dims, (0,))
    exit_ = lift(V2, dims, (0,)) @ check @ lift(V2 @ Y2, dims, (0,))
    O = exit_ @ cW @ entry
    return BlockUnitary(
        O,
        ancilla_dim=2 * a,
        system_dim=n,
        flag=w.flag,
        counters={"walk": 1, "check": 2},
    )


def lambda_unitary(sigma: Distribution, pi: np.ndarray, C: float) -> BlockUnitary:
    """Per-vertex rotation splitting |0>|u> by the ratio of pi_u to sigma_u/C.

    Maps |0>|u> to (sqrt(pi_u)|0> + sqrt(sigma_u/C)|1>) |u> normalized; the
    orthogonal completion on |1>|u> is fixed deterministically.
    """
    pi = np.asarray(pi, dtype=float)
    n = sigma.n
    if C <= 0:
        raise PreconditionError(f"C must be positive, got {C}")
    norms = pi + sigma.probabilities / C
    if np.any(norms <= 0):
        u = int(np.argmin(norms))
        raise PreconditionError(f"vertex {u} dangles: pi_u + sigma_u/C = 0")
    lam = np.zeros((2 * n, 2 * n))
    for u in range(n):
        a = np.sqrt(pi[u] / norms[u])
        b = np.sqrt(sigma.probabilities[u] / (C * norms[u]))
        lam[u::n, u::n] = np.array([[a, b], [b, -a]])
    return BlockUnitary(lam, ancilla_dim=2, system_dim=n, flag=0)


def modified_walk_unitary(w: BlockUnitary, lam: BlockUnitary) -> BlockUnitary:
    """Walk unitary for the two-layer gadget, built from the base walk and the splitter.

    Registers: the splitter's flag qubit a, the base walk ancilla, a layer
    qubit b, and the vertex register.  The base walk runs conditioned on
    a = b = 0; the splitter runs conditioned on b = 0 with a as its output,
    sandwiching a swap of a and b.  The flagged block is the symmetric form
    of the gadget chain, embedded two-block style in the doubled register.
    """
    n = w.system_dim
    if lam.system_dim != n or lam.ancilla_dim != 2:
        raise PreconditionError("splitter dimensions do not match the walk")
    dims = (2, w.ancilla_dim, 2, n)
    p0 = np.diag([1.0, 0.0])
    pb0 = lift(p0, dims, (2,))
    pa0b0 = lift(p0, dims, (0,)) @ pb0
    c_lam = controlled(lift(lam.matrix, dims, (0, 3)), pb0)
    c_walk = controlled(lift(w.matrix, dims, (1, 3)), pa0b0)
    swap = np.eye(4)[[0, 2, 1, 3]]
    right = lift(swap, dims, (0, 2)) @ c_lam
    out = c_lam.conj().T @ c_walk @ right
    return BlockUnitary(
        out,
        ancilla_dim=2 * w.ancilla_dim,
        system_dim=2 * n,
        flag=w.flag,
        counters={"walk": 1, "splitter": 2},
    )


def embed_modified_discriminant(d: DiscriminantMatrix, base_size: int, support: tuple[int, ...]) -> np.ndarray:
    """Embed a gadget-chain symmetric form into the (layer qubit (x) base) register.

    Gadget vertex u < base_size maps to index u (layer 0); the j-th twin
    maps to base_size + support[j] (layer 1).  Rows and columns of absent
    layer-1 vertices stay zero.
    """
    n = base_size
    idx = list(range(n)) + [n + u for u in support]
    out = np.zeros((2 * n, 2 * n))
    out[np.ix_(idx, idx)] = d.matrix
    return out
