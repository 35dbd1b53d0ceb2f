"""Quantum fast-forwarding: walk powers in ~sqrt(t) walk applications.

The construction is literal: a truncated binomial-Chebyshev expansion of
x^t, a ladder of controlled reflection products realizing even Chebyshev
polynomials of the walk block, and a linear combination of those sectors
driven by a preparation unitary.  Odd powers route one extra plain walk
application through the same ladder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as ncheb

from .errors import DomainError, PreconditionError, SizeLimitError
from .quantum_core import BlockUnitary, DiscriminantMatrix, complete_orthonormal, lift

LADDER_DIM_CAP = 16384


def truncation_degree(t: int, eps: float) -> int:
    """Smallest admissible even truncation degree for approximating x^t.

    Chernoff tail bound: degree ceil(sqrt(2 t ln(2/eps))) suffices for a
    sup-norm error of ``eps`` on [-1, 1]; the value is rounded up to even
    and capped at the largest useful degree (t, parity-adjusted), where the
    expansion is exact.
    """
    if t < 1:
        raise PreconditionError(f"t must be >= 1, got {t}")
    if not (0.0 < eps < 1.0):
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    d = math.ceil(math.sqrt(2.0 * t * math.log(2.0 / eps)))
    d += d % 2
    t_even = t - (t % 2)
    return min(d, t_even)


def _log_binom(t: int, k: np.ndarray) -> np.ndarray:
    return (
        math.lgamma(t + 1)
        - np.vectorize(math.lgamma)(k + 1.0)
        - np.vectorize(math.lgamma)(t - k + 1.0)
    )


@dataclass(frozen=True, eq=False)
class ChebyshevExpansion:
    """Truncated even expansion of x^t with binomial weights.

    ``weights[i]`` is the weight of the Chebyshev term of degree 2 (i - d/2),
    i.e. 2^{-te} binom(te, te/2 + n) for n = i - d/2, where te is t rounded
    down to even.  ``alpha`` = sum of weights lies in [1 - eps, 1] for an
    admissible degree.  For odd t the represented function is x times the
    even expansion; ``lcu_coefficients`` fold that extra factor in.
    """

    t: int
    d: int
    weights: np.ndarray
    alpha: float

    @property
    def half(self) -> int:
        return self.d // 2

    def lcu_coefficients(self) -> np.ndarray:
        """Nonnegative sector weights c_m (summing to alpha) of the ladder mixture.

        Even t: sector m carries degree 2m with weight w_0 (m = 0) or 2 w_m.
        Odd t: sector m carries degree 2m + 1 with weight w_m + w_{m+1}
        (the boundary sector keeps just w_{d/2}).
        """
        h = self.half
        w = self.weights[h:]
        if self.t % 2 == 0:
            c = 2.0 * w.copy()
            c[0] = w[0]
        else:
            c = w + np.concatenate([w[1:], [0.0]])
        return c

    def degrees(self) -> np.ndarray:
        """Chebyshev degree realized by each ladder sector."""
        base = 2 * np.arange(self.half + 1)
        return base + (self.t % 2)


def chebyshev_expansion(t: int, eps: float | None = None, d: int | None = None) -> ChebyshevExpansion:
    """Build the truncated expansion; ``d`` defaults to ``truncation_degree``."""
    if d is None:
        if eps is None:
            raise PreconditionError("provide either eps or an explicit degree d")
        d = truncation_degree(t, eps)
    if d % 2:
        raise PreconditionError(f"degree must be even, got {d}")
    te = t - (t % 2)
    if d > te:
        raise PreconditionError(f"degree {d} exceeds the exact degree {te}")
    ns = np.arange(-(d // 2), d // 2 + 1)
    if te == 0:
        weights = np.array([1.0])
    else:
        weights = np.exp(_log_binom(te, te / 2.0 + ns) - te * math.log(2.0))
    return ChebyshevExpansion(t=t, d=d, weights=weights, alpha=float(weights.sum()))


def eval_poly_scalar(exp: ChebyshevExpansion, x: float) -> float:
    """Evaluate the truncated approximant of x^t at a scalar in [-1, 1]."""
    if abs(x) > 1.0 + 1e-12:
        raise DomainError(f"x must lie in [-1, 1], got {x}")
    h = exp.half
    coeffs = np.zeros(exp.d + 1)
    coeffs[0] = exp.weights[h]
    for m in range(1, h + 1):
        coeffs[2 * m] = 2.0 * exp.weights[h + m]
    val = ncheb.chebval(np.clip(x, -1.0, 1.0), coeffs)
    if exp.t % 2:
        val = x * val
    return float(val)


def eval_block_values(exp: ChebyshevExpansion, lam: np.ndarray) -> np.ndarray:
    """Values of the implemented block on eigenvalues: approximant / alpha."""
    h = exp.half
    coeffs = np.zeros(exp.d + 1)
    coeffs[0] = exp.weights[h]
    for m in range(1, h + 1):
        coeffs[2 * m] = 2.0 * exp.weights[h + m]
    vals = ncheb.chebval(np.clip(lam, -1.0, 1.0), coeffs)
    if exp.t % 2:
        vals = lam * vals
    return vals / exp.alpha


def flag_reflection(w: BlockUnitary) -> np.ndarray:
    """Diagonal of I - 2 |flag><flag| (x) I over (ancilla, system)."""
    sign = np.ones(w.dim)
    sign[w.flag * w.system_dim : (w.flag + 1) * w.system_dim] = -1.0
    return sign


def reflection_product(w: BlockUnitary) -> np.ndarray:
    """R W^dag R W: one even-Chebyshev step of the block."""
    c = flag_reflection(w)[:, None]
    return c * (w.matrix.conj().T @ (c * w.matrix))


def walk_power_reflections(w: BlockUnitary, n: int) -> BlockUnitary:
    """n-fold reflection product; its block is the degree-2n Chebyshev of the block."""
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    B = w.block()
    if np.max(np.abs(B - B.conj().T)) > 1e-10:
        raise PreconditionError("walk block must be Hermitian for Chebyshev iteration")
    G = reflection_product(w)
    return BlockUnitary(
        np.linalg.matrix_power(G, n),
        w.ancilla_dim,
        w.system_dim,
        w.flag,
        counters={"walk": 2 * n},
    )


def controlled_walk_ladder(
    w: BlockUnitary, ell: int, *, dim_cap: int = LADDER_DIM_CAP
) -> BlockUnitary:
    """Counter-controlled reflection ladder: sector |m> applies the m-fold product.

    Built as the product over counter bits k of (C_k W^dag C_k W)^{2^k},
    where C_k reflects exactly when bit k is set and the walk ancilla sits
    on its flag.
    """
    if ell < 1:
        raise PreconditionError(f"ell must be >= 1, got {ell}")
    counter = 1 << ell
    dim = counter * w.dim
    if dim > dim_cap:
        raise SizeLimitError(f"ladder dimension {dim} exceeds cap {dim_cap}")
    w_full = np.kron(np.eye(counter), w.matrix)
    base_sign = flag_reflection(w)
    ladder = np.eye(dim)
    m_index = np.repeat(np.arange(counter), w.dim)
    for k in range(ell):
        bit = (m_index >> k) & 1
        ck = np.where(bit == 1, np.tile(base_sign, counter), 1.0)[:, None]
        factor = ck * (w_full.conj().T @ (ck * w_full))
        ladder = np.linalg.matrix_power(factor, 1 << k) @ ladder
    return BlockUnitary(
        ladder,
        ancilla_dim=counter * w.ancilla_dim,
        system_dim=w.system_dim,
        flag=w.flag,
        counters={"walk": 2 * (counter - 1)},
    )


def ladder_levels(d: int) -> int:
    """Smallest ell with 2^ell > d/2 (at least 1), sizing the counter register."""
    return max(1, math.ceil(math.log2(d // 2 + 1)) if d >= 2 else 1)


def prep_unitary(exp: ChebyshevExpansion, ell: int | None = None) -> np.ndarray:
    """Unitary whose first column carries the square-rooted sector weights.

    The column is sqrt(c_m / alpha) over sectors m = 0..d/2, zero-padded to
    the counter dimension; free columns come from the deterministic sweep.
    """
    if ell is None:
        ell = ladder_levels(exp.d)
    counter = 1 << ell
    c = exp.lcu_coefficients()
    if c.size > counter:
        raise PreconditionError(f"counter of {counter} sectors cannot hold degree {exp.d}")
    col = np.zeros((counter, 1))
    col[: c.size, 0] = np.sqrt(c / exp.alpha)
    return complete_orthonormal(col)


def fast_forward_unitary(w: BlockUnitary, t: int, eps: float) -> BlockUnitary:
    """Block-encode (up to the alpha factor) the t-th power of the walk block.

    For every unit vector psi in the system span,
    ||D^t psi - block psi|| <= 2 eps, and the number of walk applications is
    O(sqrt(t log(1/eps))) (tracked in ``counters``).
    """
    exp = chebyshev_expansion(t, eps)
    ell = ladder_levels(exp.d)
    counter = 1 << ell
    R = prep_unitary(exp, ell)
    ladder = controlled_walk_ladder(w, ell)
    dims = (counter, w.ancilla_dim, w.system_dim)
    U = ladder.matrix
    walk_calls = 2 * (counter - 1)
    if t % 2:
        U = np.kron(np.eye(counter), w.matrix) @ U
        walk_calls += 1
    U = lift(R.T, dims, (0,)) @ U @ lift(R, dims, (0,))
    return BlockUnitary(
        U,
        ancilla_dim=counter * w.ancilla_dim,
        system_dim=w.system_dim,
        flag=w.flag,
        counters={"walk": walk_calls, "degree": exp.d, "levels": ell},
    )


def apply_Dt_exact(d: DiscriminantMatrix, t: int, psi: np.ndarray) -> np.ndarray:
    """Reference D^t psi through the cached eigendecomposition."""
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    return d.power_apply(t, np.asarray(psi, dtype=float))
