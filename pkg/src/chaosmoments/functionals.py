"""Coefficient tensors and the deterministic / sampled process functionals.

A chaos coefficient tensor has shape (n1, n2, m): the first two indices
pair with the two independent variable families, the third lives in the
value space ell_q^m.  The functionals here are the building blocks of the
bound terms:

* ``alpha_A``     -- Euclidean aggregate of slice contractions,
* ``alpha_inf_A`` -- its max-coordinate companion,
* ``phi_A``       -- the 2q-th-root fourth-moment functional,
* ``s_A_surrogate`` -- closed-form stand-in for the expected chaos norm,

plus Monte Carlo expected suprema used to cross-check the comparison
lemmas behind them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .estimates import McEstimate, batched_mean


@dataclass(frozen=True)
class CoefficientTensor:
    """Triple-indexed coefficients with the value-space exponent q."""

    entries: np.ndarray
    q: float = 2.0

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 3:
            raise ValueError("entries must have shape (n1, n2, m)")
        if 0 in arr.shape:
            raise ValueError("all tensor dimensions must be positive")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        if self.q < 1.0:
            raise ValueError(f"q = {self.q} < 1")
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def n1(self):
        return self.entries.shape[0]

    @property
    def n2(self):
        return self.entries.shape[1]

    @property
    def m(self):
        return self.entries.shape[2]

    @property
    def q_dual(self):
        """Hoelder conjugate; infinity when q = 1."""
        return math.inf if self.q == 1.0 else self.q / (self.q - 1.0)

    def transposed(self):
        """Swap the two chaos indices."""
        return CoefficientTensor(np.swapaxes(self.entries, 0, 1), self.q)


def lq_norm(c, q, axis=-1):
    """ell_q norm along an axis (q >= 1, finite)."""
    c = np.asarray(c, dtype=float)
    if q == 1.0:
        return np.abs(c).sum(axis=axis)
    if q == 2.0:
        return np.sqrt((c * c).sum(axis=axis))
    return (np.abs(c) ** q).sum(axis=axis) ** (1.0 / q)


def lq_align(c, q):
    """Unit-dual-ball vector t maximizing <c, t>; sup equals lq_norm(c, q).

    For q = 1 the dual ball is the cube and the maximizer is the sign
    pattern of c.
    """
    c = np.asarray(c, dtype=float)
    if not c.any():
        t = np.zeros_like(c)
        t.flat[0] = 1.0
        return t
    if q == 1.0:
        return np.sign(c)
    nrm = lq_norm(c, q)
    return np.sign(c) * (np.abs(c) / nrm) ** (q - 1.0)


def alpha_A(A, w):
    """sqrt of sum_i (sum_{jk} a_ijk w_jk)^2."""
    w = np.asarray(w, dtype=float)
    if w.shape != (A.n2, A.m):
        raise ValueError(f"w must have shape {(A.n2, A.m)}, got {w.shape}")
    contractions = np.einsum("ijk,jk->i", A.entries, w)
    return float(np.linalg.norm(contractions))


def alpha_inf_A(A, w):
    """max_i |sum_{jk} a_ijk w_jk|."""
    w = np.asarray(w, dtype=float)
    if w.shape != (A.n2, A.m):
        raise ValueError(f"w must have shape {(A.n2, A.m)}, got {w.shape}")
    contractions = np.einsum("ijk,jk->i", A.entries, w)
    return float(np.abs(contractions).max())


def phi_A(A, x):
    """(sum_k (sum_i (sum_j a_ijk x_j)^4 / sum_j a_ijk^2)^{q/2})^{1/2q}.

    Fibers (i, k) with vanishing squared mass contribute 0 (their
    numerator vanishes identically).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (A.n2,):
        raise ValueError(f"x must have shape ({A.n2},), got {x.shape}")
    b = np.einsum("ijk,j->ik", A.entries, x)
    mass = np.einsum("ijk,ijk->ik", A.entries, A.entries)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mass > 0.0, b ** 4 / np.where(mass > 0.0, mass, 1.0), 0.0)
    inner = ratio.sum(axis=0)  # over i, one value per k
    q = A.q
    return float((inner ** (q / 2.0)).sum() ** (1.0 / (2.0 * q)))


def s_A_surrogate(A):
    """(sum_k (sum_ij a_ijk^2)^{q/2})^{1/q}."""
    mass = (A.entries ** 2).sum(axis=(0, 1))
    q = A.q
    return float((mass ** (q / 2.0)).sum() ** (1.0 / q))


# ---------------------------------------------------------------------------
# Monte Carlo expected suprema
# ---------------------------------------------------------------------------

_LAWS = ("exponential", "gaussian", "gaussian-squared-minus-one", "gaussian-product")


def _draw_law(gen, law, size):
    """Variance-one draws of the comparison laws (or an LCT distribution)."""
    if isinstance(law, tuple) and law[0] == "lct":
        return law[1].sample(gen, size[0] * size[1]).reshape(size)
    if law == "exponential":
        return gen.laplace(0.0, 1.0 / math.sqrt(2.0), size=size)
    if law == "gaussian":
        return gen.standard_normal(size)
    if law == "gaussian-squared-minus-one":
        g = gen.standard_normal(size)
        eps = gen.integers(0, 2, size=size) * 2 - 1
        return eps * (g * g - 1.0) / math.sqrt(2.0)
    if law == "gaussian-product":
        return gen.standard_normal(size) * gen.standard_normal(size)
    raise ValueError(f"unknown law {law!r}; expected one of {_LAWS} or ('lct', d)")


def mc_expected_sup(T, law, cfg):
    """Estimate E sup_{t in T} <t, Z> for a finite set T of vectors."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if T.size == 0:
        raise ValueError("T must be nonempty")
    n = T.shape[1]
    if not T.any():
        return McEstimate(0.0, 0.0, cfg.total_samples, cfg.master_seed)

    def batch(gen, size):
        Z = _draw_law(gen, law, (size, n))
        return (Z @ T.T).max(axis=1)

    return batched_mean(cfg, batch)


def mc_beta(A, x, cfg):
    """Estimate E sup_{t in B_{q'}} |sum_ijk a_ijk g_i x_j t_k|.

    The inner supremum is the ell_q norm of the contracted Gaussian
    image, by ell_q / ell_{q'} duality.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (A.n2,):
        raise ValueError(f"x must have shape ({A.n2},), got {x.shape}")
    M = np.einsum("ijk,j->ik", A.entries, x)  # (n1, m)
    if not M.any():
        return McEstimate(0.0, 0.0, cfg.total_samples, cfg.master_seed)

    def batch(gen, size):
        g = gen.standard_normal((size, A.n1))
        return lq_norm(g @ M, A.q, axis=1)

    return batched_mean(cfg, batch)
