"""Primitive sparsity operators shared by all solvers.

The central object is the top-(k,1) norm: the sum of the k largest
magnitudes of a vector.  ||x||_1 - ||x||_{k,1} vanishes exactly when x has
at most k nonzeros, which is what lets the solvers penalize cardinality
without a combinatorial search.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class SubgradientVector:
    """A subgradient of the top-(k,1) norm: entries in {-1, 0, +1}, sum of |w| equals k."""

    w: np.ndarray
    k: int


@dataclass
class SplitVector:
    """Positive/negative decomposition; u - v reconstructs the original vector."""

    u: np.ndarray
    v: np.ndarray


def _check_k(x: np.ndarray, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not 1 <= k <= x.size:
        raise ValueError(f"k must lie in [1, {x.size}], got {k}")
    return x


def _top_k_indices(magnitudes: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest values; ties at the boundary go to the lowest index.

    Uses a partial selection, O(n) on average rather than a full sort.
    """
    n = magnitudes.size
    if k == n:
        return np.arange(n)
    boundary = np.partition(magnitudes, n - k)[n - k]
    selected = np.flatnonzero(magnitudes > boundary)
    missing = k - selected.size
    ties = np.flatnonzero(magnitudes == boundary)[:missing]
    return np.concatenate([selected, ties])


def top_k1_norm(x: np.ndarray, k: int) -> float:
    """Sum of the k largest absolute entries of x."""
    x = _check_k(x, k)
    a = np.abs(x)
    if k == x.size:
        return float(a.sum())
    return float(np.partition(a, x.size - k)[x.size - k:].sum())


def sparsity_gap(x: np.ndarray, k: int) -> float:
    """||x||_1 minus the top-(k,1) norm; zero exactly when x has at most k nonzeros."""
    x = _check_k(x, k)
    return float(np.abs(x).sum()) - top_k1_norm(x, k)


def top_k1_subgradient(x: np.ndarray, k: int) -> SubgradientVector:
    """Subgradient of the top-(k,1) norm at x.

    Signs of the k largest-magnitude entries, zero elsewhere; boundary
    ties break toward the lowest index, and selected zero entries carry
    +1 so that sum(|w|) == k always holds.
    """
    x = _check_k(x, k)
    sel = _top_k_indices(np.abs(x), k)
    w = np.zeros(x.size)
    signs = np.sign(x[sel])
    signs[signs == 0] = 1.0
    w[sel] = signs
    return SubgradientVector(w=w, k=k)


def split_pos_neg(x: np.ndarray) -> SplitVector:
    """Elementwise positive and negative parts: u = max(x, 0), v = max(-x, 0)."""
    x = np.asarray(x, dtype=float)
    return SplitVector(u=np.maximum(x, 0.0), v=np.maximum(-x, 0.0))


def merge_split(s: SplitVector) -> np.ndarray:
    """Recombine a split vector as u - v (the parts need not be complementary)."""
    u = np.asarray(s.u, dtype=float)
    v = np.asarray(s.v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"split halves have mismatched shapes {u.shape} and {v.shape}")
    return u - v


def project_nonneg(z: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the nonnegative orthant."""
    return np.maximum(np.asarray(z, dtype=float), 0.0)


def soft_threshold(a, lam: float):
    """Shrink toward zero by lam: sign(a) * max(|a| - lam, 0).

    Works on scalars or elementwise on arrays.
    """
    if lam < 0:
        raise ValueError(f"threshold must be >= 0, got {lam}")
    return np.sign(a) * np.maximum(np.abs(a) - lam, 0.0)
