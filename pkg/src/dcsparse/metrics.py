"""Reconstruction error measures."""

import numpy as np


def normalized_sq_error(x_true: np.ndarray, x_hat: np.ndarray) -> float:
    """Squared l2 error of x_hat relative to the squared norm of x_true."""
    x_true = np.asarray(x_true, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x_true.shape != x_hat.shape:
        raise ValueError(f"vector lengths differ: {x_true.shape} vs {x_hat.shape}")
    energy = float(x_true @ x_true)
    if energy == 0.0:
        raise ValueError("ground truth has zero norm; normalized error is undefined")
    diff = x_true - x_hat
    return float(diff @ diff) / energy


def nmse(pairs) -> float:
    """Mean of normalized squared errors over (x_true, x_hat) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("nmse needs at least one (x_true, x_hat) pair")
    return sum(normalized_sq_error(t, h) for t, h in pairs) / len(pairs)
