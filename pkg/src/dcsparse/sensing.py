"""Gaussian measurement matrices, compression, and calibrated noise."""

from dataclasses import dataclass

import numpy as np

from .seeding import as_generator


@dataclass
class MeasurementMatrix:
    """Dense real measurement operator with its dimensions and draw seed."""

    phi: np.ndarray
    m: int
    n: int
    seed: int | None = None

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if self.m < 1 or self.n < 1:
            raise ValueError(f"matrix dimensions must be >= 1, got {self.m}x{self.n}")
        if self.phi.shape != (self.m, self.n):
            raise ValueError(
                f"phi has shape {self.phi.shape}, expected ({self.m}, {self.n})"
            )


@dataclass
class NoisySystem:
    """Measurements after noise injection; sigma == 0 means noiseless."""

    y: np.ndarray
    sigma: float
    snr_db: float | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def gaussian_matrix(m: int, n: int, rng) -> MeasurementMatrix:
    """Draw an m x n matrix with i.i.d. standard normal entries."""
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got {m}x{n}")
    gen, seed = as_generator(rng)
    return MeasurementMatrix(phi=gen.standard_normal((m, n)), m=m, n=n, seed=seed)


def measure(phi: MeasurementMatrix, x: np.ndarray) -> np.ndarray:
    """Compress a signal: y = phi @ x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (phi.n,):
        raise ValueError(f"signal has length {x.shape[0] if x.ndim else 0} but matrix has {phi.n} columns")
    return phi.phi @ x


def snr_to_sigma(x: np.ndarray, m: int, snr_db: float) -> float:
    """Noise standard deviation hitting a target SNR.

    Inverts SNR = ||x||^2 / (m * sigma^2) with the SNR given in dB.
    """
    if m < 1:
        raise ValueError(f"measurement count must be >= 1, got {m}")
    energy = float(np.asarray(x, dtype=float) @ np.asarray(x, dtype=float))
    if energy == 0.0:
        raise ValueError("signal energy is zero; SNR is undefined")
    return float(np.sqrt(energy / (m * 10.0 ** (snr_db / 10.0))))


def add_noise(y: np.ndarray, sigma: float, rng, snr_db: float | None = None) -> NoisySystem:
    """Add i.i.d. N(0, sigma^2) noise to measurements; sigma == 0 passes y through."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    y = np.asarray(y, dtype=float)
    if sigma == 0:
        return NoisySystem(y=y.copy(), sigma=0.0, snr_db=snr_db)
    gen, _ = as_generator(rng)
    return NoisySystem(y=y + sigma * gen.standard_normal(y.size), sigma=float(sigma), snr_db=snr_db)
