"""Flat Rayleigh S->RIS->D channel with phase-aligned RIS reflection.

The RIS phases are folded into the real effective gain
``A = sum_n |h_n| |g_n|``; :meth:`ChannelRealization.reflection_matrix`
rebuilds the diagonal reflection matrix for inspection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric CN(0, variance) samples."""
    s = np.sqrt(variance / 2.0)
    return s * rng.standard_normal(shape) + 1j * s * rng.standard_normal(shape)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    h: np.ndarray  # S -> RIS, h_n = alpha_n exp(-j theta_n)
    g: np.ndarray  # RIS -> D, g_n = beta_n exp(-j varphi_n)

    @classmethod
    def from_gains(cls, h, g) -> "ChannelRealization":
        h = np.atleast_1d(np.asarray(h, dtype=complex))
        g = np.atleast_1d(np.asarray(g, dtype=complex))
        if h.shape != g.shape or h.ndim != 1:
            raise ValueError("h and g must be equal-length vectors")
        return cls(h, g)

    @property
    def N(self) -> int:
        return self.h.size

    @property
    def alpha(self) -> np.ndarray:
        return np.abs(self.h)

    @property
    def beta(self) -> np.ndarray:
        return np.abs(self.g)

    @property
    def theta(self) -> np.ndarray:
        return -np.angle(self.h)

    @property
    def varphi(self) -> np.ndarray:
        return -np.angle(self.g)

    @property
    def phases(self) -> np.ndarray:
        """SNR-maximising reflection phases phi_n = theta_n + varphi_n."""
        return self.theta + self.varphi

    @property
    def effective_gain(self) -> float:
        return float(np.sum(self.alpha * self.beta))

    def reflection_matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.phases))

    def response(self, phases=None) -> complex:
        """Cascade sum_n h_n exp(j phi_n) g_n for the given (default: aligned) phases."""
        phases = self.phases if phases is None else np.asarray(phases, dtype=float)
        return complex(np.sum(self.h * np.exp(1j * phases) * self.g))


def sample_realization(N: int, sigma2: float, rng: np.random.Generator) -> ChannelRealization:
    if N < 1:
        raise ValueError("N must be >= 1")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    return ChannelRealization(complex_gaussian(rng, N, sigma2), complex_gaussian(rng, N, sigma2))


def effective_gains(h, g) -> np.ndarray:
    """Aligned gains sum_n |h_n||g_n| along the trailing axis (batched)."""
    return np.sum(np.abs(h) * np.abs(g), axis=-1)


@dataclass(frozen=True)
class NoiseModel:
    """Per-chip CN(0, n0) noise; real and imaginary parts have variance n0/2."""

    n0: float
    enabled: bool = True

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError("n0 must be positive")

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if not self.enabled:
            return np.zeros(shape, dtype=complex)
        return complex_gaussian(rng, shape, self.n0)


def max_snr(A, K: int, E_c: float, n0: float):
    """Maximum instantaneous SNR K E_c A^2 / N_0."""
    return K * E_c * np.asarray(A, dtype=float) ** 2 / n0


def apply_channel(tx_chips, realization, noise: NoiseModel, rng: np.random.Generator,
                  K: "int | None" = None) -> np.ndarray:
    """rx[k] = A tx[k] + n[k]; ``realization`` may be a bare gain A."""
    tx = np.asarray(tx_chips, dtype=complex)
    if K is not None and tx.shape[-1] != K:
        raise ValueError(f"expected {K} chips, got {tx.shape[-1]}")
    A = realization.effective_gain if isinstance(realization, ChannelRealization) else realization
    A = np.asarray(A, dtype=float)
    if A.ndim:
        A = A[..., None]
    return A * tx + noise.sample(rng, tx.shape)
