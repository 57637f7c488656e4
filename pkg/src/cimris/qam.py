"""Gray-mapped square and rectangular QAM with unit average energy."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .params import ConfigError, is_power_of_two, log2_int


def int_to_bits(values, width: int) -> np.ndarray:
    """MSB-first bit expansion along a new trailing axis."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[..., None] >> shifts) & 1).astype(np.int8)


def bits_to_int(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    if width == 0:
        return np.zeros(bits.shape[:-1], dtype=np.int64)
    weights = np.int64(1) << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def gray_encode(n):
    n = np.asarray(n, dtype=np.int64)
    return n ^ (n >> 1)


def gray_decode(g):
    g = np.asarray(g, dtype=np.int64)
    n = g.copy()
    shift = g >> 1
    while np.any(shift):
        n ^= shift
        shift >>= 1
    return n


class QamConstellation:
    """M-QAM on an M_I x M_Q grid of odd-integer levels, scaled to E|x|^2 = 1.

    The log2(M) symbol bits split into log2(M_I) in-phase bits followed by
    log2(M_Q) quadrature bits; each group is the Gray label of its level
    position (position 0 is the most negative level). Symbol index =
    binary value of the bit word, so index 0 is the all-zero word.
    """

    def __init__(self, M: int):
        if not is_power_of_two(M) or M < 4:
            raise ConfigError("m", f"M={M} must be a power of two >= 4")
        b = log2_int(M)
        self.M = M
        self.bits = b
        self.bits_i = (b + 1) // 2
        self.bits_q = b // 2
        self.M_I = 2**self.bits_i
        self.M_Q = 2**self.bits_q
        self.scale = np.sqrt(((self.M_I**2 - 1) + (self.M_Q**2 - 1)) / 3.0)
        self.levels_i = (2.0 * np.arange(self.M_I) - (self.M_I - 1)) / self.scale
        self.levels_q = (2.0 * np.arange(self.M_Q) - (self.M_Q - 1)) / self.scale
        idx = np.arange(M)
        pos_i, pos_q = self.positions(idx)
        self.points = self.levels_i[pos_i] + 1j * self.levels_q[pos_q]

    @property
    def is_square(self) -> bool:
        return self.M_I == self.M_Q

    def __repr__(self):
        return f"QamConstellation(M={self.M}, {self.M_I}x{self.M_Q})"

    def positions(self, index):
        """Level positions (I, Q) of symbol indices."""
        index = np.asarray(index, dtype=np.int64)
        label_i = index >> self.bits_q
        label_q = index & (self.M_Q - 1)
        return gray_decode(label_i), gray_decode(label_q)

    def index_from_positions(self, pos_i, pos_q):
        return (gray_encode(pos_i) << self.bits_q) | gray_encode(pos_q)

    def modulate(self, index):
        return self.points[np.asarray(index, dtype=np.int64)]

    def rms_inphase(self) -> float:
        return float(np.sqrt(np.mean(self.levels_i**2)))

    def slice_i(self, v):
        return _slice(v, self.M_I, self.scale)

    def slice_q(self, v):
        return _slice(v, self.M_Q, self.scale)

    def detect_sliced(self, y, gain):
        """Exact ML index for ``y = gain * x + n`` with real gain > 0.

        The metric |y - gain*x|^2 separates over the rectangular grid, so
        per-dimension nearest-level slicing is the joint minimiser.
        """
        y = np.asarray(y, dtype=complex)
        gain = np.asarray(gain, dtype=float)
        safe = np.where(gain > 0, gain, 1.0)
        z = y / safe
        pos_i = self.slice_i(z.real)
        pos_q = self.slice_q(z.imag)
        index = self.index_from_positions(pos_i, pos_q)
        return np.where(gain > 0, index, 0)

    def detect_exhaustive(self, y, gain):
        """Brute-force argmin over all M points; ties go to the lowest index."""
        y = np.asarray(y, dtype=complex)
        gain = np.asarray(gain, dtype=float)
        metric = np.abs(y[..., None] - gain[..., None] * self.points) ** 2
        return np.argmin(metric, axis=-1)


def _slice(v, m: int, scale: float):
    x = (np.asarray(v, dtype=float) * scale + (m - 1)) / 2.0
    # ceil(x - 1/2) is the nearest integer with exact halves rounded down
    return np.clip(np.ceil(x - 0.5), 0, m - 1).astype(np.int64)


@lru_cache(maxsize=None)
def constellation(M: int) -> QamConstellation:
    return QamConstellation(M)
