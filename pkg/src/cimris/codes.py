"""Walsh-Hadamard spreading codes and despreading correlators.

Chips are kept as +/-1 integers so that orthogonality checks are exact;
the 1/sqrt(K) transmit normalisation lives in the transceiver.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .params import ConfigError, is_power_of_two


@dataclass(frozen=True, eq=False)
class SpreadingCodeSet:
    codes: np.ndarray  # (L, K) int8, entries +/-1

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int8)
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @property
    def L(self) -> int:
        return self.codes.shape[0]

    @property
    def K(self) -> int:
        return self.codes.shape[1]

    @property
    def chip_energy(self) -> float:
        """Per-chip average energy, (1/K) sum_k w_k^2 (1 for +/-1 chips)."""
        return float(np.mean(self.codes[0].astype(float) ** 2))

    def gram(self) -> np.ndarray:
        c = self.codes.astype(np.int64)
        return c @ c.T

    def to_csv(self, path: "str | Path") -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in self.codes:
                writer.writerow(int(v) for v in row)


def sylvester_hadamard(K: int) -> SpreadingCodeSet:
    """K x K Sylvester-Hadamard matrix, H_{2n} = [[H, H], [H, -H]].

    >>> sylvester_hadamard(2).codes.tolist()
    [[1, 1], [1, -1]]
    """
    if not is_power_of_two(K):
        raise ConfigError("k", f"K={K} must be a power of two")
    H = np.ones((1, 1), dtype=np.int8)
    while H.shape[0] < K:
        H = np.block([[H, H], [H, -H]])
    return SpreadingCodeSet(H)


def select_codes(full: SpreadingCodeSet, L: int) -> SpreadingCodeSet:
    """First ``L`` rows in Sylvester order."""
    if L > full.L:
        raise ConfigError("l", f"L={L} exceeds the {full.L} available codes")
    if L < 1:
        raise ConfigError("l", f"L={L} must be positive")
    return SpreadingCodeSet(full.codes[:L].copy())


def walsh_codes(L: int, K: int) -> SpreadingCodeSet:
    return select_codes(sylvester_hadamard(K), L)


def despread(chips, codes: SpreadingCodeSet, index: int):
    """sum_k w_{index,k} * chips[k]; real and imaginary parts by linearity."""
    chips = np.asarray(chips)
    if chips.shape[-1] != codes.K:
        raise ValueError(f"expected {codes.K} chips, got {chips.shape[-1]}")
    w = codes.codes[index]
    if np.issubdtype(chips.dtype, np.integer):
        return chips.astype(np.int64) @ w.astype(np.int64)
    return chips @ w.astype(float)


def despread_all(chips, codes: SpreadingCodeSet) -> np.ndarray:
    """Correlations with every code; trailing axis K becomes L."""
    chips = np.asarray(chips)
    if chips.shape[-1] != codes.K:
        raise ValueError(f"expected {codes.K} chips, got {chips.shape[-1]}")
    return chips @ codes.codes.T.astype(float)
