"""CIM-RIS transmitter and two-stage receiver.

Bit layout per symbol interval (MSB first)::

    [ u1 QAM symbol bits | u2 in-phase code index | u2 quadrature code index ]

Chip k carries ``(x_re w[ell_re, k] + j x_im w[ell_im, k]) / sqrt(K)``, so
the matched despreader output is ``sqrt(K) A x_component + noise`` and the
ML symbol hypothesis is scaled by ``sqrt(K) A``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, NoiseModel, apply_channel, complex_gaussian, effective_gains
from .codes import SpreadingCodeSet, despread_all
from .params import SystemConfig
from .qam import bits_to_int, constellation, int_to_bits


@dataclass(frozen=True)
class CimRisCodeword:
    symbol: complex
    symbol_index: int
    ell_re: int
    ell_im: int
    source_bits: tuple


@dataclass(frozen=True, eq=False)
class DetectionResult:
    ell_re_hat: int
    ell_im_hat: int
    symbol_index_hat: int
    x_hat: complex
    bits_hat: np.ndarray
    S_I: np.ndarray
    S_Q: np.ndarray
    degenerate: bool = False  # A == 0: symbol decision fell through to tie-break


def _qam(config: SystemConfig):
    return constellation(config.modulation_order)


def encode(bits, config: SystemConfig) -> CimRisCodeword:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    b = config.budget
    if bits.size != b.u:
        raise ValueError(f"expected {b.u} bits, got {bits.size}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0/1")
    sym = int(bits_to_int(bits[: b.u1]))
    ell_re = int(bits_to_int(bits[b.u1 : b.u1 + b.u2]))
    ell_im = int(bits_to_int(bits[b.u1 + b.u2 :]))
    return CimRisCodeword(complex(_qam(config).points[sym]), sym, ell_re, ell_im,
                          tuple(int(v) for v in bits))


def demap(ell_re: int, ell_im: int, symbol_index: int, config: SystemConfig) -> np.ndarray:
    b = config.budget
    return np.concatenate([int_to_bits(symbol_index, b.u1), int_to_bits(ell_re, b.u2),
                           int_to_bits(ell_im, b.u2)]).astype(np.int8)


def spread_transmit(cw: CimRisCodeword, codes: SpreadingCodeSet) -> np.ndarray:
    w = codes.codes.astype(float)
    return (cw.symbol.real * w[cw.ell_re] + 1j * cw.symbol.imag * w[cw.ell_im]) / np.sqrt(codes.K)


def detect_indices(S_I, S_Q) -> tuple[int, int]:
    """Largest squared despreader output per branch; lowest index wins ties."""
    return int(np.argmax(np.abs(np.asarray(S_I)) ** 2)), int(np.argmax(np.abs(np.asarray(S_Q)) ** 2))


def detect_symbol(y_tilde_I, y_tilde_Q, A: float, config: SystemConfig) -> int:
    """Index of argmin_i |(y_I + j y_Q) - sqrt(K) A x_i|^2 over all M points."""
    y = complex(y_tilde_I) + 1j * complex(y_tilde_Q)
    c = np.sqrt(config.chip_count) * float(A)
    return int(_qam(config).detect_exhaustive(np.array(y), np.array(c)))


def decode(rx_chips, realization, codes: SpreadingCodeSet, config: SystemConfig) -> DetectionResult:
    rx = np.asarray(rx_chips, dtype=complex)
    if rx.shape != (codes.K,):
        raise ValueError(f"expected {codes.K} chips, got shape {rx.shape}")
    A = realization.effective_gain if isinstance(realization, ChannelRealization) else float(realization)
    S_I = despread_all(rx.real, codes)
    S_Q = despread_all(rx.imag, codes)
    ell_re, ell_im = detect_indices(S_I, S_Q)
    sym = detect_symbol(S_I[ell_re], S_Q[ell_im], A, config)
    return DetectionResult(ell_re, ell_im, sym, complex(_qam(config).points[sym]),
                           demap(ell_re, ell_im, sym, config), S_I, S_Q, degenerate=(A == 0))


def joint_ml_decode(rx_chips, A: float, codes: SpreadingCodeSet, config: SystemConfig):
    """Exhaustive chip-domain ML over (ell_re, ell_im, x); reference only."""
    rx = np.asarray(rx_chips, dtype=complex)
    w = codes.codes.astype(float) / np.sqrt(codes.K)
    pts = _qam(config).points
    # cand[a, b, s, k] = A (x_re w_a + j x_im w_b)
    cand = A * (pts.real[None, None, :, None] * w[:, None, None, :]
                + 1j * pts.imag[None, None, :, None] * w[None, :, None, :])
    metric = np.sum(np.abs(rx - cand) ** 2, axis=-1)
    a, b, s = np.unravel_index(int(np.argmin(metric)), metric.shape)
    return int(a), int(b), int(s)


# ---------------------------------------------------------------------------
# batched path used by the Monte Carlo engine
# ---------------------------------------------------------------------------

def decode_batch(rx, A, codes: SpreadingCodeSet, config: SystemConfig):
    """Vectorised :func:`decode`; rows of ``rx`` are symbol intervals."""
    qam = _qam(config)
    S_I = despread_all(rx.real, codes)
    S_Q = despread_all(rx.imag, codes)
    ell_re = np.argmax(S_I**2, axis=-1)
    ell_im = np.argmax(S_Q**2, axis=-1)
    rows = np.arange(rx.shape[0])
    y = S_I[rows, ell_re] + 1j * S_Q[rows, ell_im]
    sym = qam.detect_sliced(y, np.sqrt(codes.K) * np.asarray(A))
    return ell_re, ell_im, sym


def simulate_block(config: SystemConfig, codes: SpreadingCodeSet, n0: float,
                   rng: np.random.Generator, size: int, noise: bool = True):
    """Run ``size`` independent symbol intervals.

    Returns per-trial ``(bit_errors, index_errors, degenerate)``; index
    errors count wrong I and Q code decisions (0, 1 or 2).
    """
    b = config.budget
    qam = _qam(config)
    bits = rng.integers(0, 2, size=(size, b.u), dtype=np.int8)
    h = complex_gaussian(rng, (size, config.ris_elements), config.sigma2)
    g = complex_gaussian(rng, (size, config.ris_elements), config.sigma2)
    A = effective_gains(h, g)

    sym = bits_to_int(bits[:, : b.u1])
    ell_re = bits_to_int(bits[:, b.u1 : b.u1 + b.u2])
    ell_im = bits_to_int(bits[:, b.u1 + b.u2 :])
    x = qam.points[sym]
    w = codes.codes.astype(float)
    tx = (x.real[:, None] * w[ell_re] + 1j * x.imag[:, None] * w[ell_im]) / np.sqrt(codes.K)
    rx = apply_channel(tx, A, NoiseModel(n0, enabled=noise), rng)

    re_hat, im_hat, sym_hat = decode_batch(rx, A, codes, config)
    bits_hat = np.concatenate([int_to_bits(sym_hat, b.u1), int_to_bits(re_hat, b.u2),
                               int_to_bits(im_hat, b.u2)], axis=-1)
    bit_errors = np.count_nonzero(bits_hat != bits, axis=-1)
    index_errors = (re_hat != ell_re).astype(np.int64) + (im_hat != ell_im)
    return bit_errors, index_errors, A == 0
