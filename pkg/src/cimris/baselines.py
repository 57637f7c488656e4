"""Benchmark transceivers: traditional RIS, TSM-RIS and TQSM-RIS.

Channel model for the spatial-modulation benchmarks: each of the N_T
transmit antennas has its own Rayleigh S->RIS vector ``H[t]``, and the RIS
aligns its phases to the cascade of the antenna that carries the real
part of the symbol.  ``B[t, s]`` is the response seen from antenna ``s``
while the RIS is aligned to antenna ``t``; the receiver knows all of B.

* TSM-RIS: antenna t sends x, ``y = B[t, t] x + n``.
* TQSM-RIS: antenna a sends x_re, antenna b sends j x_im, RIS aligned to a,
  ``y = B[a, a] x_re + j B[a, b] x_im + n``.  With a == b this is TSM-RIS.

Bit layout (MSB first): ``[symbol bits | antenna index bits ...]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, NoiseModel, complex_gaussian, effective_gains
from .params import ConfigError, Scheme, SystemConfig, is_power_of_two, log2_int
from .qam import QamConstellation, bits_to_int, constellation, int_to_bits


@dataclass(frozen=True)
class BaselineCodeword:
    scheme: Scheme
    symbol: complex
    symbol_index: int
    antenna_index: "int | None" = None
    antenna_re: "int | None" = None
    antenna_im: "int | None" = None
    source_bits: tuple = ()


def cross_gains(H, g) -> np.ndarray:
    """B[..., t, s] = sum_n H[s, n] exp(j phi_n^(t)) g_n, RIS aligned to antenna t."""
    H = np.asarray(H, dtype=complex)
    g = np.asarray(g, dtype=complex)
    steer = np.exp(-1j * np.angle(H)) * np.abs(g)[..., None, :]
    return np.einsum("...tn,...sn->...ts", steer, H)


@dataclass(frozen=True, eq=False)
class MimoChannelRealization:
    H: np.ndarray  # (N_T, N)
    g: np.ndarray  # (N,)

    @property
    def N_T(self) -> int:
        return self.H.shape[0]

    @property
    def B(self) -> np.ndarray:
        return cross_gains(self.H, self.g)

    @property
    def A(self) -> np.ndarray:
        """Aligned gains A_t = B[t, t] (real, non-negative)."""
        return effective_gains(self.H, self.g[None, :])

    def for_antenna(self, t: int) -> ChannelRealization:
        return ChannelRealization.from_gains(self.H[t], self.g)


def sample_mimo_realization(N_T: int, N: int, sigma2: float,
                            rng: np.random.Generator) -> MimoChannelRealization:
    return MimoChannelRealization(complex_gaussian(rng, (N_T, N), sigma2),
                                  complex_gaussian(rng, N, sigma2))


def _check_bits(bits, n: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size != n:
        raise ValueError(f"expected {n} bits, got {bits.size}")
    return bits


def _qam(M: int) -> QamConstellation:
    return constellation(M)


def _antenna_bits(N_T: int) -> int:
    if not is_power_of_two(N_T):
        raise ConfigError("nt", f"N_T={N_T} must be a power of two")
    return log2_int(N_T)


def encode_baseline(bits, scheme: "Scheme | str", M: int, N_T: int = 1) -> BaselineCodeword:
    scheme = Scheme.parse(scheme)
    qam = _qam(M)
    na = _antenna_bits(N_T)
    if scheme is Scheme.RIS:
        bits = _check_bits(bits, qam.bits)
        s = int(bits_to_int(bits))
        return BaselineCodeword(scheme, complex(qam.points[s]), s, source_bits=tuple(bits))
    if scheme is Scheme.TSM_RIS:
        bits = _check_bits(bits, qam.bits + na)
        s = int(bits_to_int(bits[: qam.bits]))
        t = int(bits_to_int(bits[qam.bits :]))
        return BaselineCodeword(scheme, complex(qam.points[s]), s, antenna_index=t,
                                source_bits=tuple(bits))
    if scheme is Scheme.TQSM_RIS:
        bits = _check_bits(bits, qam.bits + 2 * na)
        s = int(bits_to_int(bits[: qam.bits]))
        a = int(bits_to_int(bits[qam.bits : qam.bits + na]))
        b = int(bits_to_int(bits[qam.bits + na :]))
        return BaselineCodeword(scheme, complex(qam.points[s]), s, antenna_re=a, antenna_im=b,
                                source_bits=tuple(bits))
    raise ConfigError("scheme", "CIM-RIS is not a baseline")


def _to_bits(M: int, N_T: int, sym, *antennas) -> np.ndarray:
    parts = [int_to_bits(sym, log2_int(M))]
    parts += [int_to_bits(a, log2_int(N_T)) for a in antennas]
    return np.concatenate(parts, axis=-1).astype(np.int8)


# ---------------------------------------------------------------------------
# detectors: *_exhaustive enumerate every hypothesis; the others are the
# equivalent fast forms (per-dimension slicing is exact for real gains)
# ---------------------------------------------------------------------------

def tsm_detect_exhaustive(y, A, qam: QamConstellation):
    """argmin over (t, s) of |y - A_t x_s|^2, flattened order t-major."""
    y = np.asarray(y, dtype=complex)
    cand = np.asarray(A)[..., :, None] * qam.points
    metric = np.abs(y[..., None, None] - cand) ** 2
    flat = np.argmin(metric.reshape(metric.shape[:-2] + (-1,)), axis=-1)
    return flat // qam.M, flat % qam.M


def tsm_detect(y, A, qam: QamConstellation):
    y = np.asarray(y, dtype=complex)
    A = np.asarray(A, dtype=float)
    sym = qam.detect_sliced(y[..., None], A)
    metric = np.abs(y[..., None] - A * qam.points[sym]) ** 2
    t = np.argmin(metric, axis=-1)
    return t, np.take_along_axis(sym, t[..., None], axis=-1)[..., 0]


def tqsm_detect_exhaustive(y, B, qam: QamConstellation, diagonal_only: bool = False):
    y = np.asarray(y, dtype=complex)
    B = np.asarray(B, dtype=complex)
    nt = B.shape[-1]
    Adiag = np.real(np.diagonal(B, axis1=-2, axis2=-1))
    # cand[..., a, b, s] = A_a x_re + j B[a, b] x_im
    cand = (Adiag[..., :, None, None] * qam.points.real
            + 1j * B[..., :, :, None] * qam.points.imag)
    metric = np.abs(y[..., None, None, None] - cand) ** 2
    if diagonal_only:
        off = ~np.eye(nt, dtype=bool)
        metric = np.where(off[:, :, None], np.inf, metric)
    flat = np.argmin(metric.reshape(metric.shape[:-3] + (-1,)), axis=-1)
    a, rest = np.divmod(flat, nt * qam.M)
    b, s = np.divmod(rest, qam.M)
    return a, b, s


def tqsm_detect(y, B, qam: QamConstellation):
    """Joint ML over (a, b, x): for every (a, b, x_im) slice x_re exactly."""
    y = np.asarray(y, dtype=complex)
    B = np.asarray(B, dtype=complex)
    nt = B.shape[-1]
    Adiag = np.real(np.diagonal(B, axis1=-2, axis2=-1))
    lq = qam.levels_q
    # r[..., a, b, q] = y - j B[a, b] l_q ; x_re sliced from Re(r) / A_a
    r = y[..., None, None, None] - 1j * B[..., :, :, None] * lq
    Aa = Adiag[..., :, None, None]
    safe = np.where(Aa > 0, Aa, 1.0)
    pos_i = qam.slice_i(r.real / safe)
    pos_i = np.where(Aa > 0, pos_i, 0)
    metric = np.abs(r - Aa * qam.levels_i[pos_i]) ** 2
    # enumerate in (a, b, symbol index) order so ties match the exhaustive form
    pos_q = np.broadcast_to(np.arange(qam.M_Q), metric.shape)
    sym = qam.index_from_positions(pos_i, pos_q)
    shape = metric.shape[:-3] + (-1,)
    score = metric.reshape(shape)
    key = (np.arange(nt)[:, None, None] * nt + np.arange(nt)[None, :, None]) * qam.M + sym
    key = key.reshape(shape)
    best = score.min(axis=-1, keepdims=True)
    flat = np.where(score == best, key, np.iinfo(np.int64).max).min(axis=-1)
    a, rest = np.divmod(flat, nt * qam.M)
    b, s = np.divmod(rest, qam.M)
    return a, b, s


# ---------------------------------------------------------------------------
# single-interval transceivers
# ---------------------------------------------------------------------------

def _noise(noise: NoiseModel, rng):
    if not noise.enabled:
        return 0.0
    if rng is None:
        raise ValueError("an rng is required when noise is enabled")
    return complex(noise.sample(rng, ()))


def ris_classic_txrx(bits, realization: ChannelRealization, noise: NoiseModel, M: int,
                     rng: "np.random.Generator | None" = None) -> np.ndarray:
    qam = _qam(M)
    cw = encode_baseline(bits, Scheme.RIS, M)
    A = realization.effective_gain
    y = A * cw.symbol + _noise(noise, rng)
    s = int(qam.detect_exhaustive(np.array(y), np.array(A)))
    return _to_bits(M, 1, s)


def tsm_ris_txrx(bits, mimo: MimoChannelRealization, noise: NoiseModel, M: int, N_T: int,
                 rng: "np.random.Generator | None" = None) -> np.ndarray:
    qam = _qam(M)
    cw = encode_baseline(bits, Scheme.TSM_RIS, M, N_T)
    if mimo.N_T != N_T:
        raise ValueError("realization antenna count mismatch")
    B = mimo.B
    y = B[cw.antenna_index, cw.antenna_index] * cw.symbol + _noise(noise, rng)
    t, s = tsm_detect_exhaustive(y, np.real(np.diagonal(B)), qam)
    return _to_bits(M, N_T, int(s), int(t))


def tqsm_ris_txrx(bits, mimo: MimoChannelRealization, noise: NoiseModel, M: int, N_T: int,
                  rng: "np.random.Generator | None" = None) -> np.ndarray:
    qam = _qam(M)
    cw = encode_baseline(bits, Scheme.TQSM_RIS, M, N_T)
    if mimo.N_T != N_T:
        raise ValueError("realization antenna count mismatch")
    B = mimo.B
    a, b = cw.antenna_re, cw.antenna_im
    y = B[a, a] * cw.symbol.real + 1j * B[a, b] * cw.symbol.imag + _noise(noise, rng)
    ah, bh, s = tqsm_detect_exhaustive(y, B, qam)
    return _to_bits(M, N_T, int(s), int(ah), int(bh))


# ---------------------------------------------------------------------------
# batched path for the Monte Carlo engine
# ---------------------------------------------------------------------------

def simulate_block(config: SystemConfig, n0: float, rng: np.random.Generator, size: int,
                   noise: bool = True):
    """Per-trial ``(bit_errors, index_errors, degenerate)`` for a benchmark scheme."""
    scheme = config.scheme
    M, N_T, N = config.modulation_order, config.tx_antennas, config.ris_elements
    qam = _qam(M)
    nm = NoiseModel(n0, enabled=noise)
    if scheme is Scheme.RIS:
        bits = rng.integers(0, 2, size=(size, qam.bits), dtype=np.int8)
        h = complex_gaussian(rng, (size, N), config.sigma2)
        g = complex_gaussian(rng, (size, N), config.sigma2)
        A = effective_gains(h, g)
        s = bits_to_int(bits)
        y = A * qam.points[s] + nm.sample(rng, size)
        bits_hat = _to_bits(M, 1, qam.detect_sliced(y, A))
        return np.count_nonzero(bits_hat != bits, axis=-1), np.zeros(size, np.int64), A == 0

    na = log2_int(N_T)
    n_idx = 1 if scheme is Scheme.TSM_RIS else 2
    bits = rng.integers(0, 2, size=(size, qam.bits + n_idx * na), dtype=np.int8)
    H = complex_gaussian(rng, (size, N_T, N), config.sigma2)
    g = complex_gaussian(rng, (size, N), config.sigma2)
    rows = np.arange(size)
    s = bits_to_int(bits[:, : qam.bits])
    x = qam.points[s]
    if scheme is Scheme.TSM_RIS:
        t = bits_to_int(bits[:, qam.bits :])
        A = effective_gains(H, g[:, None, :])
        y = A[rows, t] * x + nm.sample(rng, size)
        t_hat, s_hat = tsm_detect(y, A, qam)
        bits_hat = _to_bits(M, N_T, s_hat, t_hat)
        idx_err = (t_hat != t).astype(np.int64)
        degenerate = A[rows, t] == 0
    elif scheme is Scheme.TQSM_RIS:
        a = bits_to_int(bits[:, qam.bits : qam.bits + na])
        b = bits_to_int(bits[:, qam.bits + na :])
        B = cross_gains(H, g)
        y = B[rows, a, a].real * x.real + 1j * B[rows, a, b] * x.imag + nm.sample(rng, size)
        a_hat, b_hat, s_hat = tqsm_detect(y, B, qam)
        bits_hat = _to_bits(M, N_T, s_hat, a_hat, b_hat)
        idx_err = (a_hat != a).astype(np.int64) + (b_hat != b)
        degenerate = B[rows, a, a].real == 0
    else:
        raise ConfigError("scheme", "CIM-RIS is not a baseline")
    return np.count_nonzero(bits_hat != bits, axis=-1), idx_err, degenerate
