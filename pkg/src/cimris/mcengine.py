"""Monte Carlo BER estimation over SNR grids.

Randomness is counter-based: trials are grouped in fixed blocks of
:data:`BLOCK_SIZE`, and block ``b`` of grid point ``j`` draws from a Philox
stream keyed by ``(master_seed, scheme, j, b)``.  Trial ``i`` therefore
always sees the same numbers no matter how blocks are spread over workers,
and counts are merged by block index.
"""
from __future__ import annotations

import io
import math
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import baselines, txrx
from .codes import walsh_codes
from .params import ConfigError, Scheme, SystemConfig

BLOCK_SIZE = 4096
CSV_SCHEMA = "# cimris ber-sweep v1"
CSV_COLUMNS = ("scheme", "snr_db", "trials", "bit_errors", "ber", "index_errors")

BlockFn = Callable[[SystemConfig, float, np.random.Generator, int, bool], tuple]


def noise_variance_for_snr(snr_db: float, u: int, E_s: float = 1.0) -> float:
    """N_0 for SNR = E_b/N_0 in dB, with E_b = E_s / u."""
    return (E_s / u) / 10.0 ** (snr_db / 10.0)


def substream(master_seed: int, scheme: Scheme, point: int, block: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(master_seed),
                                 spawn_key=(Scheme.parse(scheme).code, int(point), int(block)))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    trials: int
    bit_errors: int
    bits_per_interval: int
    index_errors: int = 0
    degenerate: int = 0

    @property
    def symbol_intervals(self) -> int:
        return self.trials

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.bits_per_interval)

    def std_error(self) -> float:
        n = self.trials * self.bits_per_interval
        p = self.ber
        return math.sqrt(max(p * (1 - p), 0.0) / n)


@dataclass
class SweepResult:
    config: SystemConfig
    points: list
    seed: int
    wall_time: float = 0.0
    workers: int = 1

    def __post_init__(self):
        snrs = [p.snr_db for p in self.points]
        if any(b <= a for a, b in zip(snrs, snrs[1:])):
            raise ValueError("SNR values must be strictly increasing")

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])

    def csv_rows(self) -> list[list[str]]:
        name = self.config.scheme.value
        return [[name, f"{p.snr_db:g}", str(p.trials), str(p.bit_errors), f"{p.ber:.10e}",
                 str(p.index_errors)] for p in self.points]

    def to_csv(self, path: "str | Path | None" = None, header: bool = True) -> str:
        buf = io.StringIO()
        if header:
            buf.write(CSV_SCHEMA + "\n")
            buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.csv_rows():
            buf.write(",".join(row) + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


_CODE_CACHE: dict = {}


def default_block(config: SystemConfig, n0: float, rng: np.random.Generator, size: int,
                  noise: bool = True):
    if config.scheme is Scheme.CIM_RIS:
        key = (config.code_count, config.chip_count)
        if key not in _CODE_CACHE:
            _CODE_CACHE[key] = walsh_codes(*key)
        return txrx.simulate_block(config, _CODE_CACHE[key], n0, rng, size, noise)
    return baselines.simulate_block(config, n0, rng, size, noise)


def _run_block(config: SystemConfig, point: int, snr_db: float, block: int, size: int,
               noise: bool, block_fn: "BlockFn | None" = None):
    rng = substream(config.master_seed, config.scheme, point, block)
    n0 = noise_variance_for_snr(snr_db, config.bits_per_interval)
    bit_err, idx_err, degenerate = (block_fn or default_block)(config, n0, rng, size, noise)
    return int(np.sum(bit_err)), int(np.sum(idx_err)), int(np.sum(degenerate))


def _block_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def run_point(config: SystemConfig, snr_db: float, *, scheme: "Scheme | str | None" = None,
              point_index: int = 0, trials: "int | None" = None,
              target_errors: "int | None" = ..., noise: bool = True,
              executor: "Executor | None" = None, block_fn: "BlockFn | None" = None) -> BerPoint:
    """Estimate the BER at one SNR.

    With ``target_errors`` set, the point stops after the shortest prefix
    of blocks whose bit errors reach the target; the prefix does not
    depend on how many workers evaluated the blocks.
    """
    if scheme is not None:
        config = config.with_(scheme=Scheme.parse(scheme))
    trials = config.trials_per_point if trials is None else trials
    target = config.target_errors if target_errors is ... else target_errors
    sizes = _block_sizes(trials)
    wave = getattr(executor, "_max_workers", 1) if executor is not None else 1
    if target is None:
        wave = len(sizes)

    bit_errors = index_errors = degenerate = used = 0
    for start in range(0, len(sizes), wave):
        batch = list(range(start, min(start + wave, len(sizes))))
        args = [(config, point_index, snr_db, b, sizes[b], noise, block_fn) for b in batch]
        if executor is None:
            results = [_run_block(*a) for a in args]
        else:
            results = list(executor.map(_run_block, *zip(*args)))
        for b, (be, ie, dg) in zip(batch, results):
            bit_errors += be
            index_errors += ie
            degenerate += dg
            used += sizes[b]
            if target is not None and bit_errors >= target:
                return BerPoint(float(snr_db), used, bit_errors, config.bits_per_interval,
                                index_errors, degenerate)
    return BerPoint(float(snr_db), used, bit_errors, config.bits_per_interval,
                    index_errors, degenerate)


def sweep(config: SystemConfig, *, workers: int = 1, noise: bool = True,
          target_errors: "int | None" = ..., snr_grid: "Sequence[float] | None" = None,
          block_fn: "BlockFn | None" = None) -> SweepResult:
    grid = tuple(config.snr_grid if snr_grid is None else snr_grid)
    if not grid:
        raise ConfigError("snr", "empty SNR grid")
    t0 = time.perf_counter()
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        points = [run_point(config, snr, point_index=j, target_errors=target_errors, noise=noise,
                            executor=executor, block_fn=block_fn)
                  for j, snr in enumerate(grid)]
    finally:
        if executor is not None:
            executor.shutdown()
    return SweepResult(config, points, config.master_seed, time.perf_counter() - t0, workers)


def snr_at_ber(result: "SweepResult | tuple", target: float) -> float:
    """SNR (dB) where the curve first crosses ``target``, log-linear interpolation."""
    if isinstance(result, SweepResult):
        snr, ber = result.snr_db, result.ber
    else:
        snr, ber = (np.asarray(v, dtype=float) for v in result)
    for i in range(len(snr) - 1):
        b0, b1 = ber[i], ber[i + 1]
        if b0 >= target > b1:
            if b1 <= 0:
                return float(snr[i + 1])
            f = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return float(snr[i] + f * (snr[i + 1] - snr[i]))
    raise ValueError(f"curve does not cross BER={target:g}")


SURFACE_SCHEMA = "# cimris ber-surface v1"
SURFACE_COLUMNS = ("scheme", "m", "l", "n", "snr_db", "trials", "bit_errors", "ber", "index_errors")


@dataclass(frozen=True)
class SurfaceCell:
    modulation_order: int
    code_count: int
    ris_elements: int
    point: BerPoint


def surface_sweep(config: SystemConfig, m_values=None, l_values=None, n_values=None, *,
                  workers: int = 1, target_errors: "int | None" = ...) -> list[SurfaceCell]:
    """BER over a (M, L, N) grid at every SNR of ``config.snr_grid``.

    Cell ``c`` at grid point ``j`` uses point index ``c * len(grid) + j`` so
    every (cell, SNR) pair owns its random substreams.
    """
    ms = tuple(m_values or (config.modulation_order,))
    ls = tuple(l_values or (config.code_count,))
    ns = tuple(n_values or (config.ris_elements,))
    grid = config.snr_grid
    if not grid:
        raise ConfigError("snr", "empty SNR grid")
    cells = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        c = 0
        for m in ms:
            for l in ls:
                for n in ns:
                    cfg = config.with_(modulation_order=m, code_count=l, ris_elements=n)
                    for j, snr in enumerate(grid):
                        pt = run_point(cfg, snr, point_index=c * len(grid) + j,
                                       target_errors=target_errors, executor=executor)
                        cells.append(SurfaceCell(m, l, n, pt))
                    c += 1
    finally:
        if executor is not None:
            executor.shutdown()
    return cells


def surface_csv(cells: Sequence[SurfaceCell], scheme: Scheme, path=None) -> str:
    lines = [SURFACE_SCHEMA, ",".join(SURFACE_COLUMNS)]
    for cell in cells:
        p = cell.point
        lines.append(",".join([scheme.value, str(cell.modulation_order), str(cell.code_count),
                               str(cell.ris_elements), f"{p.snr_db:g}", str(p.trials),
                               str(p.bit_errors), f"{p.ber:.10e}", str(p.index_errors)]))
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
