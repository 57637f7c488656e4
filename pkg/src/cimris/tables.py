"""Energy-saving, complexity and data-rate comparison tables."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .analysis import complexity_rms, energy_saving_percent
from .params import Scheme, benchmark_bits, derive_bit_budget, log2_int

BENCHMARKS = (Scheme.RIS, Scheme.TSM_RIS, Scheme.TQSM_RIS)

# default parameter rows: (M, N_T, n_rf, L), (M, N_T, L, K, N), (N_T, M, L)
ENERGY_ROWS = ((4, 2, 2, 4), (8, 8, 4, 16), (32, 16, 6, 32))
COMPLEXITY_ROWS = ((8, 4, 8, 16, 64), (16, 8, 16, 32, 256))
RATE_ROWS = ((2, 4, 8), (4, 8, 8), (8, 8, 16))


@dataclass
class Table:
    name: str
    columns: tuple
    rows: list

    def to_text(self) -> str:
        cells = [list(self.columns)] + [[_fmt(v) for v in r] for r in self.rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(self.columns))]
        lines = [self.name]
        for n, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
            if n == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.1f}"
    return str(v)


def cim_ris_bits(M: int, L: int) -> int:
    return derive_bit_budget(M, L, allow_rectangular=True).u


def energy_row(M: int, N_T: int, n_rf: int, L: int) -> tuple:
    # n_rf is carried for display; the saving depends only on bit counts
    u = cim_ris_bits(M, L)
    savings = tuple(round(energy_saving_percent(u, benchmark_bits(s, M, N_T)), 1) for s in BENCHMARKS)
    return (M, N_T, n_rf, L) + savings


def complexity_row(M: int, N_T: int, L: int, K: int, N: int) -> tuple:
    u2 = log2_int(L)
    values = [int(round(complexity_rms(Scheme.CIM_RIS, M, N, N_T, K, L, u2)))]
    values += [round(complexity_rms(s, M, N, N_T, K, L, u2), 1) for s in BENCHMARKS]
    return (M, N_T, L, K, N, *values)


def rate_row(N_T: int, M: int, L: int) -> tuple:
    return (N_T, M, L, cim_ris_bits(M, L), benchmark_bits(Scheme.TSM_RIS, M, N_T),
            benchmark_bits(Scheme.TQSM_RIS, M, N_T), benchmark_bits(Scheme.RIS, M, N_T))


def energy_table(rows=ENERGY_ROWS) -> Table:
    return Table("energy saving of CIM-RIS, percent",
                 ("M", "N_T", "n_rf", "L", "RIS", "TSM-RIS", "TQSM-RIS"),
                 [energy_row(*r) for r in rows])


def complexity_table(rows=COMPLEXITY_ROWS) -> Table:
    return Table("detector complexity, real multiplications",
                 ("M", "N_T", "L", "K", "N", "CIM-RIS", "RIS", "TSM-RIS", "TQSM-RIS"),
                 [complexity_row(*r) for r in rows])


def rate_table(rows=RATE_ROWS) -> Table:
    return Table("data rate, bits per symbol interval",
                 ("N_T", "M", "L", "CIM-RIS", "TSM-RIS", "TQSM-RIS", "RIS"),
                 [rate_row(*r) for r in rows])


def all_tables(energy=ENERGY_ROWS, complexity=COMPLEXITY_ROWS, rate=RATE_ROWS) -> dict:
    return {"energy": energy_table(energy), "complexity": complexity_table(complexity),
            "rate": rate_table(rate)}
