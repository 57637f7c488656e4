"""Render BER curve and surface CSVs to SVG.

Every plot is accompanied by a self-contained ``.py`` script that embeds
the data and redraws the figure with matplotlib alone.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BER_FLOOR = 1e-7
VALUE_COLUMNS = ("ber", "p_total")


class CsvFormatError(ValueError):
    def __init__(self, path, row: int, message: str):
        super().__init__(f"{path}: row {row}: {message}")
        self.row = row


@dataclass
class Curve:
    label: str
    snr_db: list = field(default_factory=list)
    ber: list = field(default_factory=list)


def _data_rows(path):
    """Yield (row_number, dict) pairs; row numbers count physical lines from 1."""
    with open(path, newline="", encoding="utf-8") as f:
        lines = list(enumerate(f, start=1))
    body = [(n, line) for n, line in lines if line.strip() and not line.lstrip().startswith("#")]
    if not body:
        raise CsvFormatError(path, 1, "no header row")
    header_n, header = body[0]
    columns = next(csv.reader([header]))
    if not any(c.strip() for c in columns):
        raise CsvFormatError(path, header_n, "empty header")
    for n, line in body[1:]:
        values = next(csv.reader([line]))
        if len(values) != len(columns):
            raise CsvFormatError(path, n, f"expected {len(columns)} fields, got {len(values)}")
        yield n, dict(zip(columns, values))


def _number(path, n, row, key) -> float:
    try:
        v = float(row[key])
    except KeyError:
        raise CsvFormatError(path, n, f"missing column {key!r}") from None
    except ValueError:
        raise CsvFormatError(path, n, f"column {key!r} is not a number: {row[key]!r}") from None
    if math.isnan(v):
        raise CsvFormatError(path, n, f"column {key!r} is NaN")
    return v


def read_curves(path) -> list[Curve]:
    curves: dict[str, Curve] = {}
    for n, row in _data_rows(path):
        key = next((k for k in VALUE_COLUMNS if k in row), None)
        if key is None or "snr_db" not in row:
            raise CsvFormatError(path, n, "need snr_db and one of " + ", ".join(VALUE_COLUMNS))
        label = row.get("scheme") or Path(path).stem
        c = curves.setdefault(label, Curve(label))
        c.snr_db.append(_number(path, n, row, "snr_db"))
        c.ber.append(_number(path, n, row, key))
    return list(curves.values())


def read_surface(path, x: str = "m", y: str = "l"):
    """Return (log2 x values, log2 y values, BER grid[y, x]) from a surface CSV."""
    cells = {}
    for n, row in _data_rows(path):
        xv, yv, b = (_number(path, n, row, k) for k in (x, y, "ber"))
        cells[(xv, yv)] = b
    xs = sorted({k[0] for k in cells})
    ys = sorted({k[1] for k in cells})
    grid = np.full((len(ys), len(xs)), np.nan)
    for (xv, yv), b in cells.items():
        grid[ys.index(yv), xs.index(xv)] = b
    return np.log2(xs), np.log2(ys), grid


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # stable element ids so identical data gives identical SVG bytes
    matplotlib.rcParams["svg.hashsalt"] = "cimris"

    return plt


def plot_curves(curves: list[Curve], out, title: str = "", floor: float = BER_FLOOR):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for c in curves:
        ax.semilogy(c.snr_db, np.maximum(c.ber, floor), marker="o", ms=3, label=c.label)
    ax.set_ylim(bottom=floor, top=1.0)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    write_curve_script(curves, Path(out).with_suffix(".py"), Path(out).name, title, floor)


def plot_surface(xs, ys, grid, out, xlabel="log2 M", ylabel="log2 L", title: str = ""):
    plt = _pyplot()
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    X, Y = np.meshgrid(xs, ys)
    ax.plot_surface(X, Y, np.log10(np.maximum(grid, BER_FLOOR)), cmap="viridis")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_zlabel("log10 BER")
    if title:
        ax.set_title(title)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    write_surface_script(xs, ys, grid, Path(out).with_suffix(".py"), Path(out).name,
                         xlabel, ylabel, title)


_CURVE_SCRIPT = '''from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

FLOOR = {floor!r}
CURVES = {curves!r}

fig, ax = plt.subplots(figsize=(6, 4.5))
for label, snr, ber in CURVES:
    ax.semilogy(snr, np.maximum(ber, FLOOR), marker="o", ms=3, label=label)
ax.set_ylim(bottom=FLOOR, top=1.0)
ax.set_xlabel("SNR (dB)")
ax.set_ylabel("BER")
ax.set_title({title!r})
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(Path(__file__).with_name({target!r}))
'''

_SURFACE_SCRIPT = '''from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

X_VALUES = {xs!r}
Y_VALUES = {ys!r}
BER = np.array({grid!r})

fig = plt.figure(figsize=(6, 5))
ax = fig.add_subplot(projection="3d")
X, Y = np.meshgrid(X_VALUES, Y_VALUES)
ax.plot_surface(X, Y, np.log10(np.maximum(BER, {floor!r})), cmap="viridis")
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
ax.set_zlabel("log10 BER")
ax.set_title({title!r})
fig.savefig(Path(__file__).with_name({target!r}))
'''


def write_curve_script(curves, path, target, title="", floor=BER_FLOOR):
    data = [(c.label, list(map(float, c.snr_db)), list(map(float, c.ber))) for c in curves]
    Path(path).write_text(_CURVE_SCRIPT.format(floor=floor, curves=data, title=title,
                                               target=str(target)), encoding="utf-8")


def write_surface_script(xs, ys, grid, path, target, xlabel, ylabel, title=""):
    Path(path).write_text(_SURFACE_SCRIPT.format(
        xs=[float(v) for v in xs], ys=[float(v) for v in ys],
        grid=[[float(v) for v in row] for row in np.asarray(grid)], floor=BER_FLOOR,
        xlabel=xlabel, ylabel=ylabel, title=title, target=str(target)), encoding="utf-8")
