"""Scheme configuration, validation and bit-budget arithmetic.

Every other module reads a validated, frozen :class:`SystemConfig`.
Configuration files are flat ``key = value`` text; the keys are the same as
the CLI flags (see :data:`CONFIG_KEYS`).
"""
from __future__ import annotations

import configparser
import enum
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending parameter."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class Scheme(str, enum.Enum):
    CIM_RIS = "cim-ris"
    RIS = "ris"
    TSM_RIS = "tsm-ris"
    TQSM_RIS = "tqsm-ris"

    @classmethod
    def parse(cls, value: "str | Scheme") -> "Scheme":
        if isinstance(value, Scheme):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise ConfigError("scheme", f"unknown scheme {value!r}")

    @property
    def code(self) -> int:
        """Stable small integer used when deriving random substreams."""
        return list(Scheme).index(self)


def is_power_of_two(x: int) -> bool:
    return isinstance(x, (int, np.integer)) and x >= 1 and (x & (x - 1)) == 0


def is_power_of_four(x: int) -> bool:
    return is_power_of_two(x) and (int(x).bit_length() - 1) % 2 == 0


def log2_int(x: int) -> int:
    return int(x).bit_length() - 1


@dataclass(frozen=True)
class BitBudget:
    u1: int
    u2: int

    @property
    def u(self) -> int:
        return self.u1 + 2 * self.u2


def derive_bit_budget(M: int, L: int, *, allow_rectangular: bool = False) -> BitBudget:
    """Split of the u bits of one CIM-RIS symbol interval.

    ``u1 = log2(M)`` bits select the QAM symbol and ``u2 = log2(L)`` bits
    select each of the two (in-phase, quadrature) spreading-code indices.

    Non-square (rectangular) M is refused unless ``allow_rectangular`` is
    set; that path exists for simulation only.
    """
    if allow_rectangular:
        if not is_power_of_two(M) or M < 4:
            raise ConfigError("m", f"M={M} must be a power of two >= 4")
    elif not is_power_of_four(M) or M < 4:
        raise ConfigError("m", f"M={M} is not a square QAM order (4, 16, 64, ...)")
    if not is_power_of_two(L) or L < 2:
        raise ConfigError("l", f"L={L} must be a power of two >= 2")
    return BitBudget(u1=log2_int(M), u2=log2_int(L))


def benchmark_bits(scheme: "Scheme | str", M: int, N_T: int) -> int:
    """Bits per symbol interval carried by one of the benchmark schemes."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.CIM_RIS:
        raise ConfigError("scheme", "CIM-RIS bit count comes from derive_bit_budget")
    if not is_power_of_two(M) or M < 2:
        raise ConfigError("m", f"M={M} must be a power of two")
    if not is_power_of_two(N_T):
        raise ConfigError("nt", f"N_T={N_T} must be a power of two")
    if scheme is Scheme.RIS:
        return log2_int(M)
    if scheme is Scheme.TSM_RIS:
        return log2_int(M) + log2_int(N_T)
    return log2_int(M) + 2 * log2_int(N_T)


def parse_snr_grid(text: "str | Iterable[float]") -> tuple[float, ...]:
    """``"start:step:stop"`` (inclusive) or a comma-separated list, in dB."""
    if not isinstance(text, str):
        return tuple(float(v) for v in text)
    text = text.strip()
    try:
        if ":" in text:
            start, step, stop = (float(p) for p in text.split(":"))
            if step == 0 or (stop - start) / step < 0:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return tuple(round(start + i * step, 10) for i in range(count))
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError("snr", f"cannot parse SNR grid {text!r}") from None


@dataclass(frozen=True)
class SystemConfig:
    scheme: Scheme = Scheme.CIM_RIS
    modulation_order: int = 4
    code_count: int = 16
    chip_count: int = 32
    ris_elements: int = 64
    tx_antennas: int = 2
    snr_grid: tuple = parse_snr_grid("-40:2:0")
    trials_per_point: int = 100_000
    master_seed: int = 0
    sigma2: float = 1.0
    # early stop once this many bit errors are seen; None runs every trial
    target_errors: "int | None" = None
    # simulation-only: rectangular QAM (M_I != M_Q) for odd log2(M)
    allow_rectangular: bool = False
    n_rf: "int | None" = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        object.__setattr__(self, "snr_grid", parse_snr_grid(self.snr_grid))
        self.validate()

    def validate(self) -> None:
        M, L, K = self.modulation_order, self.code_count, self.chip_count
        if self.scheme is Scheme.CIM_RIS:
            derive_bit_budget(M, L, allow_rectangular=self.allow_rectangular)
            if not is_power_of_two(K) or K < L:
                raise ConfigError("k", f"K={K} must be a power of two >= L={L}")
        else:
            if not is_power_of_two(M) or M < 4:
                raise ConfigError("m", f"M={M} must be a power of two >= 4")
            if not is_power_of_four(M) and not self.allow_rectangular:
                raise ConfigError("m", f"M={M} is rectangular; set allow_rectangular")
            if not is_power_of_two(self.tx_antennas):
                raise ConfigError("nt", f"N_T={self.tx_antennas} must be a power of two")
        if not isinstance(self.ris_elements, (int, np.integer)) or self.ris_elements < 1:
            raise ConfigError("n", f"N={self.ris_elements} must be a positive integer")
        if self.trials_per_point < 1:
            raise ConfigError("trials", "must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if not self.sigma2 > 0:
            raise ConfigError("sigma2", "must be positive")
        if self.target_errors is not None and self.target_errors < 1:
            raise ConfigError("target_errors", "must be >= 1 or unset")
        if any(not math.isfinite(s) for s in self.snr_grid):
            raise ConfigError("snr", "SNR values must be finite")
        if any(b <= a for a, b in zip(self.snr_grid, self.snr_grid[1:])):
            raise ConfigError("snr", "SNR values must be strictly increasing")

    @property
    def budget(self) -> BitBudget:
        return derive_bit_budget(self.modulation_order, self.code_count,
                                 allow_rectangular=self.allow_rectangular)

    @property
    def bits_per_interval(self) -> int:
        if self.scheme is Scheme.CIM_RIS:
            return self.budget.u
        return benchmark_bits(self.scheme, self.modulation_order, self.tx_antennas)

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scheme"] = self.scheme.value
        d["snr_grid"] = list(self.snr_grid)
        return d


# config-file key / CLI flag -> SystemConfig field
CONFIG_KEYS = {
    "scheme": "scheme",
    "m": "modulation_order",
    "l": "code_count",
    "k": "chip_count",
    "n": "ris_elements",
    "nt": "tx_antennas",
    "snr": "snr_grid",
    "trials": "trials_per_point",
    "seed": "master_seed",
    "sigma2": "sigma2",
    "target_errors": "target_errors",
    "allow_rectangular": "allow_rectangular",
    "n_rf": "n_rf",
}

_INT_FIELDS = {"modulation_order", "code_count", "chip_count", "ris_elements",
               "tx_antennas", "trials_per_point", "master_seed", "n_rf", "target_errors"}


def _coerce(field_name: str, raw):
    if raw is None:
        return None
    if field_name in _INT_FIELDS:
        if isinstance(raw, str) and raw.strip().lower() in ("", "none", "off"):
            return None
        try:
            return int(raw)
        except (TypeError, ValueError):
            pass
        try:
            as_float = float(raw)
            if not as_float.is_integer():
                raise ValueError
            return int(as_float)
        except (TypeError, ValueError):
            key = next(k for k, v in CONFIG_KEYS.items() if v == field_name)
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    if field_name == "sigma2":
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError("sigma2", f"expected a number, got {raw!r}") from None
    if field_name == "allow_rectangular":
        if isinstance(raw, bool):
            return raw
        return str(raw).strip().lower() in ("1", "true", "yes", "on")
    return raw


def config_from_mapping(values: Mapping, base: "SystemConfig | None" = None) -> SystemConfig:
    """Build a config from short keys (``m``, ``l``, ...) or field names."""
    changes = {}
    fields = set(CONFIG_KEYS.values())
    for key, raw in values.items():
        if raw is None:
            continue
        name = CONFIG_KEYS.get(key, key)
        if name not in fields:
            raise ConfigError(key, "unknown configuration key")
        changes[name] = _coerce(name, raw)
    base = base or SystemConfig()
    try:
        return replace(base, **changes)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


def read_config_values(path: "str | Path") -> dict:
    """Raw ``key = value`` pairs of a config file; a section header is optional."""
    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text if text.lstrip().startswith("[") else "[cimris]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("config", f"{path}: {exc}") from None
    values = {}
    for section in parser.sections():
        values.update(parser[section])
    return values


def load_config_file(path: "str | Path", base: "SystemConfig | None" = None) -> SystemConfig:
    return config_from_mapping(read_config_values(path), base)


def equal_u_parameters(scheme: "Scheme | str", u: int) -> dict:
    """Benchmark (M, N_T) carrying exactly ``u`` bits per symbol interval.

    RIS puts every bit on the QAM symbol. TSM-RIS gives ceil(u/2) bits to
    the antenna index; TQSM-RIS keeps 2 (u even) or 3 (u odd) bits on the
    symbol and splits the rest over the two antenna indices.
    """
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.CIM_RIS:
        raise ConfigError("scheme", "CIM-RIS bit split is set by M and L")
    if u < 2:
        raise ConfigError("equal_u", f"u={u} too small")
    if scheme is Scheme.RIS:
        return {"modulation_order": 2**u, "tx_antennas": 1}
    if scheme is Scheme.TSM_RIS:
        b_ant = (u + 1) // 2
        return {"modulation_order": 2 ** (u - b_ant), "tx_antennas": 2**b_ant}
    b_sym = 2 if u % 2 == 0 else 3
    if u - b_sym < 2:
        raise ConfigError("equal_u", f"u={u} too small for TQSM-RIS")
    return {"modulation_order": 2**b_sym, "tx_antennas": 2 ** ((u - b_sym) // 2)}
