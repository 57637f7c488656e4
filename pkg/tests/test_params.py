import pytest
from hypothesis import given, strategies as st

from cimris.params import (BitBudget, ConfigError, Scheme, SystemConfig, benchmark_bits,
                           config_from_mapping, derive_bit_budget, equal_u_parameters,
                           load_config_file, parse_snr_grid)
from cimris import txrx


def test_bit_budget_examples():
    assert derive_bit_budget(4, 16) == BitBudget(2, 4)
    assert derive_bit_budget(4, 16).u == 10
    assert derive_bit_budget(4, 2).u == 4


def test_non_square_rejected_with_field():
    with pytest.raises(ConfigError) as exc:
        derive_bit_budget(8, 16)
    assert exc.value.field == "m"
    assert derive_bit_budget(8, 16, allow_rectangular=True).u == 11


@pytest.mark.parametrize("L", [0, 1, 3, 12])
def test_bad_code_count(L):
    with pytest.raises(ConfigError) as exc:
        derive_bit_budget(4, L)
    assert exc.value.field == "l"


@pytest.mark.parametrize("scheme,M,NT,u", [("tsm-ris", 8, 4, 5), ("tqsm-ris", 8, 4, 7),
                                           ("ris", 4, 2, 2)])
def test_benchmark_bits(scheme, M, NT, u):
    assert benchmark_bits(scheme, M, NT) == u


def test_benchmark_bits_refuses_cim_ris():
    with pytest.raises(ConfigError):
        benchmark_bits(Scheme.CIM_RIS, 4, 2)


def test_rate_table_rows():
    for (NT, M, L), expected in {(2, 4, 8): (8, 3, 4, 2), (4, 8, 8): (9, 5, 7, 3),
                                 (8, 8, 16): (11, 6, 9, 3)}.items():
        got = (derive_bit_budget(M, L, allow_rectangular=True).u, benchmark_bits("tsm-ris", M, NT),
               benchmark_bits("tqsm-ris", M, NT), benchmark_bits("ris", M, NT))
        assert got == expected


@given(st.sampled_from([4, 16, 64, 256, 1024]), st.integers(1, 7))
def test_budget_matches_encoder_length(M, b):
    L = 2**b
    cfg = SystemConfig(modulation_order=M, code_count=L, chip_count=max(L, 2))
    bits = [0] * cfg.budget.u
    cw = txrx.encode(bits, cfg)
    assert len(cw.source_bits) == cfg.budget.u
    assert txrx.demap(cw.ell_re, cw.ell_im, cw.symbol_index, cfg).size == cfg.budget.u


def test_config_invariants():
    with pytest.raises(ConfigError) as exc:
        SystemConfig(code_count=64, chip_count=32)
    assert exc.value.field == "k"
    with pytest.raises(ConfigError):
        SystemConfig(master_seed=-1)
    with pytest.raises(ConfigError):
        SystemConfig(master_seed=2**64)
    assert SystemConfig(master_seed=2**64 - 1).master_seed == 2**64 - 1
    with pytest.raises(ConfigError):
        SystemConfig(snr_grid="0,-2")
    with pytest.raises(ConfigError) as exc:
        SystemConfig(scheme="qpsk")
    assert exc.value.field == "scheme"


def test_config_is_frozen():
    cfg = SystemConfig()
    with pytest.raises(Exception):
        cfg.modulation_order = 16


def test_snr_grid_parsing():
    assert len(parse_snr_grid("-40:2:0")) == 21
    assert parse_snr_grid("-40:2:0")[-1] == 0.0
    assert parse_snr_grid("1, 2,3") == (1.0, 2.0, 3.0)
    assert parse_snr_grid("0:0.1:0.3") == (0.0, 0.1, 0.2, 0.3)
    with pytest.raises(ConfigError):
        parse_snr_grid("0:-1:5")
    with pytest.raises(ConfigError):
        parse_snr_grid("a:b")


def test_mapping_and_file(tmp_path):
    cfg = config_from_mapping({"m": "16", "l": "8", "seed": str(2**63 + 1), "snr": "-10:5:0"})
    assert (cfg.modulation_order, cfg.code_count, cfg.master_seed) == (16, 8, 2**63 + 1)
    assert cfg.snr_grid == (-10.0, -5.0, 0.0)
    with pytest.raises(ConfigError) as exc:
        config_from_mapping({"bogus": 1})
    assert exc.value.field == "bogus"
    with pytest.raises(ConfigError) as exc:
        config_from_mapping({"trials": "many"})
    assert exc.value.field == "trials"
    p = tmp_path / "run.cfg"
    p.write_text("# comment\nm = 16\nl = 4\nscheme = cim-ris\nallow_rectangular = no\n")
    cfg = load_config_file(p)
    assert (cfg.modulation_order, cfg.code_count, cfg.allow_rectangular) == (16, 4, False)


@pytest.mark.parametrize("u", [8, 10, 11])
@pytest.mark.parametrize("scheme", ["ris", "tsm-ris", "tqsm-ris"])
def test_equal_u_parameters(scheme, u):
    p = equal_u_parameters(scheme, u)
    assert benchmark_bits(scheme, p["modulation_order"], p["tx_antennas"]) == u


def test_equal_u_figure_choices():
    assert equal_u_parameters("ris", 10)["modulation_order"] == 1024
    assert equal_u_parameters("tsm-ris", 11) == {"modulation_order": 32, "tx_antennas": 64}
    assert equal_u_parameters("tqsm-ris", 11) == {"modulation_order": 8, "tx_antennas": 16}
    assert equal_u_parameters("tsm-ris", 8) == {"modulation_order": 16, "tx_antennas": 16}
    assert equal_u_parameters("tqsm-ris", 8) == {"modulation_order": 4, "tx_antennas": 8}
