"""All four schemes carrying the same 11 bits per interval over N = 32 elements.

Benchmark parameters come from the equal-u rule, so every curve moves the
same information per symbol.  Writes demo_out/schemes.csv and a figure.

    python demos/03_equal_rate_schemes.py [trials]
"""
import sys
from pathlib import Path

from cimris import mcengine, plotting
from cimris.params import Scheme, SystemConfig, equal_u_parameters

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
u, N = 11, 32
grid = tuple(range(-30, -13, 2))
out = Path("demo_out")
out.mkdir(exist_ok=True)

configs = [SystemConfig(scheme=Scheme.CIM_RIS, modulation_order=8, code_count=16, chip_count=32,
                        ris_elements=N, allow_rectangular=True, snr_grid=grid, trials_per_point=trials)]
for s in (Scheme.RIS, Scheme.TSM_RIS, Scheme.TQSM_RIS):
    configs.append(SystemConfig(scheme=s, ris_elements=N, allow_rectangular=True, snr_grid=grid,
                                trials_per_point=trials, **equal_u_parameters(s, u)))

text = ""
for i, cfg in enumerate(configs):
    assert cfg.bits_per_interval == u
    res = mcengine.sweep(cfg, target_errors=None)
    text += res.to_csv(header=(i == 0))
    print(f"{cfg.scheme.value:9} M={cfg.modulation_order:<5} N_T={cfg.tx_antennas:<3}",
          " ".join(f"{b:.1e}" for b in res.ber))
(out / "schemes.csv").write_text(text)
plotting.plot_curves(plotting.read_curves(out / "schemes.csv"), out / "schemes.svg",
                     title=f"u = {u}, N = {N}")
print("wrote", out / "schemes.csv", "and", out / "schemes.svg")
