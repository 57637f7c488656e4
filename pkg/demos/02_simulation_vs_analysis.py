"""Monte Carlo BER of CIM-RIS next to both analytical models.

The "printed" model evaluates the closed forms literally; the
"consistent" model uses real-branch order statistics averaged over the
aligned-gain law.  Writes demo_out/analysis.svg.

    python demos/02_simulation_vs_analysis.py [trials]
"""
import sys
from pathlib import Path

from cimris import analysis, mcengine, plotting
from cimris.params import Scheme, SystemConfig

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
out = Path("demo_out")
out.mkdir(exist_ok=True)

cfg = SystemConfig(scheme=Scheme.CIM_RIS, modulation_order=4, code_count=16, chip_count=32,
                   ris_elements=64, snr_grid=tuple(range(-38, -23, 2)), trials_per_point=trials)
sim = mcengine.sweep(cfg, target_errors=None)

curves = [plotting.Curve("simulation", list(sim.snr_db), list(sim.ber))]
print(f"{'SNR':>5} {'sim':>10} {'printed':>10} {'consistent':>10}")
rows = {m: analysis.aber_curve(cfg, model=m) for m in analysis.MODELS}
for j, p in enumerate(sim.points):
    print(f"{p.snr_db:5g} {p.ber:10.3e} {rows['printed'][j]['p_total']:10.3e} "
          f"{rows['consistent'][j]['p_total']:10.3e}")
for m, r in rows.items():
    curves.append(plotting.Curve(f"analysis ({m})", [x["snr_db"] for x in r], [x["p_total"] for x in r]))

plotting.plot_curves(curves, out / "analysis.svg", title="CIM-RIS, M=4, L=16, N=64")
print("wrote", out / "analysis.svg")
