"""``cimris`` command-line front end.

Exit status: 0 success, 1 runtime failure, 2 usage or configuration error.
Each run writes ``<subcommand>.manifest.json`` next to its outputs; passing
it back through ``--manifest`` repeats the run with the recorded arguments.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, analysis, mcengine, plotting, tables
from .params import (ConfigError, Scheme, SystemConfig, config_from_mapping,
                     equal_u_parameters, is_power_of_four, parse_snr_grid, read_config_values)

ANALYSIS_SCHEMA = "# cimris aber v1"
ANALYSIS_COLUMNS = ("scheme", "snr_db", "p_ci", "p_sc", "p_m", "p_mod", "p_total")
COMPARE_SCHEMA = "# cimris aber-compare v1"
COMPARE_COLUMNS = ("snr_db", "sim_ber", "p_total", "ratio")

# argparse dest -> config key
_CONFIG_FLAGS = {"m": "m", "l": "l", "k": "k", "n": "n", "nt": "nt", "snr": "snr",
                 "trials": "trials", "seed": "seed", "sigma2": "sigma2",
                 "target_errors": "target_errors", "allow_rectangular": "allow_rectangular",
                 "n_rf": "n_rf"}
_NOT_RECORDED = {"func", "manifest"}


def _int_list(field_name: str, text: "str | None"):
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(field_name, f"expected comma-separated integers, got {text!r}") from None


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("system configuration")
    g.add_argument("--config", help="flat key = value file; flags override it")
    g.add_argument("--scheme", help="cim-ris, ris, tsm-ris or tqsm-ris")
    g.add_argument("--m", type=int, help="QAM order")
    g.add_argument("--l", type=int, help="spreading codes per branch")
    g.add_argument("--k", type=int, help="chips per symbol interval")
    g.add_argument("--n", type=int, help="RIS elements")
    g.add_argument("--nt", type=int, help="transmit antennas (benchmarks)")
    g.add_argument("--n-rf", type=int, help="RF chains (recorded only)")
    g.add_argument("--snr", help="start:step:stop or comma list, dB")
    g.add_argument("--trials", type=int, help="symbol intervals per SNR point")
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--sigma2", type=float, help="channel coefficient variance")
    g.add_argument("--target-errors", type=int, help="stop a point after this many bit errors")
    g.add_argument("--allow-rectangular", action="store_true", default=None,
                   help="permit rectangular QAM (odd log2 M)")


def _add_common(p: argparse.ArgumentParser, out_default: str):
    p.add_argument("--out", default=out_default, help="output location")
    p.add_argument("--manifest", help="repeat the run recorded in this manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cimris", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cimris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo BER sweep")
    _add_config_flags(p)
    p.add_argument("--schemes", help="comma list of schemes, one sweep each")
    p.add_argument("--equal-u", type=int, help="pick benchmark M and N_T to carry this many bits")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--surface-m", help="comma list of M values for a surface sweep")
    p.add_argument("--surface-l", help="comma list of L values for a surface sweep")
    p.add_argument("--surface-n", help="comma list of N values for a surface sweep")
    _add_common(p, "cimris-out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="analytical ABER of CIM-RIS")
    _add_config_flags(p)
    p.add_argument("--model", choices=analysis.MODELS, default="printed")
    p.add_argument("--compare-sim", help="simulation CSV to join on snr_db")
    _add_common(p, "cimris-out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tables", help="energy, complexity and data-rate tables")
    p.add_argument("--energy-row", action="append", default=[], metavar="M,NT,NRF,L")
    p.add_argument("--complexity-row", action="append", default=[], metavar="M,NT,L,K,N")
    p.add_argument("--rate-row", action="append", default=[], metavar="NT,M,L")
    p.add_argument("--no-defaults", action="store_true", help="only the user-supplied rows")
    _add_common(p, "cimris-out")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("plot", help="render BER CSVs to SVG")
    p.add_argument("inputs", nargs="+", help="curve or surface CSV files")
    p.add_argument("--surface", action="store_true", help="3D surface over log2 of two columns")
    p.add_argument("--x", default="m", help="surface x column")
    p.add_argument("--y", default="l", help="surface y column")
    p.add_argument("--title", default="")
    _add_common(p, "ber.svg")
    p.set_defaults(func=cmd_plot)
    return parser


# ---------------------------------------------------------------------------
# configuration resolution
# ---------------------------------------------------------------------------

def _config_values(args) -> dict:
    values = dict(read_config_values(args.config)) if getattr(args, "config", None) else {}
    for dest, key in _CONFIG_FLAGS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[key] = v
    return values


def _schemes(args, values) -> list[Scheme]:
    raw = getattr(args, "schemes", None) or args.scheme or values.get("scheme") or "cim-ris"
    return [Scheme.parse(s) for s in str(raw).split(",") if s.strip()]


def resolve_configs(args) -> list[SystemConfig]:
    values = _config_values(args)
    configs = []
    for scheme in _schemes(args, values):
        v = dict(values, scheme=scheme)
        u = getattr(args, "equal_u", None)
        if u is not None and scheme is not Scheme.CIM_RIS:
            v.update(m=None, nt=None)
            eq = equal_u_parameters(scheme, u)
            v["modulation_order"], v["tx_antennas"] = eq["modulation_order"], eq["tx_antennas"]
            if not is_power_of_four(eq["modulation_order"]):
                v["allow_rectangular"] = True
        cfg = config_from_mapping(v)
        if u is not None and cfg.bits_per_interval != u:
            raise ConfigError("equal_u", f"{scheme.value} carries {cfg.bits_per_interval} bits, not {u}")
        configs.append(cfg)
    return configs


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

def _recorded_args(args) -> dict:
    """Arguments with any config-file values inlined, so the file is not needed again."""
    rec = {k: v for k, v in vars(args).items() if k not in _NOT_RECORDED}
    if rec.get("config"):
        for key, value in read_config_values(rec["config"]).items():
            dest = key.replace("-", "_")
            if dest in rec and rec[dest] is None:
                rec[dest] = value
        rec["config"] = None
    return dict(sorted(rec.items()))


def write_manifest(args, out_dir: Path, outputs: list, configs=()) -> Path:
    manifest = {
        "tool": "cimris",
        "version": __version__,
        "subcommand": args.command,
        "args": _recorded_args(args),
        "configs": [c.to_dict() for c in configs],
        "seed": configs[0].master_seed if configs else None,
        "outputs": [str(p) for p in outputs],
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    path = out_dir / f"{args.command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _apply_manifest(parser: argparse.ArgumentParser, argv, args):
    """Fill every flag not given on the command line from the manifest."""
    data = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    if data.get("subcommand") != args.command:
        raise ConfigError("manifest", f"records {data.get('subcommand')!r}, not {args.command!r}")
    defaults = vars(parser.parse_args([args.command] + _required_positionals(args)))
    for key, value in data.get("args", {}).items():
        if key in _NOT_RECORDED or key == "command":
            continue
        if getattr(args, key, None) == defaults.get(key):
            setattr(args, key, value)
    return args


def _required_positionals(args) -> list:
    return list(args.inputs) if args.command == "plot" else []


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    configs = resolve_configs(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    surface = [_int_list(f, getattr(args, f)) for f in ("surface_m", "surface_l", "surface_n")]
    if any(s is not None for s in surface):
        if len(configs) != 1 or configs[0].scheme is not Scheme.CIM_RIS:
            raise ConfigError("scheme", "surface sweeps run a single cim-ris configuration")
        cfg = configs[0]
        # validate every cell before spending time on any of them
        for m in surface[0] or (cfg.modulation_order,):
            for l in surface[1] or (cfg.code_count,):
                cfg.with_(modulation_order=m, code_count=l)
        cells = mcengine.surface_sweep(cfg, *surface, workers=args.workers)
        path = out_dir / "ber_surface.csv"
        mcengine.surface_csv(cells, cfg.scheme, path)
        print(f"wrote {path} ({len(cells)} cells)")
    else:
        path = out_dir / "ber.csv"
        text = ""
        for n, cfg in enumerate(configs):
            result = mcengine.sweep(cfg, workers=args.workers)
            text += result.to_csv(header=(n == 0))
            for p in result.points:
                print(f"{cfg.scheme.value:9s} snr={p.snr_db:7.2f} dB  ber={p.ber:.4e}  "
                      f"errors={p.bit_errors}/{p.trials * p.bits_per_interval}")
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")
    write_manifest(args, out_dir, [path], configs)
    return 0


def _fmt(v: float) -> str:
    return f"{v:.10e}"


def cmd_analyze(args) -> int:
    configs = resolve_configs(args)
    if any(c.scheme is not Scheme.CIM_RIS for c in configs):
        raise ConfigError("scheme", "analytical ABER is available for cim-ris only")
    cfg = configs[0]
    if not is_power_of_four(cfg.modulation_order):
        raise ConfigError("m", f"analytical path needs square QAM, got M={cfg.modulation_order}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = analysis.aber_curve(cfg, model=args.model)
    lines = [ANALYSIS_SCHEMA, ",".join(ANALYSIS_COLUMNS)]
    for r in rows:
        lines.append(",".join([r["scheme"], f"{r['snr_db']:g}"]
                              + [_fmt(r[k]) for k in ANALYSIS_COLUMNS[2:]]))
        print(f"snr={r['snr_db']:7.2f} dB  p_ci={r['p_ci']:.4e}  p_m={r['p_m']:.4e}  "
              f"p_total={r['p_total']:.4e}")
    path = out_dir / "aber.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    outputs = [path]
    if args.compare_sim:
        outputs.append(_write_comparison(rows, args.compare_sim, out_dir / "compare.csv"))
    write_manifest(args, out_dir, outputs, configs)
    return 0


def _write_comparison(rows, sim_path, path: Path) -> Path:
    sim = {}
    for curve in plotting.read_curves(sim_path):
        if curve.label in ("cim-ris", Path(sim_path).stem):
            sim.update({round(s, 9): b for s, b in zip(curve.snr_db, curve.ber)})
    if not sim:
        raise ValueError(f"{sim_path}: no cim-ris rows")
    lines = [COMPARE_SCHEMA, ",".join(COMPARE_COLUMNS)]
    for r in rows:
        key = round(r["snr_db"], 9)
        if key not in sim:
            continue
        sb, pt = sim[key], r["p_total"]
        ratio = pt / sb if sb > 0 else float("inf")
        lines.append(",".join([f"{r['snr_db']:g}", _fmt(sb), _fmt(pt), _fmt(ratio)]))
        print(f"snr={r['snr_db']:7.2f} dB  sim={sb:.4e}  analytic={pt:.4e}  ratio={ratio:.3g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _rows(field_name: str, items, width: int) -> list[tuple]:
    rows = []
    for item in items:
        r = _int_list(field_name, item)
        if len(r) != width:
            raise ConfigError(field_name, f"expected {width} comma-separated integers, got {item!r}")
        rows.append(r)
    return rows


def cmd_tables(args) -> int:
    defaults = ((), (), ()) if args.no_defaults else (
        tables.ENERGY_ROWS, tables.COMPLEXITY_ROWS, tables.RATE_ROWS)
    energy = tuple(defaults[0]) + tuple(_rows("energy_row", args.energy_row, 4))
    complexity = tuple(defaults[1]) + tuple(_rows("complexity_row", args.complexity_row, 5))
    rate = tuple(defaults[2]) + tuple(_rows("rate_row", args.rate_row, 3))
    try:
        result = tables.all_tables(energy, complexity, rate)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("table_row", str(exc)) from None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = "\n".join(t.to_text() for t in result.values())
    outputs = [out_dir / "tables.txt"]
    outputs[0].write_text(text, encoding="utf-8")
    for name, t in result.items():
        p = out_dir / f"table_{name}.csv"
        p.write_text(t.to_csv(), encoding="utf-8")
        outputs.append(p)
    print(text, end="")
    write_manifest(args, out_dir, outputs)
    return 0


def cmd_plot(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.surface:
        if len(args.inputs) != 1:
            raise ConfigError("inputs", "surface mode renders exactly one CSV")
        xs, ys, grid = plotting.read_surface(args.inputs[0], args.x, args.y)
        plotting.plot_surface(xs, ys, grid, out, f"log2 {args.x}", f"log2 {args.y}", args.title)
    else:
        curves = []
        for path in args.inputs:
            curves.extend(plotting.read_curves(path))
        plotting.plot_curves(curves, out, args.title)
    print(f"wrote {out} and {out.with_suffix('.py')}")
    write_manifest(args, out.parent, [out, out.with_suffix(".py")])
    return 0


# flags whose values may start with "-" (negative dB)
_SIGNED_VALUE_FLAGS = ("--snr",)


def _join_signed_values(argv: list) -> list:
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _SIGNED_VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_signed_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.manifest:
            args = _apply_manifest(parser, argv, args)
        if getattr(args, "snr", None) is not None:
            parse_snr_grid(args.snr)
        return args.func(args)
    except ConfigError as exc:
        print(f"cimris: configuration error: {exc}", file=sys.stderr)
        return 2
    except plotting.CsvFormatError as exc:
        print(f"cimris: malformed CSV: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"cimris: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
