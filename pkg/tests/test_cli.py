import json

import pytest

from cimris import cli


def run(*argv):
    return cli.main(list(argv))


def test_simulate_grid_rows(tmp_path):
    out = tmp_path / "o"
    assert run("simulate", "--scheme", "cim-ris", "--m", "4", "--l", "16", "--n", "64", "--k", "32",
               "--snr", "-40:2:0", "--trials", "200", "--seed", "7", "--out", str(out)) == 0
    lines = (out / "ber.csv").read_text().splitlines()
    assert lines[0].startswith("# cimris")
    assert len(lines) == 2 + 21
    manifest = json.loads((out / "simulate.manifest.json").read_text())
    assert manifest["subcommand"] == "simulate" and manifest["seed"] == 7
    assert manifest["configs"][0]["modulation_order"] == 4
    assert {"version", "timestamp", "outputs", "args"} <= set(manifest)


def test_manifest_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = tmp_path / "run.cfg"
    cfg.write_text("m = 16\nl = 8\nk = 16\nsnr = -30,-26\ntrials = 300\nseed = 3\n")
    assert run("simulate", "--config", str(cfg), "--out", str(a)) == 0
    cfg.write_text("m = 4\n")  # manifest must not depend on the file any more
    assert run("simulate", "--manifest", str(a / "simulate.manifest.json"), "--out", str(b)) == 0
    assert (a / "ber.csv").read_bytes() == (b / "ber.csv").read_bytes()


def test_unknown_scheme_is_config_error(tmp_path, capsys):
    assert run("simulate", "--scheme", "foo", "--out", str(tmp_path)) == 2
    assert "scheme" in capsys.readouterr().err


def test_bad_field_named(tmp_path, capsys):
    assert run("simulate", "--m", "8", "--out", str(tmp_path)) == 2
    assert "m:" in capsys.readouterr().err
    assert run("simulate", "--k", "8", "--l", "16", "--out", str(tmp_path)) == 2
    assert "k:" in capsys.readouterr().err


def test_usage_error_exit_code():
    assert run("simulate", "--trials", "lots") == 2


def test_equal_u_selects_benchmark_parameters(tmp_path):
    out = tmp_path / "o"
    assert run("simulate", "--schemes", "cim-ris,ris", "--equal-u", "10", "--m", "4", "--l", "16",
               "--snr", "-30", "--trials", "100", "--out", str(out)) == 0
    cfgs = json.loads((out / "simulate.manifest.json").read_text())["configs"]
    assert [c["modulation_order"] for c in cfgs] == [4, 1024]
    rows = (out / "ber.csv").read_text().splitlines()[2:]
    assert [r.split(",")[0] for r in rows] == ["cim-ris", "ris"]
    assert run("simulate", "--schemes", "cim-ris", "--equal-u", "9", "--m", "4", "--l", "16",
               "--out", str(out)) == 2


def test_analyze_identity_and_compare(tmp_path):
    sim = tmp_path / "sim"
    assert run("simulate", "--snr", "-32,-30", "--trials", "2000", "--out", str(sim)) == 0
    out = tmp_path / "an"
    assert run("analyze", "--snr", "-32,-30", "--model", "consistent", "--compare-sim",
               str(sim / "ber.csv"), "--out", str(out)) == 0
    lines = (out / "aber.csv").read_text().splitlines()
    assert lines[1] == "scheme,snr_db,p_ci,p_sc,p_m,p_mod,p_total"
    u1, u2 = 2, 4
    for line in lines[2:]:
        _, _, p_ci, p_sc, p_m, p_mod, p_total = (float(v) if i else v for i, v in enumerate(line.split(",")))
        assert p_total == pytest.approx((2 * u2 / 10) * p_sc + (u1 / 10) * p_mod, rel=1e-9)
    comp = (out / "compare.csv").read_text().splitlines()
    assert comp[1] == "snr_db,sim_ber,p_total,ratio"
    assert len(comp) == 4
    snr, sim_ber, p_total, ratio = map(float, comp[2].split(","))
    assert ratio == pytest.approx(p_total / sim_ber, rel=1e-9)


def test_analyze_non_square_is_config_error(tmp_path):
    assert run("analyze", "--m", "8", "--allow-rectangular", "--out", str(tmp_path)) == 2
    assert run("analyze", "--scheme", "ris", "--out", str(tmp_path)) == 2


def test_tables(tmp_path, capsys):
    assert run("tables", "--out", str(tmp_path), "--rate-row", "16,16,32") == 0
    text = capsys.readouterr().out
    assert "energy saving" in text
    rate = (tmp_path / "table_rate.csv").read_text().splitlines()
    assert rate[3] == "8,8,16,11,6,9,3"
    assert rate[4] == "16,16,32,14,8,12,4"
    assert (tmp_path / "tables.manifest.json").exists()
    assert run("tables", "--out", str(tmp_path), "--energy-row", "4,2") == 2


def test_plot_and_malformed(tmp_path, capsys):
    good = tmp_path / "g.csv"
    good.write_text("scheme,snr_db,ber\na,0,0.1\nb,0,0.2\n")
    out = tmp_path / "p" / "fig.svg"
    assert run("plot", str(good), "--out", str(out)) == 0
    assert out.exists() and out.with_suffix(".py").exists()
    bad = tmp_path / "b.csv"
    bad.write_text("scheme,snr_db,ber\na,0,0.1\na,zero,0.1\n")
    assert run("plot", str(bad), "--out", str(tmp_path / "x.svg")) == 1
    assert "row 3" in capsys.readouterr().err


def test_surface_simulate_and_plot(tmp_path):
    out = tmp_path / "s"
    assert run("simulate", "--surface-m", "4,16", "--surface-l", "4,8", "--k", "16", "--snr", "-25",
               "--trials", "200", "--out", str(out)) == 0
    csv = out / "ber_surface.csv"
    assert len(csv.read_text().splitlines()) == 2 + 4
    assert run("plot", "--surface", str(csv), "--out", str(out / "surf.svg")) == 0
    assert run("simulate", "--scheme", "ris", "--surface-m", "4,16", "--out", str(out)) == 2
