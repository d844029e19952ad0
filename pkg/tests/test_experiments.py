import json
import os
import subprocess
import sys

import pytest

from jamrx import McConfig
from jamrx.experiments import cli
from jamrx.experiments.config import (ConfigError, SweepAxis, antenna_sweep_config, db_to_linear,
                                      jamming_sweep_config, linear_to_db, load_config,
                                      parse_filters)
from jamrx.experiments.output import emit, read_csv, write_plot_script
from jamrx.experiments.sweeps import CSV_COLUMNS, SweepResult, SweepRow, run_sweep
from jamrx.experiments.validation import run_validation
from jamrx.plotting import plot_sweep

SMALL = McConfig(inner_samples=200, outer_samples=3)


def _small(cfg, axis):
    return cfg.with_(axis=axis, mc=SMALL)


def test_db_round_trip():
    for db in (-20.0, -3.3, 0.0, 5.0, 40.0):
        assert abs(linear_to_db(db_to_linear(db)) - db) < 1e-12
    assert db_to_linear(10.0) == pytest.approx(10.0)


def test_defaults_match_published_setup():
    cfg = antenna_sweep_config()
    p = cfg.params
    assert (p.tau, p.T, p.beta_u, p.beta_j) == (3, 200, 1.0, 1.0)
    assert p.p_t == pytest.approx(10 ** 0.5) and p.q_d == pytest.approx(10 ** 0.5)
    assert max(cfg.axis.grid()) <= 400
    j = jamming_sweep_config()
    assert j.axis.grid() == [-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0]
    q = j.params_at(40.0)
    assert q.q_t == q.q_d == pytest.approx(1e4)


def test_sweep_axis_parsing():
    ax = SweepAxis.parse("50:200:4", "M", "linear")
    assert ax.grid() == [50, 100, 150, 200]
    assert SweepAxis.parse("-20:40:7:dB", "q", "dB").points == 7
    for bad in ("1:2", "a:b:3", "0:10:1", "0:inf:3"):
        with pytest.raises(ConfigError):
            SweepAxis.parse(bad, "M", "linear")
    with pytest.raises(ConfigError):
        SweepAxis("zeta", 0, 1, 2)
    assert parse_filters("zf, mrc") == ("zf", "mrc")
    with pytest.raises(ConfigError):
        parse_filters("wiener")


def test_load_config_and_diagnostics(tmp_path):
    good = tmp_path / "good.ini"
    good.write_text("[system]\nM = 64\nq_t_db = 10\n\n[monte_carlo]\ninner_samples = 500\nseed = 9\n"
                    "[output]\nformat = json\nfilters = zf\n")
    cfg = load_config(str(good))
    assert cfg.params.M == 64 and cfg.params.q_t == pytest.approx(10.0)
    assert cfg.mc.inner_samples == 500 and cfg.mc.master_seed == 9
    assert cfg.fmt == "json" and cfg.filters == ("zf",)

    cases = {
        "[system]\nM = lots\n": "M",
        "[system]\ntau = 300\n": "tau",
        "[system]\nwhat = 1\n": "what",
        "[elsewhere]\nx = 1\n": "elsewhere",
        "[monte_carlo]\ninner_samples = 5\n": "inner_samples",
        "[system\nM = 3\n": "line",
    }
    for i, (text, needle) in enumerate(cases.items()):
        f = tmp_path / f"bad{i}.ini"
        f.write_text(text)
        with pytest.raises(ConfigError, match=needle):
            load_config(str(f))


def test_emit_header_only_and_round_trip(tmp_path):
    empty = SweepResult([], {"seed": 1})
    path = tmp_path / "empty.csv"
    emit(empty, str(path))
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"

    rows = [SweepRow("M", M, k, 1.0 / 3 + M, 1e-3, None if k == "mrc" else 2.0 ** 0.5 * M)
            for M in (50, 100, 150, 200) for k in ("mrc", "mmse", "zf")]
    res = SweepResult(rows, {"seed": 1})
    path = tmp_path / "full.csv"
    written = emit(res, str(path))
    assert len(path.read_text().splitlines()) == 1 + 12
    assert read_csv(str(path)) == rows
    assert json.loads((tmp_path / "full.meta.json").read_text()) == {"seed": 1}
    assert len(written) == 2

    jpath = tmp_path / "full.json"
    emit(res, str(jpath), "json")
    doc = json.loads(jpath.read_text())
    assert doc["columns"] == list(CSV_COLUMNS) and len(doc["rows"]) == 12
    with pytest.raises(OSError, match="nope"):
        emit(res, str(tmp_path / "nope" / "x.csv"))


def test_sweep_rows_and_determinism(tmp_path):
    cfg = _small(antenna_sweep_config(), SweepAxis("M", 20, 40, 2))
    a, b = run_sweep(cfg), run_sweep(cfg.with_(mc=McConfig(200, 3, workers=2)))
    assert len(a.rows) == 6
    assert all(r.rate_sim_stderr > 0 for r in a.rows)
    assert [r.rate_closed_form is None for r in a.rows] == [True, False, False] * 2
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(a, str(pa))
    emit(b, str(pb))
    assert pa.read_bytes() == pb.read_bytes()
    for key in ("master_seed", "inner_samples", "outer_samples", "version", "params"):
        assert key in a.metadata
    assert a.metadata["params"]["T"] == 200


def test_antenna_sweep_orderings():
    cfg = antenna_sweep_config().with_(axis=SweepAxis("M", 50, 200, 4),
                                       mc=McConfig(inner_samples=1000, outer_samples=10))
    res = run_sweep(cfg)
    for M in (50, 100, 150, 200):
        assert res.rate("zf", M).rate_sim >= res.rate("mrc", M).rate_sim
    for M in (100, 200):
        assert res.rate("zf", M).rate_sim >= res.rate("mmse", M).rate_sim


def test_jamming_sweep_endpoints():
    cfg = jamming_sweep_config().with_(axis=SweepAxis("q", -20, 40, 2, "dB"),
                                       mc=McConfig(inner_samples=2000, outer_samples=10))
    res = run_sweep(cfg)
    assert res.rate("mrc", 40.0).rate_sim < res.rate("mrc", -20.0).rate_sim
    zf = res.rate("zf", 40.0)
    assert abs(zf.rate_sim / zf.rate_closed_form - 1) < 0.10
    low = [res.rate(k, -20.0).rate_sim for k in ("mrc", "mmse", "zf")]
    assert max(low) / min(low) < 1.15


def test_plot_and_plot_script(tmp_path):
    cfg = _small(antenna_sweep_config(), SweepAxis("M", 20, 40, 2))
    res = run_sweep(cfg)
    png = plot_sweep(res, str(tmp_path / "fig.png"))
    assert open(png, "rb").read(8) == b"\x89PNG\r\n\x1a\n"
    csv = tmp_path / "r.csv"
    emit(res, str(csv))
    script = write_plot_script(str(csv), str(tmp_path / "r_plot.py"))
    out = subprocess.run([sys.executable, script], capture_output=True, text=True, check=True)
    assert os.path.exists(out.stdout.strip())


def test_validation_passes_and_detects_fault():
    cfg = antenna_sweep_config()
    ok = run_validation(cfg, fast=True)
    assert ok.passed, ok.text()
    bad = run_validation(cfg, sigma_scale=2.0, fast=True)
    assert not bad.passed
    failed = [c.name for c in bad.checks if not c.passed]
    assert any("mmse" in name for name in failed)


def test_validation_report_deterministic():
    cfg = antenna_sweep_config()
    strip = lambda t: [l for l in t.splitlines() if not l.startswith("# generated")]
    assert strip(run_validation(cfg, fast=True).text()) == strip(run_validation(cfg, fast=True).text())


def test_cli_sweep_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "s.csv"
    rc = cli.main(["sweep-antennas", "--sweep", "20:40:2", "--inner-samples", "200",
                   "--outer-samples", "2", "--out", str(out), "--plot", "--plot-script"])
    assert rc == 0
    assert out.exists() and (tmp_path / "s.png").exists() and (tmp_path / "s_plot.py").exists()
    assert "R=" in capsys.readouterr().out
    assert cli.main(["sweep-jamming", "--inner-samples", "5"]) == 1
    bad = tmp_path / "bad.ini"
    bad.write_text("[system]\nM = -1\n")
    assert cli.main(["sweep-antennas", "--config", str(bad)]) == 1
    assert cli.main(["validate", "--fast", "--debug-sigma-scale", "2"]) == 2


def test_seed_precedence(monkeypatch, tmp_path):
    args = cli.build_parser().parse_args(["sweep-antennas"])
    monkeypatch.setenv("JAMRX_SEED", "77")
    assert cli.resolve_config(args, antenna_sweep_config()).mc.master_seed == 77
    ini = tmp_path / "c.ini"
    ini.write_text("[monte_carlo]\nseed = 88\n")
    args = cli.build_parser().parse_args(["sweep-antennas", "--config", str(ini)])
    assert cli.resolve_config(args, antenna_sweep_config()).mc.master_seed == 88
    args = cli.build_parser().parse_args(["sweep-antennas", "--config", str(ini), "--seed", "99"])
    assert cli.resolve_config(args, antenna_sweep_config()).mc.master_seed == 99
