"""Renderer tests; simulator outputs are produced through its CLI only."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from timoplot.cli import main
from timoplot.io import CSV_HEADER, FormatError, read_series
from timoplot.render import PlotJob, render


@pytest.fixture(scope="module")
def preset_outputs(tmp_path_factory):
    """Run the strong-regime preset and its fit via the simulator CLI."""
    out = tmp_path_factory.mktemp("sim")
    env = dict(os.environ)
    subprocess.run([sys.executable, "-m", "timosim.cli", "simulate",
                    "--preset", "mu_zero_power_p1", "--out-dir", str(out)],
                   check=True, env=env)
    subprocess.run([sys.executable, "-m", "timosim.cli", "fit",
                    "--preset", "mu_zero_power_p1",
                    "--series", str(out / "mu_zero_power_p1.csv"),
                    "--out-dir", str(out)],
                   check=True, env=env)
    return {"csv": str(out / "mu_zero_power_p1.csv"),
            "fit": str(out / "mu_zero_power_p1_fit.json")}


def synthetic_csv(path, n=40):
    t = np.linspace(0.0, 10.0, n)
    e = np.exp(-0.3 * t)
    rows = [CSV_HEADER]
    for i in range(n):
        vals = [t[i], e[i], 0.5 * e[i], -0.3 * e[i], -0.3 * e[i],
                60 * e[i], -e[i], 0.1 * e[i], -0.1 * e[i], 0.2 * e[i]]
        rows.append(",".join("%.17g" % v for v in vals))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    return {"t": t, "E": e}


def test_energy_semilog(tmp_path):
    synthetic_csv(tmp_path / "run.csv")
    out = tmp_path / "fig.png"
    drawn = render(PlotJob(kind="energy_semilog", series=str(tmp_path / "run.csv"),
                           out=str(out)))
    assert out.exists()
    assert drawn["E"].size == 40


def test_envelope_above_energy_from_preset(preset_outputs, tmp_path):
    # acceptance for the plotting layer: envelope pointwise above the energy,
    # verified on the arrays the renderer actually drew
    out = tmp_path / "env.png"
    drawn = render(PlotJob(kind="energy_vs_envelope", series=preset_outputs["csv"],
                           fit=preset_outputs["fit"], out=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert drawn["dominated"]
    assert np.all(drawn["E"] <= drawn["envelope"] * (1.0 + 1e-9))
    assert drawn["ratio"] <= 1.0 + 1e-6


def test_cli_roundtrip_with_plot_word(preset_outputs, tmp_path):
    out = tmp_path / "cli.png"
    rc = main(["plot", "--kind", "energy_vs_envelope",
               "--series", preset_outputs["csv"],
               "--fit", preset_outputs["fit"], "--out", str(out)])
    assert rc == 0
    assert out.exists()


def test_residual_and_lyapunov_kinds(preset_outputs, tmp_path):
    for kind in ("residual", "lyapunov_ratio"):
        out = tmp_path / f"{kind}.png"
        drawn = render(PlotJob(kind=kind, series=preset_outputs["csv"], out=str(out)))
        assert out.exists()
        assert next(iter(drawn.values())).size > 0


def test_empty_csv_errors_and_writes_nothing(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(CSV_HEADER + "\n")
    out = tmp_path / "fig.png"
    with pytest.raises(FormatError):
        render(PlotJob(kind="energy_semilog", series=str(path), out=str(out)))
    assert not out.exists()


def test_missing_column_named(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,E,E2,diss_measured,K,K1,K2,K3,K4\n0,1,1,0,1,0,0,0,0\n")
    with pytest.raises(FormatError) as exc:
        read_series(str(path))
    assert "diss_predicted" in str(exc.value)


def test_render_deterministic(tmp_path):
    synthetic_csv(tmp_path / "run.csv")
    outs = []
    for name in ("a.png", "b.png"):
        out = tmp_path / name
        render(PlotJob(kind="energy_semilog", series=str(tmp_path / "run.csv"),
                       out=str(out)))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_input_files_not_mutated(tmp_path):
    synthetic_csv(tmp_path / "run.csv")
    before = (tmp_path / "run.csv").read_bytes()
    render(PlotJob(kind="energy_semilog", series=str(tmp_path / "run.csv"),
                   out=str(tmp_path / "f.png")))
    assert (tmp_path / "run.csv").read_bytes() == before


def test_sweep_rates_kind(tmp_path):
    agg = {"points": [
        {"point": {"damping.h.p": 1.0}, "fit": {"tail_slope": -0.2}},
        {"point": {"damping.h.p": 3.0}, "fit": {"tail_slope": -0.1}},
        {"point": {"damping.h.p": 5.0}, "fit": {"tail_slope": -0.05}},
    ]}
    path = tmp_path / "agg.json"
    path.write_text(json.dumps(agg))
    out = tmp_path / "rates.svg"
    drawn = render(PlotJob(kind="sweep_rates", fit=str(path), out=str(out)))
    assert out.exists()
    assert np.all(np.diff(drawn["slopes"]) > 0)  # slower decay as p grows


def test_cli_exit_code_on_bad_input(tmp_path):
    rc = main(["--kind", "energy_semilog", "--series", str(tmp_path / "nope.csv"),
               "--out", str(tmp_path / "f.png")])
    assert rc in (2, 4)  # missing file surfaces as I/O error
