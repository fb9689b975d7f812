"""End-to-end tests of the command-line surface."""

import io

import pandas as pd
import pytest

from siet.cli.commands.feasibility import cmd_feasibility, render_report
from siet.cli.commands.figures import parse_which
from siet.cli.run_config import load_run_config
from siet.config import settings
from siet.core.exceptions import ValidationException
from siet.main import build_parser, collect_overrides, main


def test_collect_overrides_maps_flags():
    args = build_parser().parse_args(["coverage", "--lambda", "0.02", "--T", "2", "--grid", "1,2"])
    assert collect_overrides(args) == {"system.lambda": "0.02", "thresholds.T": "2", "grid.T": "1,2"}


def test_grid_flag_follows_command():
    args = build_parser().parse_args(["figures", "--grid", "0.5,1"])
    assert collect_overrides(args) == {"grid.zeta": "0.5,1"}


def test_coverage_command(tmp_output_dir):
    assert main(["coverage", "--grid", "1,4", "--out", str(tmp_output_dir)]) == 0
    frame = pd.read_csv(tmp_output_dir / "coverage.csv")
    assert list(frame.columns) == ["T", "P_c_analytic", "P_c_closed"]
    assert frame["P_c_closed"].tolist() == pytest.approx([0.5601, 0.3111], abs=1e-4)
    assert frame["P_c_analytic"].tolist() == pytest.approx(frame["P_c_closed"].tolist(), abs=1e-6)


def test_coverage_with_noise_has_no_closed_column(tmp_output_dir):
    assert main(["coverage", "--sigma2", "0.5mW", "--rho", "0.5", "--out", str(tmp_output_dir)]) == 0
    frame = pd.read_csv(tmp_output_dir / "coverage.csv")
    assert list(frame.columns) == ["T", "P_c_analytic"]


def test_eeh_command(tmp_output_dir):
    assert main(["eeh", "--grid", "1mW,10mW", "--out", str(tmp_output_dir)]) == 0
    frame = pd.read_csv(tmp_output_dir / "eeh.csv")
    assert frame["theta"].tolist() == pytest.approx([1e-3, 1e-2])
    assert frame["P_eeh_closed"].iloc[0] == pytest.approx(0.7226, abs=1e-3)
    assert frame["P_eeh_analytic"].tolist() == pytest.approx(frame["P_eeh_closed"].tolist(), abs=1e-5)


def test_empty_grid_is_a_config_error(tmp_output_dir):
    assert main(["coverage", "--grid", "", "--out", str(tmp_output_dir)]) == 2


def test_invalid_parameter_is_a_config_error(tmp_output_dir):
    assert main(["eeh", "--rho", "1.5", "--out", str(tmp_output_dir)]) == 2


def test_missing_config_file(tmp_path):
    assert main(["coverage", "--config", str(tmp_path / "missing.conf")]) == 2


def test_figures_subset(tmp_output_dir):
    """Nested output directories are created; scripts point at their CSV."""
    assert main(["figures", "--which", "2,3", "--grid", "0.5,1,2", "--out", str(tmp_output_dir)]) == 0
    assert (tmp_output_dir / "fig2.csv").is_file()
    assert (tmp_output_dir / "fig3.csv").is_file()
    assert not (tmp_output_dir / "fig4.csv").exists()
    assert "'fig3.csv'" in (tmp_output_dir / "fig3.plot").read_text()

    fig3 = pd.read_csv(tmp_output_dir / "fig3.csv")
    assert fig3["zeta"].tolist() == [0.5, 1.0, 2.0]
    assert fig3["lambda_max=0.01,eta=0.6"].iloc[0] == pytest.approx(0.2098, abs=1e-3)


def test_figures_all(tmp_output_dir):
    assert main(["figures", "--grid", "0.5,1", "--out", str(tmp_output_dir)]) == 0
    fig4 = pd.read_csv(tmp_output_dir / "fig4.csv")
    assert fig4.columns[0] == "zeta"
    assert len(fig4.columns) == 1 + 3 * 2
    assert "set logscale y" in (tmp_output_dir / "fig4.plot").read_text()


def test_figures_unknown_number(tmp_output_dir):
    assert main(["figures", "--which", "5", "--out", str(tmp_output_dir)]) == 2


def test_parse_which():
    assert parse_which("all") == [2, 3, 4]
    assert parse_which("4,2") == [4, 2]
    with pytest.raises(ValidationException):
        parse_which("x")


def test_feasibility_command(tmp_output_dir, capsys):
    argv = ["feasibility", "--target", "0.8", "--lambda-max", "0.1", "--eta", "0.3", "--out", str(tmp_output_dir)]
    assert main(argv) == 0
    frame = pd.read_csv(tmp_output_dir / "feasibility.csv")
    verdicts = dict(zip(frame["level"], frame["feasible"]))
    assert verdicts == {
        "secondary_battery": True, "basic_system": True, "battery_free": False, "configured": True
    }
    assert (frame["max_feasible_zeta"] > 0).all()
    out = capsys.readouterr().out
    assert "FEASIBLE" in out
    assert "configured" in out


def test_feasibility_assesses_configured_zeta(tmp_path):
    """--zeta moves the configured row; the fixed levels stay put."""
    base = ["feasibility", "--target", "0.8", "--lambda-max", "0.1", "--eta", "0.3"]
    assert main(base + ["--zeta", "0.05", "--out", str(tmp_path / "low")]) == 0
    assert main(base + ["--zeta", "10", "--out", str(tmp_path / "high")]) == 0
    low = pd.read_csv(tmp_path / "low" / "feasibility.csv").set_index("level")
    high = pd.read_csv(tmp_path / "high" / "feasibility.csv").set_index("level")

    assert low.loc["configured", "zeta"] == pytest.approx(0.05)
    assert low.loc["configured", "theta"] == pytest.approx(0.05 * 0.02 / 0.3)
    assert bool(low.loc["configured", "feasible"])
    assert not bool(high.loc["configured", "feasible"])
    assert high.loc["configured", "eeh_at_density_max"] == pytest.approx(high.loc["battery_free", "eeh_at_density_max"])
    assert low.drop(index="configured").equals(high.drop(index="configured"))


def test_render_report_writes_to_given_stream():
    config = load_run_config(None, {"constraints.lambda_max": "0.1", "grid.targets": "0.8"})
    stream = io.StringIO()
    render_report(cmd_feasibility(config), stream)
    lines = stream.getvalue().splitlines()
    assert sum(line.startswith("configured") for line in lines) == 1
    assert lines[-1].startswith("eta=0.3:")


def test_montecarlo_command_is_reproducible(tmp_path):
    argv = ["montecarlo", "--trials", "300", "--seed", "5"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "montecarlo.csv").read_bytes()
    assert first == (tmp_path / "b" / "montecarlo.csv").read_bytes()

    frame = pd.read_csv(tmp_path / "a" / "montecarlo.csv")
    assert frame["quantity"].tolist() == ["coverage(T=1)", "eeh(theta=0.001)", "interference_ccdf(x=0.001)"]
    assert (frame["trials"] == 300).all()


def test_montecarlo_strict_disagreement(tmp_output_dir, monkeypatch):
    """A zero agreement margin flags every row; --strict exits with 4."""
    monkeypatch.setattr(settings, "AGREEMENT_FACTOR", 0.0)
    argv = ["montecarlo", "--trials", "200", "--out", str(tmp_output_dir)]
    assert main(argv) == 0
    assert main(argv + ["--strict"]) == 4
    assert (tmp_output_dir / "montecarlo.csv").is_file()


def test_dump_config_round_trip(tmp_output_dir):
    argv = ["eeh", "--lambda", "0.02", "--theta", "2mW", "--out", str(tmp_output_dir), "--dump-config"]
    assert main(argv) == 0
    dumped = load_run_config(tmp_output_dir / "effective.conf")
    assert dumped.system.density == 0.02
    assert dumped.thresholds.theta == pytest.approx(2e-3)
    assert dumped.out_dir == tmp_output_dir


def test_dump_config_explicit_path(tmp_path):
    target = tmp_path / "conf" / "run.conf"
    assert main(["coverage", "--out", str(tmp_path / "out"), "--dump-config", str(target)]) == 0
    assert target.is_file()


def test_figures_follow_eta_flag(tmp_output_dir):
    assert main(["figures", "--which", "3", "--eta", "0.6", "--grid", "0.5,1", "--out", str(tmp_output_dir)]) == 0
    fig3 = pd.read_csv(tmp_output_dir / "fig3.csv")
    curves = list(fig3.columns[1:])
    assert curves and all(name.endswith(",eta=0.6") for name in curves)
    assert fig3["lambda_max=0.01,eta=0.6"].iloc[0] == pytest.approx(0.2098, abs=1e-3)


def test_dump_config_omits_unset_eta(tmp_output_dir):
    assert main(["figures", "--which", "2", "--out", str(tmp_output_dir), "--dump-config"]) == 0
    text = (tmp_output_dir / "effective.conf").read_text()
    assert "energy.eta=" not in text
    assert "energy.zeta=1.0" in text
