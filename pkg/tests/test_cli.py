import json
from pathlib import Path

import pytest

from ltesched import cli

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def small_scenario(tmp_path) -> Path:
    text = """
name: cli-smoke
seed: 5
duration_s: 0.4
warmup_ttis: 50
ues:
  avg_sinr_db: [10.0, 14.0, 17.0]
channel:
  type: flat
  doppler_hz: 120.0
scheduler:
  kind: BETS
  mode: TD
"""
    f = tmp_path / "scenario.yaml"
    f.write_text(text)
    return f


class TestChannelInfo:
    def test_builtin_profiles(self, capsys):
        assert cli.main(["channel-info", "--pdp", "pedestrian"]) == 0
        out = capsys.readouterr().out
        assert "rms_delay_spread_ns: 43.9543" in out

        assert cli.main(["channel-info", "--pdp", "urban"]) == 0
        out = capsys.readouterr().out
        assert "rms_delay_spread_ns: 990.938" in out

    def test_custom_single_tap(self, tmp_path, capsys):
        f = tmp_path / "flat.txt"
        f.write_text("0 0\n")
        assert cli.main(["channel-info", "--pdp", str(f)]) == 0
        assert "rms_delay_spread_ns: 0\n" in capsys.readouterr().out

    def test_unknown_profile_is_config_error(self, capsys):
        assert cli.main(["channel-info", "--pdp", "nonexistent"]) == cli.EXIT_CONFIG


class TestSolveFtgs:
    def test_single_sinr(self, tmp_path):
        out = tmp_path / "params.csv"
        rc = cli.main(["solve-ftgs", "--sinrs-db", "12.5", "--out", str(out)])
        assert rc == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "i,gamma_bar_db,alpha,p,rbar_over_w"
        assert rows[1].split(",")[3] == "1"  # p = 1

    def test_equal_sinrs_uniform_access(self, tmp_path):
        out = tmp_path / "params.csv"
        rc = cli.main(["solve-ftgs", "--sinrs-db", "10,10,10,10", "--out", str(out)])
        assert rc == 0
        ps = [float(r.split(",")[3]) for r in out.read_text().strip().splitlines()[1:]]
        assert ps == pytest.approx([0.25] * 4, abs=1e-6)

    def test_sinrs_from_file(self, tmp_path, capsys):
        f = tmp_path / "sinrs.txt"
        f.write_text("10.0\n14.0\n")
        assert cli.main(["solve-ftgs", "--sinrs-db", str(f)]) == 0
        assert "rbar_over_w" in capsys.readouterr().out


class TestRun:
    def test_writes_report_and_csvs(self, tmp_path, capsys):
        scenario = small_scenario(tmp_path)
        out = tmp_path / "out"
        rc = cli.main(["run", "--scenario", str(scenario), "--out-dir", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["scenario"]["name"] == "cli-smoke"
        assert len(report["throughput"]["per_ue_bps"]) == 3
        assert (out / "throughput.csv").exists()

    def test_allocation_log_opt_in(self, tmp_path):
        scenario = small_scenario(tmp_path)
        out = tmp_path / "out"
        rc = cli.main([
            "run", "--scenario", str(scenario), "--out-dir", str(out),
            "--log-allocations",
        ])
        assert rc == 0
        lines = (out / "allocations.csv").read_text().strip().splitlines()
        assert lines[0] == "tti,rbg,ue,bits"
        assert len(lines) == 1 + 400 * 12

    def test_deterministic_outputs(self, tmp_path):
        scenario = small_scenario(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        cli.main(["run", "--scenario", str(scenario), "--out-dir", str(out1)])
        cli.main(["run", "--scenario", str(scenario), "--out-dir", str(out2)])
        assert (out1 / "report.json").read_text() == (out2 / "report.json").read_text()
        assert (out1 / "throughput.csv").read_text() == (out2 / "throughput.csv").read_text()

    def test_schema_violation_exit_code_and_key(self, tmp_path, capsys):
        f = tmp_path / "bad.yaml"
        f.write_text(small_scenario(tmp_path).read_text().replace(
            "duration_s: 0.4", "duration_s: 0"))
        rc = cli.main(["run", "--scenario", str(f), "--out-dir", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG
        assert "duration_s" in capsys.readouterr().err

    def test_shipped_recipes_parse(self):
        from ltesched import engine

        for f in SCENARIOS.glob("*.yaml"):
            scenario = engine.load_scenario(f)
            assert scenario.duration_s > 0


class TestSweep:
    def test_single_point_matches_manual_composition(self, tmp_path, capsys):
        base = small_scenario(tmp_path)
        out = tmp_path / "sweep"
        rc = cli.main([
            "sweep", "--vary", "mu_db", "--values", "14.9",
            "--scenario-base", str(base), "--out-dir", str(out),
        ])
        assert rc == 0
        rows = (out / "sweep_mu_db.csv").read_text().strip().splitlines()
        assert rows[0] == "mu_db,phi,eta_ftgs,eta_bets"
        assert len(rows) == 2
        point = dict(zip(rows[0].split(","), [float(x) for x in rows[1].split(",")]))

        # manual composition: FTGS run + closed-form baseline
        from ltesched import analytics, engine, ftgs, linkadapt
        from ltesched.engine import Scenario, UeProfile
        from ltesched.schedulers import SchedulerConfig

        base_s = engine.load_scenario(base)
        sinrs = engine.sinr_span_scenario(17.0, 3, mu_target_db=14.9)
        gap = linkadapt.snr_gap(base_s.target_ber)
        params = ftgs.solve(10 ** (sinrs / 10), gap.gamma, 1.0)
        scenario = Scenario(
            ues=tuple(UeProfile(float(x)) for x in sinrs),
            channel=base_s.channel,
            scheduler=SchedulerConfig(kind="FTGS", mode="TD", ftgs_alphas=params.alpha),
            duration_s=base_s.duration_s,
            seed=base_s.seed,
            warmup_ttis=base_s.warmup_ttis,
        )
        report = engine.run(scenario)
        eta_f = report.throughput.cell / scenario.scheduled_bandwidth_hz
        eta_b = analytics.bets_closed_form(
            10 ** (sinrs / 10), gap.gamma, scenario.scheduled_bandwidth_hz
        ).efficiency
        assert point["phi"] == pytest.approx(eta_f / eta_b - 1.0, abs=5e-7)

    def test_empty_values_rejected(self, tmp_path):
        base = small_scenario(tmp_path)
        rc = cli.main([
            "sweep", "--vary", "mu_db", "--values", " ",
            "--scenario-base", str(base), "--out-dir", str(tmp_path / "x"),
        ])
        assert rc == cli.EXIT_CONFIG
