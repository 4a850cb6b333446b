import json
import math
import subprocess
import sys

import pytest

from qspeedlim.bounds import BoundReport, CharacteristicTimes, Margin, MomentPair
from qspeedlim.campaigns import CampaignResult
from qspeedlim.cli import (
    _finish_campaign,
    main,
    parse_schedule,
    parse_seeds,
    parse_times,
)

FAST = ["--steps", "400"]


def run_main(argv, capsys=None):
    rc = main(argv)
    return rc


class TestArgumentParsing:
    def test_seed_range(self):
        assert parse_seeds("0..5") == [0, 1, 2, 3, 4]

    def test_seed_comma_list(self):
        assert parse_seeds("3, 7,11") == [3, 7, 11]

    def test_times(self):
        assert parse_times("1,4,16") == [1.0, 4.0, 16.0]

    def test_empty_times_rejected(self):
        with pytest.raises(ValueError):
            parse_times(" , ")

    def test_schedule_specs(self):
        assert parse_schedule("linear").kind == "linear"
        sched = parse_schedule("poly:2")
        assert sched.kind == "poly"
        assert sched.g(0.5) == pytest.approx(0.25)

    def test_schedule_from_file(self, tmp_path):
        path = tmp_path / "sched.json"
        path.write_text(json.dumps({"kind": "poly", "power": 3.0}))
        assert parse_schedule(str(path)).power == 3.0

    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_ensemble_requires_dim(self):
        with pytest.raises(SystemExit) as err:
            main(["ensemble"])
        assert err.value.code == 2


class TestVerify:
    def test_analytic_suite_exits_0(self, tmp_path, capsys):
        rc = main(["verify", "--analytic", "--out", str(tmp_path), *FAST])
        assert rc == 0
        out = capsys.readouterr().out
        assert "hbar = 1" in out
        assert "0 violations" in out
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["kind"] == "analytic-two-level"
        assert summary["n_violations"] == 0

    def test_hbar_override_in_header(self, tmp_path, capsys):
        rc = main(["verify", "--out", str(tmp_path), "--hbar", "2.0", *FAST])
        assert rc == 0
        assert "hbar = 2" in capsys.readouterr().out

    def test_campaign_file(self, tmp_path):
        campaign_path = tmp_path / "campaign.json"
        campaign_path.write_text(json.dumps({
            "kind": "gue-ensemble",
            "parameters": {"dim": 2, "seed_range": [0, 2]},
            "integrator": {"steps": 300},
        }))
        out = tmp_path / "results"
        rc = main(["verify", "--campaign", str(campaign_path), "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_runs"] == 2

    def test_verbose_prints_member_lines(self, tmp_path, capsys):
        rc = main(["verify", "-v", "--out", str(tmp_path), *FAST])
        assert rc == 0
        out = capsys.readouterr().out
        assert "[0000]" in out and "-> ok" in out

    def test_dt_steps_conflict_exits_2(self, tmp_path, capsys):
        rc = main(["verify", "--dt", "0.1", "--steps", "100",
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_summary_bytes_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["verify", "--out", str(out), *FAST]) == 0
        assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


class TestEnsemble:
    def test_small_ensemble(self, tmp_path):
        rc = main(["ensemble", "--dim", "2", "--seeds", "0..3",
                   "--out", str(tmp_path), "--steps", "300"])
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n_runs"] == 3
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "report-0002.json").exists()

    def test_comma_seed_list(self, tmp_path):
        rc = main(["ensemble", "--dim", "2", "--seeds", "1,5",
                   "--out", str(tmp_path), "--steps", "300"])
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n_runs"] == 2

    def test_workers_flag(self, tmp_path):
        rc = main(["ensemble", "--dim", "2", "--seeds", "0..4", "--workers", "2",
                   "--out", str(tmp_path), "--steps", "300"])
        assert rc == 0


class TestQac:
    @pytest.fixture
    def instance_path(self, tmp_path):
        path = tmp_path / "chain3.json"
        path.write_text(json.dumps({
            "n": 3,
            "couplings": [[0, 1, -1.0], [1, 2, -1.0]],
            "fields": [],
        }))
        return path

    def test_per_T_reports(self, instance_path, tmp_path, capsys):
        out = tmp_path / "qac-out"
        rc = main(["qac", "--instance", str(instance_path),
                   "--schedule", "linear", "--T", "1,4",
                   "--out", str(out), "--steps", "300"])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_runs"] == 2
        assert len(summary["qac_diagnostics"]) == 2
        assert (out / "report-0001.json").exists()

    def test_poly_schedule_spec(self, instance_path, tmp_path):
        rc = main(["qac", "--instance", str(instance_path),
                   "--schedule", "poly:2", "--T", "1",
                   "--out", str(tmp_path / "o"), "--steps", "300"])
        assert rc == 0

    def test_malformed_instance_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 1,\n "couplings": }\n')
        rc = main(["qac", "--instance", str(bad), "--out", str(tmp_path / "o")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "error" in err and "bad.json:2" in err

    def test_missing_instance_file_exits_2(self, tmp_path, capsys):
        rc = main(["qac", "--instance", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestDecay:
    def test_two_level_outputs(self, tmp_path, capsys):
        rc = main(["decay", "--two-level", "--out", str(tmp_path), *FAST])
        assert rc == 0
        header = (tmp_path / "decay.csv").read_text().splitlines()[0]
        assert header.split(",") == ["t", "survival", "survival_bound",
                                     "bound_vacuous", "exp_decay_diagnostic",
                                     "regime_ok"]
        assert (tmp_path / "trajectory.csv").exists()
        assert (tmp_path / "report.json").exists()
        out = capsys.readouterr().out
        # the two-level gap system reaches orthogonality at pi
        assert "orthogonality reached at t = 3.14159" in out
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["measured_orth_time"] == pytest.approx(math.pi, abs=1e-6)

    def test_random_system(self, tmp_path):
        rc = main(["decay", "--dim", "3", "--seed", "4",
                   "--out", str(tmp_path), "--steps", "300"])
        assert rc == 0
        sidecar = json.loads((tmp_path / "trajectory.meta.json").read_text())
        assert sidecar["seed"] == 4

    def test_beta_override_changes_columns(self, tmp_path):
        rc = main(["decay", "--two-level", "--beta", "0.3",
                   "--out", str(tmp_path), *FAST])
        assert rc == 0
        header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert "distance_const0.3" in header
        assert "distance_opt" not in header

    def test_needs_system_choice(self, tmp_path, capsys):
        rc = main(["decay", "--out", str(tmp_path)])
        assert rc == 2
        assert "--two-level or --dim" in capsys.readouterr().err

    def test_horizon_override(self, tmp_path):
        rc = main(["decay", "--two-level", "--horizon", "1.0",
                   "--out", str(tmp_path), *FAST])
        assert rc == 0
        last = (tmp_path / "decay.csv").read_text().splitlines()[-1]
        assert float(last.split(",")[0]) == pytest.approx(1.0)


class TestEntangle:
    def test_small_comparison(self, tmp_path):
        rc = main(["entangle", "--subsystem-dim", "2", "--seeds", "0..2",
                   "--out", str(tmp_path), "--steps", "300"])
        assert rc == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n_runs"] == 6
        assert "entanglement" in summary


class TestReport:
    def test_summarizes_results_dir(self, tmp_path, capsys):
        assert main(["verify", "--out", str(tmp_path), *FAST]) == 0
        capsys.readouterr()
        rc = main(["report", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "campaign: analytic-two-level" in out
        assert "runs: 4, violations: 0" in out
        assert "margin quantiles" in out
        assert "orthogonal_time" in out

    def test_missing_dir_exits_2(self, tmp_path, capsys):
        rc = main(["report", str(tmp_path / "missing")])
        assert rc == 2
        assert "summary.json" in capsys.readouterr().err


class TestViolationPath:
    def test_synthetic_violation_exits_1_after_writing(self, tmp_path, capsys):
        # inequalities cannot be made to fail honestly, so the exit-1 path is
        # exercised with a hand-built failing report
        bad = Margin(name="general:zero", lhs=2.0, rhs=1.0, slack=0.0)
        rep = BoundReport(
            context="time-independent",
            moments=MomentPair(energy=0.5, spread=0.5),
            characteristic=CharacteristicTimes(t_any=4.0, t_orth=2.8),
            margins=(bad,),
            numerical_slack={"zero": 0.0},
            provenance={"case": "synthetic"},
        )
        result = CampaignResult(
            kind="analytic-two-level", reports=(rep,),
            violations=({"provenance": rep.provenance, "margin": "general:zero",
                         "lhs": 2.0, "rhs": 1.0, "slack": 0.0},),
            summary={"kind": "analytic-two-level", "config_hash": "deadbeef0000",
                     "n_runs": 1, "n_violations": 1,
                     "trigger_rates": {"orthogonal": None, "antipodal": None},
                     "margin_quantiles": {}, "violations": []},
        )
        rc = _finish_campaign(result, tmp_path, verbose=False)
        assert rc == 1
        # outputs land before the nonzero exit
        assert (tmp_path / "report-0000.json").exists()
        assert (tmp_path / "summary.json").exists()
        out = capsys.readouterr().out
        assert "violating reports" in out
        assert "report-0000.json" in out


class TestOutputDirResolution:
    def test_env_var_supplies_base(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("QSPEEDLIM_OUT", str(tmp_path))
        monkeypatch.chdir(tmp_path)
        rc = main(["verify", *FAST])
        assert rc == 0
        assert (tmp_path / "verify" / "summary.json").exists()

    def test_explicit_out_wins_over_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QSPEEDLIM_OUT", str(tmp_path / "env"))
        rc = main(["verify", "--out", str(tmp_path / "given"), *FAST])
        assert rc == 0
        assert (tmp_path / "given" / "summary.json").exists()
        assert not (tmp_path / "env").exists()


class TestConsoleScript:
    def test_installed_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "qspeedlim.cli", "verify",
             "--out", str(tmp_path), "--steps", "400"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "hbar" in proc.stdout
        assert (tmp_path / "summary.json").exists()
