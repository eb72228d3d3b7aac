"""Tests for the run, banana, converge and check subcommands."""

import json

import numpy as np
import pytest

from core.fields import CustomField
from core.integrators import Method, integrate
from harness.commands import (
    BananaCell,
    BananaSummary,
    CheckReport,
    CheckResult,
    check_model,
    cmd_banana,
    cmd_check,
    cmd_converge,
    cmd_run,
    integrator_config,
    resolve,
    run_metadata,
)
from harness.output import read_trajectory_csv
from harness.schemas import ExperimentConfig


def experiment(tmp_path, **data):
    """ExperimentConfig writing into tmp_path."""
    return ExperimentConfig.parse({"out_dir": str(tmp_path), **data})


def axial_field_without_jacobian(eps):
    """Constant field 2 e3 given only through B1."""
    return CustomField(b1=lambda x: np.zeros_like(x) + np.array([0.0, 0.0, 2.0]), eps=eps)


class TestResolve:
    """Tests for filling configs from presets."""

    def test_experiment_default_presets(self, tmp_path):
        """Test that each subcommand picks its preset."""
        assert resolve(experiment(tmp_path, experiment="run")).field_name == "tokamak"
        assert resolve(experiment(tmp_path, experiment="converge")).field_name == "cubic-potential"

    def test_eps_precedence(self, tmp_path):
        """Test that eps comes from the config, then field params, then the preset."""
        base = {"field": {"name": "uniform", "params": {"eps": 0.5}}}
        assert resolve(experiment(tmp_path, **base)).eps == 0.5
        assert resolve(experiment(tmp_path, eps=0.25, **base)).eps == 0.25
        assert resolve(experiment(tmp_path, field={"name": "uniform"})).eps == 1e-3

    def test_initial_override(self, tmp_path):
        """Test that an explicit initial state replaces the preset."""
        run = resolve(experiment(tmp_path, initial={"x": [1.0, 0.0, 0.0], "v": [0.0, 0.0, 2.0]}))
        assert run.initial.v.tolist() == [0.0, 0.0, 2.0]
        assert run.methods == [Method.MODIFIED_BORIS]


class TestRun:
    """Tests for cmd_run."""

    def test_uniform_parallel_motion(self, tmp_path):
        """Test x3 = t v_par for motion along a uniform field."""
        paths = cmd_run(experiment(tmp_path, field={"name": "uniform"}, T=2.0))
        trajectory = read_trajectory_csv(paths[0])
        assert np.allclose(trajectory.x[:, 2], trajectory.t, rtol=0.0, atol=1e-12)
        assert np.all(trajectory.diagnostics.vperp == 0.0)

    @pytest.mark.slow
    def test_tokamak_row_count(self, tmp_path):
        """Test 1876 rows for the banana orbit at h = 20."""
        paths = cmd_run(experiment(tmp_path, experiment="run"))
        trajectory = read_trajectory_csv(paths[0])
        assert len(trajectory) == 1876
        assert trajectory.t[-1] == pytest.approx(3.75e4)

    def test_several_methods(self, tmp_path):
        """Test one CSV and one metadata file per method."""
        paths = cmd_run(
            experiment(tmp_path, field={"name": "uniform"}, methods=["boris", "boris-filtered"])
        )
        assert sorted(p.name for p in paths) == [
            "uniform_boris-filtered_h0.1.csv",
            "uniform_boris-filtered_h0.1.json",
            "uniform_boris_h0.1.csv",
            "uniform_boris_h0.1.json",
        ]


class TestBananaSummary:
    """Tests for the banana verdicts."""

    def test_verdicts(self):
        """Test separation at large h and agreement at small h."""
        summary = BananaSummary(
            [
                BananaCell("boris", 0.2, "ok", hausdorff_gc=1e-3),
                BananaCell("modified-boris", 0.2, "ok", hausdorff_gc=1e-3),
                BananaCell("boris", 20.0, "ok", hausdorff_gc=1e-1),
                BananaCell("boris-filtered", 20.0, "nonfinite"),
                BananaCell("modified-boris", 20.0, "ok", hausdorff_gc=1e-3),
            ]
        )
        summary.evaluate(0.2, 20.0)
        assert summary.ratios["boris_over_modified"] == pytest.approx(100.0)
        assert summary.verdicts["modified_beats_boris"]
        assert summary.verdicts["modified_beats_boris-filtered"]
        assert summary.verdicts["boris_small_step_ok"]

    def test_modified_failure(self):
        """Test that a failed modified run fails the grid."""
        summary = BananaSummary([BananaCell("modified-boris", 20.0, "nonfinite")])
        summary.evaluate(0.2, 20.0)
        assert summary.verdicts == {"modified_large_step_ok": False}


class TestBanana:
    """Tests for cmd_banana."""

    def test_short_grid(self, tmp_path):
        """Test a short banana grid writes the summary for every cell."""
        cfg = experiment(tmp_path, experiment="banana", T=400.0, h_list=[2.0, 20.0], emit_plots=True)
        summary = cmd_banana(cfg)
        assert len(summary.cells) == 6
        assert (tmp_path / "banana_summary.csv").exists()
        assert (tmp_path / "banana_h20.svg").exists()
        document = json.loads((tmp_path / "banana_summary.json").read_text())
        assert len(document["cells"]) == 6
        for cell in summary.cells:
            if cell.status == "ok":
                assert cell.hausdorff_gc >= 0.0

    @pytest.mark.slow
    def test_full_banana_verdicts(self, tmp_path):
        """Test that only the modified method tracks the banana at h = 20 and boris matches it at h = 0.2."""
        summary = cmd_banana(experiment(tmp_path, experiment="banana", workers=2))
        assert summary.verdicts["modified_beats_boris"]
        assert summary.verdicts["modified_beats_boris-filtered"]
        assert summary.verdicts["boris_small_step_ok"]


class TestConverge:
    """Tests for cmd_converge."""

    def test_small_sweep(self, tmp_path):
        """Test the table and summary files of a two-by-two sweep."""
        cfg = experiment(
            tmp_path,
            experiment="converge",
            eps_list=[2.0**-6, 2.0**-7],
            h_list=[0.25, 0.125],
            T=0.5,
            gyro_substeps=20,
            richardson=False,
            emit_plots=True,
        )
        table = cmd_converge(cfg)
        assert len(table.rows) == 4
        lines = (tmp_path / "converge_table.csv").read_text().splitlines()
        assert len(lines) == 5
        summary = json.loads((tmp_path / "converge_summary.json").read_text())
        assert summary["method"] == "modified-boris"
        assert "err_x_final" in summary["plateaus"]
        assert (tmp_path / "converge_err_vperp.svg").exists()


class TestCheck:
    """Tests for cmd_check."""

    def test_report_passed(self):
        """Test the pass rule of the check report."""
        ok = CheckResult("modified-boris", 20.0, max_nondegeneracy=1.5)
        assert CheckReport([ok], bound=10.0).passed
        assert not CheckReport([ok], bound=1.0).passed
        assert not CheckReport([CheckResult("boris", 20.0, nonfinite=True)], bound=10.0).passed

    def test_short_tokamak_check(self, tmp_path):
        """Test diagnostics of a short tokamak run."""
        report = cmd_check(experiment(tmp_path, experiment="check", T=400.0))
        (result,) = report.results
        assert result.method == "modified-boris"
        assert result.max_nondegeneracy is not None
        assert result.northrop_max < 1e-10
        assert json.loads((tmp_path / "check_report.json").read_text())["field"] == "tokamak"

    def test_report_flags_finite_difference_jacobian(self, tmp_path):
        """Test that a field without B1' is marked in the check report."""
        cfg = experiment(tmp_path, experiment="check", field={"name": "uniform"})
        run = resolve(cfg)
        report = check_model(cfg, run, axial_field_without_jacobian(run.eps))
        assert report.analytic_jacobian is False
        assert report.passed
        assert json.loads((tmp_path / "check_report.json").read_text())["analytic_jacobian"] is False

    def test_report_analytic_jacobian(self, tmp_path):
        """Test that the uniform field reports an analytic Jacobian."""
        report = cmd_check(experiment(tmp_path, experiment="check", field={"name": "uniform"}))
        assert report.analytic_jacobian is True
        assert json.loads((tmp_path / "check_report.json").read_text())["analytic_jacobian"] is True


class TestRunMetadata:
    """Tests for the metadata document of a trajectory."""

    def test_finite_difference_jacobian_flag(self, tmp_path):
        """Test analytic_jacobian = False for a field without B1'."""
        cfg = experiment(tmp_path, field={"name": "uniform"})
        run = resolve(cfg)
        model = axial_field_without_jacobian(run.eps)
        trajectory = integrate(integrator_config(cfg, run, Method.MODIFIED_BORIS, run.h), model)
        meta = run_metadata(trajectory, model, run, "x.csv", seed=0)
        assert meta.analytic_jacobian is False
        assert meta.num_steps == 10
