"""Tests for CSV/JSON output and SVG plots."""

import json

import numpy as np
import pytest

from core.errors import ConfigurationError
from core.fields import TokamakField
from core.integrators import IntegratorConfig, Method, integrate
from harness.output import (
    TRAJECTORY_COLUMNS,
    ensure_dir,
    fmt,
    major_radius,
    read_trajectory_csv,
    write_json,
    write_table_csv,
    write_trajectory_csv,
)
from harness.plots import MAX_POINTS, LinePlot


@pytest.fixture
def short_run(tokamak_state):
    """A few modified-Boris steps on the banana orbit."""
    config = IntegratorConfig(method=Method.MODIFIED_BORIS, h=20.0, T=200.0, initial=tokamak_state)
    return integrate(config, TokamakField())


class TestFormatting:
    """Tests for number formatting."""

    def test_seventeen_digits_round_trip(self):
        """Test that 17 significant digits reproduce the double."""
        value = 0.1 + 0.2
        assert float(fmt(value)) == value

    def test_major_radius(self):
        """Test R = sqrt(x1² + x2²)."""
        assert major_radius(np.array([[3.0, 4.0, 7.0]])).tolist() == [5.0]


class TestTrajectoryCsv:
    """Tests for the trajectory CSV."""

    def test_header_and_rows(self, short_run, tmp_path):
        """Test the column header and one row per output time."""
        path = write_trajectory_csv(tmp_path / "run.csv", short_run)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
        assert len(lines) == 1 + 11
        assert lines[1].startswith("0,0,")

    def test_read_back(self, short_run, tmp_path):
        """Test that reading the CSV restores positions and diagnostics."""
        path = write_trajectory_csv(tmp_path / "run.csv", short_run)
        restored = read_trajectory_csv(path, Method.MODIFIED_BORIS)
        assert restored.h == pytest.approx(20.0)
        assert np.allclose(restored.x, short_run.x, rtol=1e-15, atol=0.0)
        assert np.allclose(restored.diagnostics.mu, short_run.diagnostics.mu, rtol=1e-15, atol=0.0)

    def test_deterministic_bytes(self, short_run, tmp_path):
        """Test that writing twice gives identical files."""
        a = write_trajectory_csv(tmp_path / "a.csv", short_run).read_bytes()
        b = write_trajectory_csv(tmp_path / "b.csv", short_run).read_bytes()
        assert a == b

    def test_requires_diagnostics(self, short_run, tmp_path):
        """Test that a trajectory without diagnostics is rejected."""
        short_run.diagnostics = None
        with pytest.raises(ValueError):
            write_trajectory_csv(tmp_path / "run.csv", short_run)

    def test_bad_header(self, tmp_path):
        """Test that a foreign CSV is a configuration error."""
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigurationError):
            read_trajectory_csv(path)


class TestTablesAndJson:
    """Tests for table CSVs and JSON documents."""

    def test_table_csv(self, tmp_path):
        """Test dict rows with float formatting."""
        path = write_table_csv(tmp_path / "t.csv", [{"h": 0.5, "name": "x"}, {"h": 0.25, "name": "y"}])
        assert path.read_text().splitlines() == ["h,name", "0.5,x", "0.25,y"]

    def test_empty_table(self, tmp_path):
        """Test that no rows gives an empty file."""
        assert write_table_csv(tmp_path / "e.csv", []).read_text() == ""

    def test_json_sorted(self, tmp_path):
        """Test that JSON keys are sorted."""
        path = write_json(tmp_path / "d.json", {"b": 1, "a": 2})
        assert list(json.loads(path.read_text())) == ["a", "b"]

    def test_ensure_dir_nested(self, tmp_path):
        """Test that nested output directories are created."""
        out = ensure_dir(tmp_path / "a" / "b")
        assert out.is_dir()

    def test_ensure_dir_over_file(self, tmp_path):
        """Test that a file in the way is a configuration error."""
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(ConfigurationError):
            ensure_dir(blocker / "sub")


class TestLinePlot:
    """Tests for the SVG line plot."""

    def test_render_contains_series(self):
        """Test that the document holds the title, a polyline and the legend."""
        plot = LinePlot(title="Orbit", xlabel="R", ylabel="x3")
        plot.add_series("reference", [1.0, 1.1, 1.2], [0.0, 0.1, 0.0])
        svg = plot.render()
        assert svg.startswith("<?xml")
        assert svg.rstrip().endswith("</svg>")
        assert "<polyline" in svg
        assert ">reference<" in svg
        assert ">Orbit<" in svg

    def test_loglog_drops_nonpositive(self):
        """Test that zero and infinite values are dropped on log axes."""
        plot = LinePlot(title="err", xlabel="eps", ylabel="err", loglog=True)
        plot.add_series("h", [1e-3, 1e-4, 1e-5], [0.0, 1e-2, np.inf], markers=True)
        assert len(plot.series[0].x) == 1
        assert plot.series[0].x[0] == pytest.approx(-4.0)
        assert plot.render().count("<circle") == 1

    def test_long_series_thinned(self):
        """Test that long series are thinned before drawing."""
        plot = LinePlot(title="t", xlabel="x", ylabel="y")
        x = np.linspace(0.0, 1.0, 3 * MAX_POINTS)
        plot.add_series("s", x, x)
        assert len(plot.series[0].x) <= MAX_POINTS

    def test_escapes_labels(self):
        """Test that labels are XML-escaped."""
        plot = LinePlot(title="a < b", xlabel="x", ylabel="y")
        assert "a &lt; b" in plot.render()

    def test_empty_plot(self, tmp_path):
        """Test that a plot without series still renders."""
        path = LinePlot(title="empty", xlabel="x", ylabel="y").save(tmp_path / "e.svg")
        assert "</svg>" in path.read_text()
