"""Tests for the command line interface."""

import json

import pytest
from typer.testing import CliRunner

from nvpump import cli as cli_module
from nvpump.cli import EXIT_RUNTIME, EXIT_VALIDATION, cli


SE_CONFIG = """\
name: se-cli
system:
  b_field: 30.0
protocol:
  kind: se
readout:
  kind: esr
  esr:
    linewidth: {linewidth}
"""

SWEEP_CONFIG = """\
name: sweep-cli
system:
  b_field: 30.2
optics:
  flip_probability: 0.2
readout:
  kind: none
sweep:
  axes:
    cycles:
      values: [1, 2, 3]
"""


@pytest.fixture
def runner(monkeypatch):
    """CLI runner that leaves the test session's log handlers alone."""
    monkeypatch.setattr(cli_module, "configure_logging", lambda: None)
    return CliRunner()


@pytest.fixture
def se_file(tmp_path):
    path = tmp_path / "se.yaml"
    path.write_text(SE_CONFIG.format(linewidth=0.4))
    return path


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert result.output.strip() == "nvpump 0.1.0"


class TestToy:
    """Test the toy command."""

    def test_table_and_limit(self, runner):
        result = runner.invoke(cli, ["toy", "--pa", "1", "--pb", "0.01", "--n", "3"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "n,depleted,target,closed_form"
        assert lines[2] == "1,0.01,0.99,0.01"
        assert "# limit target population = 0.99" in result.output

    def test_rf_angle(self, runner):
        result = runner.invoke(cli, ["toy", "--rf-angle-pi", "1", "--pb", "0.2", "--n", "1"])
        assert result.exit_code == 0
        assert "# p_a = 1," in result.output

    def test_monte_carlo(self, runner):
        args = ["toy", "--pa", "0.5", "--pb", "0.2", "--trials", "1000", "--seed", "3"]
        result = runner.invoke(cli, args)
        assert "(1000 trials, seed 3)" in result.output

    def test_needs_one_rf_setting(self, runner):
        result = runner.invoke(cli, ["toy", "--pb", "0.2"])
        assert result.exit_code == EXIT_VALIDATION
        assert "exactly one of" in result.output

    def test_undefined_limit_is_skipped(self, runner):
        result = runner.invoke(cli, ["toy", "--pa", "0", "--pb", "0", "--n", "2"])
        assert result.exit_code == 0
        assert "limit" not in result.output


class TestPrograms:
    """Test parse and fmt."""

    def test_parse(self, runner, tmp_path):
        path = tmp_path / "shelve.seq"
        path.write_text("repeat 2 {\n  mw (0,0) -> (-1,0) 1pi\n  laser 1us\n}\n")
        result = runner.invoke(cli, ["parse", str(path)])
        assert result.exit_code == 0
        summary = json.loads(result.output)
        assert summary["name"] == "shelve"
        assert summary["repeat_count"] == 2

    def test_parse_error(self, runner, tmp_path):
        path = tmp_path / "bad.seq"
        path.write_text("laser 1us\nfoo bar\n")
        result = runner.invoke(cli, ["parse", str(path)])
        assert result.exit_code == EXIT_VALIDATION
        assert "line 2, column 1" in result.output

    def test_parse_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["parse", str(tmp_path / "missing.seq")])
        assert result.exit_code == EXIT_RUNTIME

    def test_fmt_write(self, runner, tmp_path):
        path = tmp_path / "messy.seq"
        path.write_text("mw (0,+1)->(-1,+1)   1pi # shelve\nlaser 250ns repump\n")
        result = runner.invoke(cli, ["fmt", str(path), "--write"])
        assert result.exit_code == 0
        assert path.read_text() == (
            "# program: messy\nmw (0,+1) -> (-1,+1) 1.0pi\nlaser 0.25us repump\n"
        )

    def test_fmt_prints(self, runner, tmp_path):
        path = tmp_path / "p.seq"
        path.write_text("laser 1us\n")
        result = runner.invoke(cli, ["fmt", str(path)])
        assert result.output == "# program: p\nlaser 1.0us\n"


class TestRun:
    """Test run and sweep."""

    def test_run(self, runner, se_file, tmp_path):
        result = runner.invoke(cli, ["run", str(se_file), "-o", str(tmp_path / "out")])
        assert result.exit_code == 0, result.output
        assert "P0=1.000000" in result.output
        assert (tmp_path / "out" / "manifest.json").is_file()

    def test_missing_config(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", str(tmp_path / "missing.yaml")])
        assert result.exit_code == EXIT_VALIDATION
        assert "config file not found" in result.output

    def test_readout_failure_is_runtime(self, runner, tmp_path):
        path = tmp_path / "wide.yaml"
        path.write_text(SE_CONFIG.format(linewidth=3.0))
        result = runner.invoke(cli, ["run", str(path), "-o", str(tmp_path / "out")])
        assert result.exit_code == EXIT_RUNTIME
        assert "not resolved" in result.output
        assert not (tmp_path / "out").exists()

    def test_sweep(self, runner, tmp_path):
        path = tmp_path / "sweep.yaml"
        path.write_text(SWEEP_CONFIG)
        result = runner.invoke(cli, ["sweep", str(path), "-o", str(tmp_path / "out"), "-w", "2"])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
        assert len(lines) == 4
        assert lines[0].startswith("cycles,n,p_a")


class TestPresets:
    """Test the presets sub-commands."""

    def test_list(self, runner):
        result = runner.invoke(cli, ["presets", "list"])
        assert result.exit_code == 0
        names = [line.split()[0] for line in result.output.splitlines()]
        assert names[0] == "fig1c"
        assert "fig4d" in names

    def test_show(self, runner):
        result = runner.invoke(cli, ["presets", "show", "fig2c_ii"])
        assert result.exit_code == 0
        assert "name: fig2c_ii" in result.output

    def test_show_unknown(self, runner):
        result = runner.invoke(cli, ["presets", "show", "nope"])
        assert result.exit_code == EXIT_VALIDATION
        assert "unknown preset" in result.output

    def test_run(self, runner, tmp_path):
        result = runner.invoke(cli, ["presets", "run", "fig2c_ii", "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "series.csv").is_file()
