"""
Unit tests for the CLI.
"""

import json

import pytest

import fenchel_game.cli as cli
from fenchel_game.cli import EXIT_OK, EXIT_USAGE, create_parser, main
from fenchel_game.experiments import Report, ReportRow


def _one_row_report(suite, seed=0):
    return Report([ReportRow(suite, "check", True, 1.0, 2.0, None, f"seed={seed}")])


class TestCLIParser:
    """Test CLI argument parser."""

    def test_parser_creation(self):
        """Test that parser is created successfully."""
        parser = create_parser()
        assert parser is not None
        assert parser.prog == "fenchel-game"

    def test_version_flag(self):
        """Test --version flag."""
        parser = create_parser()

        with pytest.raises(SystemExit):
            parser.parse_args(["--version"])

    def test_help_flag(self):
        """Test --help flag."""
        parser = create_parser()

        with pytest.raises(SystemExit):
            parser.parse_args(["--help"])

    def test_verbose_flag(self):
        """Test --verbose global option."""
        parser = create_parser()
        args = parser.parse_args(["--verbose", "list"])
        assert args.verbose is True


class TestRunCommand:
    """Test run command parsing and execution."""

    def test_basic_command(self):
        """Test basic run command."""
        parser = create_parser()
        args = parser.parse_args(["run", "fw_quadratic_ball"])

        assert args.command == "run"
        assert args.target == "fw_quadratic_ball"
        assert args.out is None
        assert args.seed is None
        assert args.set == []

    def test_repeated_overrides(self):
        """Test that --set accumulates."""
        parser = create_parser()
        args = parser.parse_args(["run", "fw_quadratic_ball", "--set", "T=10", "--set", "radius=2"])

        assert args.set == ["T=10", "radius=2"]

    def test_run_experiment(self, tmp_path, capsys):
        """Test a short run writes its CSV and sidecar."""
        exit_code = main(["run", "fw_quadratic_ball", "--out", str(tmp_path), "--seed", "3", "--set", "T=10"])

        assert exit_code == EXIT_OK
        assert (tmp_path / "fw_quadratic_ball.csv").exists()
        sidecar = json.loads((tmp_path / "fw_quadratic_ball.json").read_text())
        assert sidecar["seed"] == 3
        assert "[SAVED]" in capsys.readouterr().out

    def test_run_preset(self, tmp_path):
        """Test that a preset name runs the game experiment."""
        exit_code = main(["run", "frank_wolfe", "--out", str(tmp_path), "--set", "T=10"])

        assert exit_code == EXIT_OK
        assert (tmp_path / "game.csv").exists()

    def test_run_config_file(self, tmp_path):
        """Test running from a JSON config."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"schema_version": 1, "experiment": "gauge_fw_ball", "params": {"T": 10}}))

        exit_code = main(["run", str(config), "--out", str(tmp_path / "out")])

        assert exit_code == EXIT_OK
        assert (tmp_path / "out" / "gauge_fw_ball.csv").exists()

    def test_unknown_target(self, tmp_path, capsys):
        """Unknown targets are usage errors."""
        exit_code = main(["run", "adagrad", "--out", str(tmp_path)])

        assert exit_code == EXIT_USAGE
        assert "Unknown experiment or preset" in capsys.readouterr().err

    def test_negative_seed(self, tmp_path):
        """Negative seeds are usage errors."""
        assert main(["run", "fw_quadratic_ball", "--out", str(tmp_path), "--seed", "-1"]) == EXIT_USAGE

    def test_invalid_override(self, tmp_path, capsys):
        """Overrides of unknown parameters are usage errors."""
        exit_code = main(["run", "fw_quadratic_ball", "--out", str(tmp_path), "--set", "steps=3"])

        assert exit_code == EXIT_USAGE
        assert "Unknown parameter" in capsys.readouterr().err

    def test_output_env_var(self, tmp_path, monkeypatch):
        """Test the output directory from the environment."""
        monkeypatch.setenv("FENCHEL_GAME_OUT", str(tmp_path))

        assert main(["run", "fw_quadratic_ball", "--set", "T=5"]) == EXIT_OK
        assert (tmp_path / "fw_quadratic_ball.csv").exists()


class TestVerifyCommand:
    """Test verify command parsing."""

    def test_basic_command(self):
        """Test basic verify command."""
        parser = create_parser()
        args = parser.parse_args(["verify", "rates"])

        assert args.command == "verify"
        assert args.suite == "rates"
        assert args.json is None
        assert args.out is None
        assert args.seed == 0

    def test_empty_suite(self, capsys):
        """An empty suite name is a usage error."""
        assert main(["verify", ""]) == EXIT_USAGE
        assert "[ERROR]" in capsys.readouterr().err

    def test_unknown_suite(self):
        """Unknown suites are usage errors."""
        assert main(["verify", "speed"]) == EXIT_USAGE

    def test_report_saved_to_out(self, tmp_path, monkeypatch, capsys):
        """The report is written into --out without --json."""
        monkeypatch.setattr(cli, "verify", _one_row_report)

        assert main(["verify", "rates", "--out", str(tmp_path)]) == EXIT_OK
        report_path = tmp_path / "verify_rates.json"
        assert report_path.exists()
        assert json.loads(report_path.read_text())["passed"] is True
        assert "[SAVED]" in capsys.readouterr().out

    def test_report_saved_to_env_dir(self, tmp_path, monkeypatch):
        """Without --out the report goes to the output directory from the environment."""
        monkeypatch.setattr(cli, "verify", _one_row_report)
        monkeypatch.setenv("FENCHEL_GAME_OUT", str(tmp_path))

        assert main(["verify", "saddle"]) == EXIT_OK
        assert (tmp_path / "verify_saddle.json").exists()

    def test_json_path_override(self, tmp_path, monkeypatch):
        """--json names the report file directly."""
        monkeypatch.setattr(cli, "verify", _one_row_report)
        target = tmp_path / "nested" / "report.json"

        assert main(["verify", "rates", "--out", str(tmp_path), "--json", str(target)]) == EXIT_OK
        assert target.exists()
        assert not (tmp_path / "verify_rates.json").exists()


class TestOtherCommands:
    """Test list and the bare invocation."""

    def test_list(self, capsys):
        """Test that list prints experiments and presets."""
        assert main(["list"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "fw_quadratic_ball" in out
        assert "nesterov_1mem" in out

    def test_no_command(self):
        """A bare invocation prints help and fails."""
        assert main([]) == EXIT_USAGE
