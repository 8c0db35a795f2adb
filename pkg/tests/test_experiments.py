"""
Unit tests for the experiment registry, configuration, trace output and acceptance suites.
"""

import json
import math

import numpy as np
import pytest

from fenchel_game import __version__
from fenchel_game.dynamics import REFERENCE_METHODS
from fenchel_game.experiments import (
    EXPERIMENTS,
    OUTPUT_ENV_VAR,
    ExperimentSpec,
    Report,
    ReportRow,
    atomic_write_text,
    default_output_dir,
    derive_seed,
    equivalence_trace,
    format_value,
    get_experiment,
    parse_assignment,
    regret_excess,
    run_experiment,
    validate_params,
    verify,
)


class TestSeeds:
    """Test sub-stream seed derivation."""

    def test_deterministic(self):
        """Same inputs give the same seed."""
        assert derive_seed(0, "toy") == derive_seed(0, "toy")

    def test_distinct_streams(self):
        """Labels, indices and roots all change the seed."""
        seeds = {derive_seed(0, "toy"), derive_seed(0, "phase"), derive_seed(0, "toy", 1), derive_seed(1, "toy")}
        assert len(seeds) == 4

    def test_range(self):
        """Seeds fit in 64 bits."""
        assert 0 <= derive_seed(7, "x", 3) < 2**64


class TestFormatValue:
    """Test CSV cell formatting."""

    def test_scalars(self):
        """Test each scalar kind."""
        assert format_value(None) == ""
        assert format_value(True) == "1"
        assert format_value(False) == "0"
        assert format_value(3) == "3"
        assert format_value(np.int64(4)) == "4"
        assert format_value(1.5) == "1.5"
        assert format_value(np.float64(0.25)) == "0.25"

    def test_full_precision(self):
        """Floats keep 17 significant digits."""
        assert format_value(0.1) == "0.10000000000000001"
        assert float(format_value(1.0 / 3.0)) == 1.0 / 3.0

    def test_non_finite(self):
        """Test inf and nan cells."""
        assert format_value(math.inf) == "inf"
        assert format_value(math.nan) == "nan"

    def test_non_scalar(self):
        """Lists cannot be written to a cell."""
        with pytest.raises(ValueError, match="Cannot write"):
            format_value([1.0])


class TestParameters:
    """Test parameter validation and overrides."""

    def test_unknown_experiment(self):
        """Unknown names should list the valid experiments."""
        with pytest.raises(ValueError, match="Valid experiments"):
            get_experiment("nope")

    def test_defaults_merged(self):
        """Test that defaults fill missing parameters."""
        params = validate_params("fw_quadratic_ball", {"T": 10})
        assert params == {"c": [2.0, 0.0], "radius": 1.0, "T": 10}

    def test_int_promoted_to_float(self):
        """Integers are accepted for float parameters."""
        params = validate_params("fw_quadratic_ball", {"radius": 2})
        assert isinstance(params["radius"], float)

    def test_unknown_parameter(self):
        """Undeclared parameters should fail."""
        with pytest.raises(ValueError, match="Unknown parameter 'steps'"):
            validate_params("fw_quadratic_ball", {"steps": 10})

    def test_type_mismatch(self):
        """Strings are not integers."""
        with pytest.raises(ValueError, match="expects int"):
            validate_params("fw_quadratic_ball", {"T": "ten"})

    def test_bool_is_not_int(self):
        """Booleans are rejected for numeric parameters."""
        with pytest.raises(ValueError, match="expects int"):
            validate_params("fw_quadratic_ball", {"T": True})

    def test_parse_assignment(self):
        """Test JSON values, raw strings and dot paths."""
        assert parse_assignment("T=50") == (["T"], 50)
        assert parse_assignment("preset=gauge_fw") == (["preset"], "gauge_fw")
        assert parse_assignment("a.b=[1, 2]") == (["a", "b"], [1, 2])

    def test_parse_assignment_invalid(self):
        """Assignments need '=' and a key."""
        with pytest.raises(ValueError, match="Expected key=value"):
            parse_assignment("T")
        with pytest.raises(ValueError, match="Expected key=value"):
            parse_assignment("=3")


class TestExperimentSpec:
    """Test JSON configs and spec handling."""

    def test_from_dict(self):
        """Test a valid document."""
        document = {"schema_version": 1, "experiment": "fw_quadratic_ball", "seed": 3, "params": {"T": 5}}
        spec = ExperimentSpec.from_dict(document)
        assert spec.name == "fw_quadratic_ball"
        assert spec.seed == 3
        assert spec.resolved_params()["T"] == 5

    def test_wrong_schema_version(self):
        """Other schema versions should fail."""
        with pytest.raises(ValueError, match="schema_version"):
            ExperimentSpec.from_dict({"schema_version": 2, "experiment": "fw_quadratic_ball"})

    def test_unknown_keys(self):
        """Unknown top-level keys should fail."""
        with pytest.raises(ValueError, match="Unknown config keys: extra"):
            ExperimentSpec.from_dict({"schema_version": 1, "experiment": "fw_quadratic_ball", "extra": 1})

    def test_negative_seed(self):
        """Seeds must be nonnegative integers."""
        with pytest.raises(ValueError, match="seed must be a nonnegative integer"):
            ExperimentSpec.from_dict({"schema_version": 1, "experiment": "fw_quadratic_ball", "seed": -1})

    def test_missing_name(self):
        """The experiment name is required."""
        with pytest.raises(ValueError, match="non-empty 'experiment'"):
            ExperimentSpec.from_dict({"schema_version": 1})

    def test_invalid_json_file(self, tmp_path):
        """Files that are not JSON should fail."""
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ValueError, match="Invalid JSON"):
            ExperimentSpec.from_file(path)

    def test_from_file(self, tmp_path):
        """Test loading a config file."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"schema_version": 1, "experiment": "gauge_fw_ball", "params": {"T": 7}}))
        spec = ExperimentSpec.from_file(path)
        assert spec.resolved_params()["T"] == 7

    def test_with_overrides(self):
        """Test that overrides return a new validated spec."""
        spec = ExperimentSpec("fw_quadratic_ball")
        updated = spec.with_overrides(["T=50", "c=[1.0, 1.0]"])
        assert updated.resolved_params()["T"] == 50
        assert updated.resolved_params()["c"] == [1.0, 1.0]
        assert spec.params == {}

    def test_invalid_override(self):
        """Overrides that fail validation should raise."""
        with pytest.raises(ValueError, match="expects int"):
            ExperimentSpec("fw_quadratic_ball").with_overrides(["T=abc"])

    def test_digest(self):
        """Test that the digest follows the resolved parameters."""
        implicit = ExperimentSpec("fw_quadratic_ball")
        explicit = ExperimentSpec("fw_quadratic_ball", params={"T": 1000})
        changed = ExperimentSpec("fw_quadratic_ball", params={"T": 999})
        assert implicit.digest() == explicit.digest()
        assert implicit.digest() != changed.digest()
        assert len(implicit.digest()) == 64


class TestOutput:
    """Test trace files and the sidecar."""

    def test_default_output_dir(self, monkeypatch, tmp_path):
        """Test the environment override."""
        monkeypatch.setenv(OUTPUT_ENV_VAR, str(tmp_path))
        assert default_output_dir() == tmp_path
        monkeypatch.delenv(OUTPUT_ENV_VAR)
        assert default_output_dir().name == "outputs"

    def test_atomic_write(self, tmp_path):
        """Test that parents are created and no temporary file remains."""
        target = tmp_path / "nested" / "file.txt"
        atomic_write_text(target, "hello\n")
        assert target.read_text() == "hello\n"
        assert [p.name for p in target.parent.iterdir()] == ["file.txt"]

    def test_fw_trace_files(self, tmp_path):
        """Test the CSV header, row count and sidecar contents."""
        spec = ExperimentSpec("fw_quadratic_ball", seed=2, params={"T": 20})
        paths = run_experiment(spec, tmp_path)
        assert [p.name for p in paths] == ["fw_quadratic_ball.csv", "fw_quadratic_ball.json"]

        lines = paths[0].read_text().splitlines()
        assert lines[0] == "t,f_value,gap"
        assert len(lines) == 21
        assert lines[1].startswith("1,")

        sidecar = json.loads(paths[1].read_text())
        assert sidecar["experiment"] == "fw_quadratic_ball"
        assert sidecar["seed"] == 2
        assert sidecar["version"] == __version__
        assert sidecar["config_digest"] == spec.digest()
        assert sidecar["columns"] == {"fw_quadratic_ball.csv": ["t", "f_value", "gap"]}

    def test_list_parameter(self, tmp_path):
        """Test a list-valued parameter."""
        spec = ExperimentSpec("saddle_parameters", params={"eps": [0.1, 0.05]})
        paths = run_experiment(spec, tmp_path)
        assert paths[0].name == "saddle_parameters.csv"
        assert len(paths[0].read_text().splitlines()) == 3

    def test_keyed_traces(self, tmp_path):
        """Test one file per trace key."""
        spec = ExperimentSpec("polyak_quadratic", params={"kappas": [10.0, 100.0], "d": 3, "T": 20})
        paths = run_experiment(spec, tmp_path)
        names = [p.name for p in paths]
        assert names == ["polyak_quadratic_kappa_10.csv", "polyak_quadratic_kappa_100.csv", "polyak_quadratic.json"]
        assert paths[0].read_text().splitlines()[0] == "t,f_value,residual,bound"

    def test_runs_are_byte_identical(self, tmp_path):
        """Test that repeated runs write identical files."""
        spec = ExperimentSpec("nuclear_completion", seed=1, params={"T": 5})
        first = run_experiment(spec, tmp_path / "a")
        second = run_experiment(spec, tmp_path / "b")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_game_experiment(self, tmp_path):
        """Test running a preset on the seeded least-squares problem."""
        spec = ExperimentSpec("game", params={"preset": "frank_wolfe", "T": 30})
        paths = run_experiment(spec, tmp_path)
        header = paths[0].read_text().splitlines()[0]
        assert header == "t,f_value,error,gap_estimate,x_regret,y_regret"

    def test_game_unknown_preset(self, tmp_path):
        """Unknown presets should fail."""
        with pytest.raises(ValueError, match="Unknown preset"):
            run_experiment(ExperimentSpec("game", params={"preset": "adagrad"}), tmp_path)


class TestChecks:
    """Test acceptance helpers on reduced sizes."""

    def test_registry(self):
        """Test that the experiments are registered."""
        for name in ("fw_quadratic_ball", "equivalence", "polyak_quadratic", "saddle_beta_sweep", "nuclear_completion"):
            assert name in EXPERIMENTS

    def test_equivalence_trace(self):
        """Test the deviation column on one small instance."""
        trace = equivalence_trace("frank_wolfe", 30, 10.0, 4, derive_seed(0, "equivalence"))
        assert len(trace) == 30
        assert max(trace.column("deviation")) <= 1e-8

    def test_accel_linear_constants(self):
        """The constant fitted through error(1) never exceeds the certified one."""
        params = validate_params("accel_linear_quadratic", {"T": 5})
        trace = get_experiment("accel_linear_quadratic").func(params, 0)[""]
        theta = trace.metadata["theta"]
        assert trace.rows[0]["t"] == 1
        assert trace.metadata["C_fit"] == pytest.approx(trace.rows[0]["error"] / (1.0 - theta))
        assert 0.0 <= trace.metadata["C_fit"] <= trace.metadata["C"] * (1.0 + 1e-9)

    def test_relu_ntk(self):
        """Test the ReLU experiment at full width: momentum ends lower with few pattern changes."""
        traces = get_experiment("relu_ntk").func(validate_params("relu_ntk", {}), 0)
        gd, momentum = traces["gd"], traces["momentum"]
        assert len(momentum) == 201
        assert momentum.metadata["replicates"] == 8
        assert len(momentum.metadata["kappa"]) == 8
        assert momentum.last("loss") < gd.last("loss")
        assert momentum.last("pattern_change") < 0.02
        assert momentum.last("pattern_change") <= momentum.last("pattern_change_max")
        assert gd.rows[0]["pattern_change"] == 0.0

    def test_relu_ntk_needs_replicates(self):
        """Zero replicates should fail."""
        with pytest.raises(ValueError, match="replicates"):
            get_experiment("relu_ntk").func(validate_params("relu_ntk", {"replicates": 0}), 0)

    def test_deep_linear_identity(self):
        """Test the near-identity deep linear experiment on a small network."""
        params = validate_params("deep_linear_identity", {"d": 4, "m": 6, "depth": 3, "n": 2, "T": 5})
        traces = get_experiment("deep_linear_identity").func(params, 0)
        assert sorted(traces) == ["gd", "momentum"]
        for trace in traces.values():
            assert len(trace) == 6
            assert all(np.isfinite(trace.column("residual")))
        assert traces["gd"].metadata["beta"] == 0.0
        assert traces["momentum"].metadata["beta"] > 0.0

    def test_regret_excess(self):
        """Test the regret bounds on a few random sequences."""
        worst = regret_excess(0, sequences=5, rounds=10)
        assert set(worst) == {"best_response", "ftl_plus", "ftrl_plus"}
        assert max(worst.values()) <= 1e-9

    def test_report_needs_rows(self):
        """An empty report does not pass."""
        report = Report()
        assert report.passed is False
        assert report.exit_code == 1

    def test_report_json(self, tmp_path):
        """Test the JSON form with a non-finite measurement."""
        report = Report([ReportRow("rates", "x", True, math.inf, 1.0, None, "")])
        assert report.exit_code == 0
        document = json.loads(report.write_json(tmp_path / "report.json").read_text())
        assert document["passed"] is True
        assert document["rows"][0]["measured"] == "inf"

    def test_verify_empty_suite(self):
        """An empty suite name should fail."""
        with pytest.raises(ValueError, match="empty"):
            verify("")

    def test_verify_unknown_suite(self):
        """Unknown suites should list the valid ones."""
        with pytest.raises(ValueError, match="Valid suites"):
            verify("speed")


@pytest.mark.slow
class TestSuites:
    """Run the acceptance suites at full size."""

    def test_equivalence(self):
        """Test one passing row per method."""
        report = verify("equivalence")
        assert len(report.rows) == len(REFERENCE_METHODS)
        assert report.passed

    @pytest.mark.parametrize("suite", ["rates", "projection_free", "momentum", "saddle"])
    def test_suite_passes(self, suite):
        """Test that every check of the suite passes."""
        report = verify(suite)
        failed = [row.name for row in report.rows if not row.passed]
        assert failed == []
