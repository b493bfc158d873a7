# probfem/tests/test_cli.py
import json
from unittest.mock import patch

import pytest

from probfem import __version__
from probfem.cli import build_parser, main
from probfem.errors import DataMismatchError
from probfem.models import ExperimentResult, ParameterSummary


def _result():
    return ExperimentResult(
        problem="pullout", method="fem", h=1.0, seed=0,
        parameters={"EA": ParameterSummary(mean=0.8, std=0.01, q025=0.78, median=0.8, q975=0.82)},
        ground_truth={"EA": 0.8, "k": 70.0}, acceptance_rate=0.23, data_hash="0" * 64,
        config_hash="1" * 64, runtime_seconds=1.5, output_dir="out",
    )


class TestParser:
    """Test argument parsing."""

    def test_run_requires_source(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run"])

    def test_config_and_preset_exclusive(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run", "--config", "x.json", "--preset", "pullout"])

    def test_run_options(self):
        args = build_parser().parse_args(["run", "--preset", "pullout", "--method", "rmfem",
                                          "--seed", "4", "--paper-scale", "--out", "r"])
        assert (args.preset, args.method, args.seed, args.paper_scale, args.out) == ("pullout", "rmfem", 4, True, "r")

    def test_mesh_defaults(self):
        args = build_parser().parse_args(["mesh", "--out", "m.txt"])
        assert args.problem == "three_point"
        assert args.h == 0.2

    def test_version(self, capsys):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--version"])
        assert __version__ in capsys.readouterr().out


class TestCommands:
    """Test command handlers."""

    @patch('probfem.cli.ExperimentRunner')
    def test_run(self, mock_runner_class, capsys):
        mock_runner_class.return_value.run.return_value = _result()

        assert main(["run", "--preset", "pullout", "--method", "bfem", "--seed", "2"]) == 0

        config = mock_runner_class.call_args[0][0]
        assert config.experiment.method.value == "bfem"
        assert config.experiment.seed == 2
        out = capsys.readouterr().out
        assert "pullout/fem h=1: acceptance 0.230" in out
        assert "Results written to out" in out

    @patch('probfem.cli.ExperimentRunner')
    def test_run_from_file(self, mock_runner_class, tmp_path):
        mock_runner_class.return_value.run.return_value = _result()
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps({"preset": "three-point", "h": 0.1}))

        assert main(["run", "--config", str(path), "--paper-scale"]) == 0

        assert mock_runner_class.call_args[0][0].experiment.h == 0.05

    def test_run_missing_config(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "none.json")]) == 1
        assert "probfem run: error: Config file not found" in capsys.readouterr().err

    @patch('probfem.cli.compare_directories')
    def test_compare_error(self, mock_compare, capsys):
        mock_compare.side_effect = DataMismatchError("bundles use different observation data")
        assert main(["compare", "a", "b"]) == 1
        assert "probfem compare: error: bundles use different observation data" in capsys.readouterr().err

    def test_mesh(self, tmp_path, capsys):
        path = tmp_path / "bar.txt"
        assert main(["mesh", "--problem", "pullout", "--h", "0.5", "--out", str(path)]) == 0
        assert path.read_text().startswith("1 3 2")
        assert "3 nodes, 2 elements" in capsys.readouterr().out
