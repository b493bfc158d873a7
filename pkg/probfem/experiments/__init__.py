"""Pullout and three-point-bending inverse problems, run and compared end to end."""
from probfem.experiments.data import data_hash, pullout_exact_solution, synthesize_observations
from probfem.experiments.pullout import PulloutProblem
from probfem.experiments.three_point import ThreePointProblem, ThreePointSettings, beam_boundary_conditions
from probfem.experiments.runner import ExperimentRunner, config_hash, generate_mesh, run_experiment
from probfem.experiments.compare import (
    Bundle,
    compare_directories,
    compare_posteriors,
    credible_region_contains,
    format_metrics_markdown,
    load_bundle,
)

__all__ = [
    "Bundle",
    "ExperimentRunner",
    "PulloutProblem",
    "ThreePointProblem",
    "ThreePointSettings",
    "beam_boundary_conditions",
    "compare_directories",
    "compare_posteriors",
    "config_hash",
    "credible_region_contains",
    "data_hash",
    "format_metrics_markdown",
    "generate_mesh",
    "load_bundle",
    "pullout_exact_solution",
    "run_experiment",
    "synthesize_observations",
]
