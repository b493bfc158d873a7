# probfem/tests/integration/test_three_point_posteriors.py
"""Desk-scale hole identification in the three-point bending beam."""
import numpy as np
import pytest

from probfem.config import Config
from probfem.experiments import ExperimentRunner, load_bundle

SEEDS = (0, 1, 2)
TRUE_CENTER = np.array([1.0, 0.4])

pytestmark = pytest.mark.slow


def run_bundle(directory, method, seed):
    config = Config.load_preset("three-point", {
        "method": method,
        "seed": seed,
        "output_dir": str(directory / f"{method}-s{seed}"),
    })
    ExperimentRunner(config).run()
    return load_bundle(config.experiment.output_dir)


def center_error(bundle):
    center = np.array([bundle.column("x").mean(), bundle.column("y").mean()])
    return float(np.linalg.norm(center - TRUE_CENTER))


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("three-point")


def test_bfem_locates_hole_better_than_fem(workdir):
    wins = sum(center_error(run_bundle(workdir, "bfem", seed)) < center_error(run_bundle(workdir, "fem", seed))
               for seed in SEEDS)
    assert wins >= 2


def test_statfem_scales_coarse_response_down(workdir):
    statfem = run_bundle(workdir, "statfem", SEEDS[0])
    assert 0.85 < statfem.column("rho").mean() < 1.0
