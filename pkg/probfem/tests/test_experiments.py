# probfem/tests/test_experiments.py
import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from probfem.errors import DataMismatchError
from probfem.experiments import (
    Bundle,
    ExperimentRunner,
    PulloutProblem,
    ThreePointProblem,
    compare_directories,
    compare_posteriors,
    config_hash,
    credible_region_contains,
    data_hash,
    format_metrics_markdown,
    generate_mesh,
    load_bundle,
    pullout_exact_solution,
    synthesize_observations,
)
from probfem.experiments.three_point import GROUND_TRUTH as HOLE_TRUTH, beam_boundary_conditions
from probfem.fem import reaction_forces
from probfem.geometry import BeamGeometry
from probfem.inference.priors import pullout_prior
from probfem.mesh import find_nodes
from probfem.models import ExperimentConfig, MethodKind, ProblemKind
from probfem.tests.helpers import make_chain, unit_square_mesh

TRUTH = np.array([0.8, 70.0])


def short_experiment(tmp_path, method="fem", **overrides):
    data = dict(problem="pullout", method=method, h=1.0, sigma_e=0.5, seed=1,
                chain={"n_burn": 200, "n_samples": 200, "window": 20},
                rmfem={"M": 3}, output_dir=str(tmp_path / method))
    data.update(overrides)
    return ExperimentConfig(**data)


def write_bundle(path, method, h, samples, names=("EA", "k"), y_hash="same"):
    chain = make_chain(samples, names)
    chain.to_csv(path / "chain.csv")
    meta = {"method": method, "h": h, "data_hash": y_hash, "ground_truth": {"EA": 0.8, "k": 70.0}}
    (path / "meta.json").write_text(json.dumps(meta))
    return path


class TestPulloutSolution:
    """Test the closed-form bar displacement."""

    def test_reference_value(self):
        assert pullout_exact_solution(0.8, 70.0, 10.0, 1.0) == pytest.approx(1.336306, abs=1e-6)

    def test_zero_load(self):
        assert pullout_exact_solution(0.8, 70.0, 0.0, 0.5) == 0.0

    def test_profile(self):
        nu = np.sqrt(70.0 / 0.8)
        u = pullout_exact_solution(0.8, 70.0, 10.0, np.array([0.0, 1.0]))
        assert u.shape == (2,)
        assert u[0] == pytest.approx(u[1] / np.cosh(nu), rel=1e-12)

    def test_stiff_foundation_stays_finite(self):
        assert np.isfinite(pullout_exact_solution(1e-4, 1e4, 10.0, 1.0))

    @pytest.mark.parametrize("EA, k", [(0.0, 70.0), (0.8, -1.0)])
    def test_non_positive_parameters(self, EA, k):
        with pytest.raises(ValueError, match="must be positive"):
            pullout_exact_solution(EA, k, 10.0, 1.0)


class TestSyntheticData:
    """Test observation synthesis and fingerprints."""

    def test_noise_free_data_is_exact(self):
        y = synthesize_observations(PulloutProblem(h=0.5), TRUTH, 0.0, seed=0)
        np.testing.assert_allclose(y, [1.336306], atol=1e-6)

    def test_noise_level(self):
        problem = PulloutProblem(h=1.0)
        clean = problem.exact_prediction(TRUTH)[0]
        residuals = [synthesize_observations(problem, TRUTH, 1e-3, seed)[0] - clean for seed in range(2000)]
        assert np.std(residuals) == pytest.approx(1e-3, rel=0.08)

    def test_seeded(self):
        problem = PulloutProblem(h=1.0)
        first = synthesize_observations(problem, TRUTH, 1e-3, 42)
        np.testing.assert_array_equal(first, synthesize_observations(problem, TRUTH, 1e-3, 42))

    def test_negative_noise(self):
        with pytest.raises(ValueError, match="sigma_e must be non-negative"):
            synthesize_observations(PulloutProblem(h=1.0), TRUTH, -1.0, 0)

    def test_data_hash(self):
        assert len(data_hash(np.array([1.0, 2.0]))) == 64
        assert data_hash(np.array([1, 2])) == data_hash(np.array([1.0, 2.0]))
        assert data_hash(np.array([1.0, 2.0])) != data_hash(np.array([1.0, 2.0 + 1e-15]))


class TestPulloutProblem:
    """Test the pullout forward problem."""

    def test_h_must_divide_bar(self):
        with pytest.raises(ValueError, match="h must divide the unit bar"):
            PulloutProblem(h=0.3)
        with pytest.raises(ValueError, match="h must divide the unit bar"):
            PulloutProblem(h=0.0)

    def test_mesh_is_fixed(self):
        problem = PulloutProblem(h=0.25)
        assert problem.mesh(TRUTH) is problem.mesh([1.0, 100.0])
        assert problem.mesh().n_elements == 4

    def test_observation_operator_shared_across_threads(self):
        problem = PulloutProblem(h=0.25)
        mesh = problem.mesh()
        with ThreadPoolExecutor(max_workers=8) as pool:
            operators = list(pool.map(lambda _: problem.observation_operator(mesh), range(64)))
        assert all(operator is operators[0] for operator in operators)

    def test_refinement_cached(self):
        problem = PulloutProblem(h=0.25)
        assert problem.refine(problem.mesh()) is problem.refine(problem.mesh())

    def test_fem_approaches_exact(self):
        exact = pullout_exact_solution(0.8, 70.0, 10.0, 1.0)
        errors = [abs(PulloutProblem(h).predict(TRUTH)[0] - exact) for h in (0.25, 0.125, 1 / 16)]
        assert errors[0] > errors[1] > errors[2]


class TestThreePointProblem:
    """Test the beam forward problem."""

    def test_admissible(self):
        problem = ThreePointProblem()
        assert problem.admissible(list(HOLE_TRUTH.values()))
        assert not problem.admissible([1.0, 0.4, 0.4, 0.0, 0.9])
        assert not problem.admissible([0.0, 0.5, 0.4, 0.0, 0.25])

    def test_mesh_reused_for_same_theta(self):
        problem = ThreePointProblem()
        theta = list(HOLE_TRUTH.values())
        assert problem.mesh(theta) is problem.mesh(np.array(theta))

    def test_prediction_shape(self):
        problem = ThreePointProblem()
        prediction = problem.predict(np.array(list(HOLE_TRUTH.values())))
        assert prediction.shape == (48,)
        assert np.all(np.isfinite(prediction))
        assert problem.parameter_names == ("x", "y", "d", "alpha", "r")

    def test_ground_truth_load_reaction(self):
        problem = ThreePointProblem()
        assert problem.h == 0.2
        theta = np.array(list(HOLE_TRUTH.values()))
        solution = problem.solve(problem.mesh(theta), theta)
        system = solution.system
        load = find_nodes(solution.mesh, [problem.beam.load_point])[0]
        reactions = reaction_forces(system, solution.u)
        at_load = reactions[system.constrained_dofs == 2 * load + 1]
        assert at_load.shape == (1,)
        assert at_load[0] < 0
        assert np.abs(solution.u).max() <= 0.011

    def test_missing_supports(self):
        with pytest.raises(ValueError, match="no support_base edges"):
            beam_boundary_conditions(unit_square_mesh(2), BeamGeometry(), 0.01)


class TestRunner:
    """Test end-to-end runs on short chains."""

    def test_requires_config(self):
        with pytest.raises(ValueError, match="either config or experiment is required"):
            ExperimentRunner()

    def test_unknown_ground_truth(self, tmp_path):
        runner = ExperimentRunner(experiment=short_experiment(tmp_path, ground_truth={"E": 1.0}))
        with pytest.raises(ValueError, match="Unknown ground-truth parameters"):
            runner.ground_truth

    def test_ground_truth_override(self, tmp_path):
        runner = ExperimentRunner(experiment=short_experiment(tmp_path, ground_truth={"k": 50.0}))
        assert runner.ground_truth == {"EA": 0.8, "k": 50.0}

    def test_config_hash(self, tmp_path):
        first = short_experiment(tmp_path)
        assert config_hash(first) == config_hash(short_experiment(tmp_path))
        assert config_hash(first) != config_hash(short_experiment(tmp_path, seed=2))

    def test_fem_bundle(self, tmp_path):
        result = ExperimentRunner(experiment=short_experiment(tmp_path)).run()
        out = tmp_path / "fem"
        for name in ("chain.csv", "summary.json", "summary.md", "meta.json", "data.csv",
                     "kde_EA_k.csv", "marginals/EA.csv", "marginals/k.csv"):
            assert (out / name).exists(), name
        assert len(result.files) == 8
        assert set(result.parameters) == {"EA", "k"}
        assert result.method == MethodKind.FEM
        assert "log_correlation" in result.extras
        meta = json.loads((out / "meta.json").read_text())
        assert meta["data_hash"] == result.data_hash
        assert meta["ground_truth"] == {"EA": 0.8, "k": 70.0}

    def test_no_write(self, tmp_path):
        result = ExperimentRunner(experiment=short_experiment(tmp_path)).run(write=False)
        assert result.files == []
        assert not (tmp_path / "fem").exists()

    def test_statfem_parameters(self, tmp_path):
        result = ExperimentRunner(experiment=short_experiment(tmp_path, method="statfem")).run()
        assert list(result.parameters) == ["EA", "k", "rho", "ell_d", "sigma_d"]
        assert (tmp_path / "statfem" / "marginals" / "sigma_d.csv").exists()
        bundle = load_bundle(tmp_path / "statfem")
        assert bundle.samples.shape == (200, 5)

    def test_prior_override(self, tmp_path):
        runner = ExperimentRunner(experiment=short_experiment(
            tmp_path, prior={"k": {"type": "uniform", "a": 50.0, "b": 150.0}}))
        problem = runner.build_problem()
        likelihood = runner.build_likelihood(problem, runner.synthesize())
        prior = runner.build_prior(problem, likelihood)
        assert prior.names == ("EA", "k")
        assert prior.marginals[0] == pullout_prior().marginals[0]
        assert prior.bounds()[1] == (50.0, 150.0)
        unknown = ExperimentRunner(experiment=short_experiment(
            tmp_path, prior={"E": {"type": "uniform", "a": 0.0, "b": 1.0}}))
        with pytest.raises(ValueError, match="Unknown prior parameters"):
            unknown.build_prior(problem, likelihood)

    @pytest.mark.parametrize("method", ["bfem", "rmfem", "exact"])
    def test_other_methods_run(self, tmp_path, method):
        result = ExperimentRunner(experiment=short_experiment(tmp_path, method=method, h=0.5)).run(write=False)
        assert result.method == MethodKind(method)
        assert 0.0 <= result.acceptance_rate <= 1.0

    def test_same_data_for_every_method(self, tmp_path):
        hashes = {ExperimentRunner(experiment=short_experiment(tmp_path, method=m)).run(write=False).data_hash
                  for m in ("fem", "exact")}
        assert len(hashes) == 1

    def test_three_point_data_size(self, tmp_path):
        experiment = ExperimentConfig(problem="three_point", method="fem", h=0.2, sigma_e=1e-4, data_h=0.1,
                                      output_dir=str(tmp_path))
        assert ExperimentRunner(experiment=experiment).synthesize().shape == (48,)


class TestCredibleRegion:
    """Test the KDE highest-density region."""

    def test_center_inside_far_point_outside(self, rng):
        samples = rng.normal(size=(2000, 2))
        assert credible_region_contains(samples, [0.0, 0.0])
        assert not credible_region_contains(samples, [5.0, 5.0])

    def test_positive_parameters_in_log_space(self, rng):
        samples = rng.lognormal([0.0, 4.0], 0.1, size=(2000, 2))
        assert credible_region_contains(samples, [1.0, np.exp(4.0)])
        assert not credible_region_contains(samples, [1.5, np.exp(4.0)])

    def test_degenerate_samples(self):
        samples = np.ones((10, 2))
        assert credible_region_contains(samples, [1.0, 1.0])
        assert not credible_region_contains(samples, [1.0, 2.0])


class TestCompare:
    """Test cross-bundle metrics."""

    def test_metrics_against_exact(self, tmp_path, rng):
        exact = rng.normal(TRUTH, [0.02, 2.0], size=(1000, 2))
        wide = rng.normal(TRUTH, [0.04, 4.0], size=(1000, 2))
        paths = []
        for name, method, samples in (("exact", "exact", exact), ("bfem", "bfem", wide)):
            path = tmp_path / name
            path.mkdir()
            paths.append(write_bundle(path, method, 0.5, samples))
        metrics = compare_directories(paths, output=tmp_path / "cmp")
        exact_metrics, bfem_metrics = metrics
        assert exact_metrics.std_ratio == {"EA": 1.0, "k": 1.0}
        assert exact_metrics.mean_error_in_exact_std == {"EA": 0.0, "k": 0.0}
        assert bfem_metrics.std_ratio["EA"] == pytest.approx(2.0, rel=0.15)
        assert exact_metrics.covers_truth and bfem_metrics.covers_truth
        saved = json.loads((tmp_path / "cmp" / "metrics.json").read_text())
        assert [m["label"] for m in saved] == ["exact@h=0.5", "bfem@h=0.5"]
        assert (tmp_path / "cmp" / "metrics.md").read_text().startswith("| Method |")

    def test_overconfident_bundle(self, rng):
        bundles = [
            Bundle(path=None, method="fem", h=1.0, data_hash="d", ground_truth={"EA": 0.8, "k": 70.0},
                   names=["EA", "k"], samples=rng.normal([0.9, 80.0], [0.001, 0.1], size=(500, 2))),
            Bundle(path=None, method="exact", h=1.0, data_hash="d", ground_truth={"EA": 0.8, "k": 70.0},
                   names=["EA", "k"], samples=rng.normal(TRUTH, [0.02, 2.0], size=(500, 2))),
        ]
        fem, exact = compare_posteriors(bundles)
        assert fem.overconfident and not fem.covers_truth
        assert fem.mean_error["EA"] == pytest.approx(0.1, abs=0.01)
        assert fem.mean_error_in_exact_std["k"] > 3

    def test_convergence_flag(self, rng):
        def bundle(method, h, shift):
            samples = rng.normal(TRUTH + shift, [0.01, 1.0], size=(300, 2))
            return Bundle(path=None, method=method, h=h, data_hash="d", ground_truth={"EA": 0.8, "k": 70.0},
                          names=["EA", "k"], samples=samples)

        metrics = compare_posteriors([bundle("fem", 1.0, 10.0), bundle("fem", 0.5, 1.0),
                                      bundle("rmfem", 1.0, 0.0), bundle("rmfem", 0.5, 10.0),
                                      bundle("bfem", 1.0, 0.0)])
        assert [m.converging for m in metrics] == [True, True, False, False, None]

    def test_extra_parameters_ignored_for_error(self, tmp_path, rng):
        samples = np.column_stack([rng.normal(TRUTH, [0.02, 2.0], size=(200, 2)), rng.lognormal(size=200)])
        for name in ("a", "b"):
            (tmp_path / name).mkdir()
            write_bundle(tmp_path / name, "statfem", 1.0, samples, names=("EA", "k", "rho"))
        metrics = compare_directories([tmp_path / "a", tmp_path / "b"])
        assert set(metrics[0].mean_error) == {"EA", "k"}

    def test_data_mismatch(self, tmp_path, rng):
        for name, y_hash in (("a", "one"), ("b", "two")):
            (tmp_path / name).mkdir()
            write_bundle(tmp_path / name, "fem", 1.0, rng.normal(TRUTH, 1.0, size=(50, 2)), y_hash=y_hash)
        with pytest.raises(DataMismatchError, match="different observation data"):
            compare_directories([tmp_path / "a", tmp_path / "b"])

    def test_single_bundle(self, tmp_path, rng):
        write_bundle(tmp_path, "fem", 1.0, rng.normal(TRUTH, 1.0, size=(50, 2)))
        with pytest.raises(ValueError, match="at least two bundles"):
            compare_posteriors([load_bundle(tmp_path)])

    def test_missing_files(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="meta.json"):
            load_bundle(tmp_path)

    def test_markdown(self, rng):
        bundles = [Bundle(path=None, method=m, h=1.0, data_hash="d", ground_truth={"EA": 0.8, "k": 70.0},
                          names=["EA", "k"], samples=rng.normal(TRUTH, [0.02, 2.0], size=(200, 2)))
                   for m in ("fem", "exact")]
        table = format_metrics_markdown(compare_posteriors(bundles))
        lines = table.splitlines()
        assert len(lines) == 4
        assert lines[2].startswith("| fem@h=1 |")
        assert lines[2].endswith("| - |")


class TestGenerateMesh:
    """Test standalone mesh generation."""

    def test_pullout(self):
        mesh = generate_mesh(ProblemKind.PULLOUT, 0.25)
        assert mesh.n_nodes == 5

    def test_three_point_default_hole(self):
        mesh = generate_mesh("three_point", 0.2)
        assert 0.7 * 332 <= mesh.n_elements <= 1.3 * 332

    def test_inadmissible_hole(self):
        with pytest.raises(ValueError, match="does not fit inside the beam"):
            generate_mesh(ProblemKind.THREE_POINT, 0.2, {"x": 0.0})
