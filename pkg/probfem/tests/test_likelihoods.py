# probfem/tests/test_likelihoods.py
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats
from scipy.special import logsumexp

from probfem.errors import (
    CovarianceError,
    LikelihoodEvaluationError,
    MeshError,
    NegativeEnergyError,
    NonNestedMeshError,
)
from probfem.experiments.pullout import GROUND_TRUTH as PULLOUT_TRUTH, PulloutProblem
from probfem.experiments.three_point import GROUND_TRUTH as HOLE_TRUTH, ThreePointProblem
from probfem.geometry.beam import BeamGeometry, sensor_locations
from probfem.inference.priors import pullout_prior
from probfem.likelihoods import (
    LIKELIHOODS,
    BayesianFemLikelihood,
    BfemConfig,
    ExactLikelihood,
    FemLikelihood,
    PseudomarginalConfig,
    RandomMeshLikelihood,
    StatFemLikelihood,
    StatfemHyperparams,
    StatfemPriorConfig,
    bfem_likelihood,
    bfem_log_likelihood,
    build_likelihood,
    estimate_pseudomarginal,
    gaussian_log_likelihood,
    joint_log_posterior,
    log_mean_exp,
    pseudomarginal_log_likelihood,
    rmfem_replica_log_likelihood,
    sigma_u_hat,
    sq_exp_covariance,
    statfem_log_likelihood,
    statfem_prior,
)
from probfem.mesh import MeshPerturber, generate_interval_mesh
from probfem.mesh.perturbation import DEFAULT_RADIUS

THETA = np.array([1.0, 100.0])
SIGMA_E = 1e-3


class TestGaussianLogLikelihood:
    """Test the shared multivariate normal density."""

    def test_matches_scipy(self, rng):
        y, mean = rng.normal(size=4), rng.normal(size=4)
        a = rng.normal(size=(4, 4))
        cov = a @ a.T
        expected = stats.multivariate_normal(mean, cov + 0.1 ** 2 * np.eye(4)).logpdf(y)
        assert gaussian_log_likelihood(y, mean, cov, 0.1) == pytest.approx(expected, rel=1e-10)

    def test_none_equals_zero_covariance(self, rng):
        y, mean = rng.normal(size=3), rng.normal(size=3)
        assert gaussian_log_likelihood(y, mean, None, 0.5) == gaussian_log_likelihood(y, mean, np.zeros((3, 3)), 0.5)

    def test_scalar_observation(self):
        value = gaussian_log_likelihood(1.0, 1.0, None, 1e-3)
        assert value == pytest.approx(-0.5 * np.log(2 * np.pi * 1e-6))

    def test_indefinite_covariance(self):
        with pytest.raises(CovarianceError, match="not positive definite"):
            gaussian_log_likelihood(np.zeros(2), np.zeros(2), -np.eye(2), 1e-3)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="differ in shape"):
            gaussian_log_likelihood(np.zeros(2), np.zeros(3), None, 1.0)
        with pytest.raises(ValueError, match="cov must be 2x2"):
            gaussian_log_likelihood(np.zeros(2), np.zeros(2), np.eye(3), 1.0)


class TestFemAndExact:
    """Test the plain FEM and closed-form likelihoods."""

    def test_sigma_e_must_be_positive(self, pullout_coarse):
        with pytest.raises(ValueError, match="sigma_e must be positive"):
            FemLikelihood(pullout_coarse, [1.0], 0.0)

    def test_exact_peaks_at_noise_free_data(self):
        problem = PulloutProblem(h=0.5)
        y = problem.exact_prediction(THETA)
        exact = ExactLikelihood(problem, y, SIGMA_E)
        fem = FemLikelihood(problem, y, SIGMA_E)
        assert exact.log_likelihood(THETA) == pytest.approx(-0.5 * np.log(2 * np.pi * SIGMA_E ** 2))
        assert fem.log_likelihood(THETA) < exact.log_likelihood(THETA)

    def test_exact_rejects_three_point(self):
        with pytest.raises(ValueError, match="no closed-form solution"):
            ExactLikelihood(ThreePointProblem(), np.zeros(48), 1e-4)

    def test_parameter_names(self, pullout_coarse):
        assert FemLikelihood(pullout_coarse, [1.0], SIGMA_E).parameter_names == ("EA", "k")


class TestBfem:
    """Test the Bayesian FEM observation model."""

    def test_mean_is_fem_solution(self, rng):
        problem = PulloutProblem(h=0.25)
        likelihood = BayesianFemLikelihood(problem, [1.0], SIGMA_E)
        for theta in pullout_prior().sample(rng, size=20):
            model = likelihood.build(theta)
            np.testing.assert_allclose(model.mean, problem.predict(theta), rtol=0, atol=1e-12)

    def test_covariance_nonnegative(self, rng):
        problem = PulloutProblem(h=0.25)
        likelihood = BayesianFemLikelihood(problem, [1.0], SIGMA_E)
        for theta in pullout_prior().sample(rng, size=5):
            model = likelihood.build(theta)
            assert model.min_eigenvalue >= -1e-10 * np.trace(model.cov) / model.sigma_u ** 2
            assert model.cov[0, 0] >= 0

    def test_identical_spaces_give_zero_covariance(self):
        problem = PulloutProblem(h=0.25)
        mesh = problem.mesh(THETA)
        solution = problem.solve(mesh, THETA)
        operator = problem.observation_operator(mesh)
        model = bfem_likelihood(solution, solution, operator, operator, SIGMA_E)
        np.testing.assert_allclose(model.cov, 0.0, rtol=0, atol=1e-14)
        assert model.min_eigenvalue == pytest.approx(0.0, abs=1e-14)
        np.testing.assert_allclose(model.mean, problem.predict(THETA), rtol=1e-12)

    def test_load_scaling(self):
        base = BayesianFemLikelihood(PulloutProblem(h=0.25, F=10.0), [1.0], SIGMA_E).build(THETA)
        scaled = BayesianFemLikelihood(PulloutProblem(h=0.25, F=100.0), [1.0], SIGMA_E).build(THETA)
        assert scaled.sigma_u == pytest.approx(10 * base.sigma_u, rel=1e-10)
        np.testing.assert_allclose(scaled.cov, 100 * base.cov, rtol=1e-8)

    def test_variance_shrinks_with_h(self):
        coarse = BayesianFemLikelihood(PulloutProblem(h=0.5), [1.0], SIGMA_E).build(THETA)
        fine = BayesianFemLikelihood(PulloutProblem(h=0.125), [1.0], SIGMA_E).build(THETA)
        assert fine.cov[0, 0] < coarse.cov[0, 0]

    def test_wider_than_fem(self):
        problem = PulloutProblem(h=0.5)
        y = problem.exact_prediction(THETA)
        bfem = BayesianFemLikelihood(problem, y, SIGMA_E).log_likelihood(THETA)
        fem = FemLikelihood(problem, y, SIGMA_E).log_likelihood(THETA)
        # the FEM error dominates sigma_e here, so the wider model fits better
        assert bfem > fem

    def test_log_likelihood_of_built_model(self):
        problem = PulloutProblem(h=0.5)
        y = problem.exact_prediction(THETA)
        likelihood = BayesianFemLikelihood(problem, y, SIGMA_E)
        model = likelihood.build(THETA)
        expected = gaussian_log_likelihood(y, model.mean, model.cov, SIGMA_E)
        assert bfem_log_likelihood(y, model) == pytest.approx(expected, rel=1e-12)
        assert likelihood.log_likelihood(THETA) == pytest.approx(expected, rel=1e-12)

    def test_sigma_u_hat(self):
        assert sigma_u_hat(np.array([2.0, 0.0]), np.array([4.0, 1.0]), 2) == pytest.approx(2.0)

    def test_negative_energy(self):
        with pytest.raises(NegativeEnergyError, match="negative"):
            sigma_u_hat(np.array([1.0]), np.array([-1.0]), 1)

    def test_non_nested_meshes(self):
        problem = PulloutProblem(h=0.5)
        coarse_mesh = problem.mesh()
        other = generate_interval_mesh(1.0, 4)
        coarse = problem.solve(coarse_mesh, THETA)
        fine = problem.solve(other, THETA)
        with pytest.raises(NonNestedMeshError):
            bfem_likelihood(coarse, fine, problem.observation_operator(coarse_mesh),
                            problem.observation_operator(other), SIGMA_E)

    def test_refinement_levels_validated(self):
        with pytest.raises(ValueError, match="refinement_levels must be at least 1"):
            BfemConfig(refinement_levels=0)


class TestBfemThreePoint:
    """Test the BFEM covariance on the two-dimensional beam."""

    @pytest.fixture(scope="class")
    def model(self):
        problem = ThreePointProblem()
        likelihood = BayesianFemLikelihood(problem, np.zeros(48), 1e-4)
        return likelihood.build(np.array(list(HOLE_TRUTH.values())))

    def test_covariance_shape_and_symmetry(self, model):
        assert model.cov.shape == (48, 48)
        np.testing.assert_allclose(model.cov, model.cov.T)

    def test_nested_difference_is_psd(self, model):
        assert model.min_eigenvalue >= -1e-10 * np.trace(model.cov) / model.sigma_u ** 2
        assert np.linalg.eigvalsh(model.cov).min() >= -1e-12 * np.trace(model.cov)

    def test_sigma_u_positive(self, model):
        assert model.sigma_u > 0


class TestRandomMesh:
    """Test the pseudomarginal random-mesh likelihood."""

    @pytest.mark.parametrize("seed", [0, 1, 17])
    def test_single_element_equals_fem(self, seed):
        problem = PulloutProblem(h=1.0)
        y = problem.exact_prediction(THETA)
        rmfem = RandomMeshLikelihood(problem, y, SIGMA_E, PseudomarginalConfig(M=5))
        fem = FemLikelihood(problem, y, SIGMA_E)
        value = rmfem.log_likelihood(THETA, np.random.default_rng(seed))
        assert value == pytest.approx(fem.log_likelihood(THETA), rel=1e-12)

    def test_replicas_vary_on_finer_mesh(self):
        problem = PulloutProblem(h=0.25)
        estimate = estimate_pseudomarginal(problem, THETA, problem.exact_prediction(THETA), SIGMA_E,
                                           PseudomarginalConfig(M=10), np.random.default_rng(3))
        assert estimate.predictions.shape == (10, 1)
        assert np.ptp(estimate.predictions) > 0
        assert estimate.value == pytest.approx(log_mean_exp(estimate.replica_values))
        assert estimate.n_failed == 0

    def test_unbiased_against_quadrature(self):
        """Test that exp of the estimate averages to the likelihood integrated over node positions."""
        problem = PulloutProblem(h=0.5)
        mesh = problem.mesh(THETA)
        y, sigma_e = np.array([0.6]), 0.1
        half_width = MeshPerturber(mesh, 1.0, problem.fixed_nodes(mesh)).scale[1] * DEFAULT_RADIUS
        assert half_width == pytest.approx(0.125)

        abscissae, weights = np.polynomial.legendre.leggauss(40)
        values = []
        for t in abscissae:
            nodes = mesh.nodes.copy()
            nodes[1, 0] += half_width * t
            values.append(np.exp(rmfem_replica_log_likelihood(problem, THETA, mesh.with_nodes(nodes), y, sigma_e)))
        reference = 0.5 * np.dot(weights, values)

        config = PseudomarginalConfig(M=5)
        estimates = np.array([pseudomarginal_log_likelihood(problem, THETA, y, sigma_e, config,
                                                            np.random.default_rng(seed))
                              for seed in range(400)])
        ratios = np.exp(estimates) / reference
        assert abs(ratios.mean() - 1.0) < 3 * ratios.std(ddof=1) / np.sqrt(ratios.size)

    @pytest.mark.slow
    def test_estimator_spread_at_ground_truth(self):
        problem = PulloutProblem(h=0.25)
        truth = np.array([PULLOUT_TRUTH["EA"], PULLOUT_TRUTH["k"]])
        y = problem.exact_prediction(truth)
        config = PseudomarginalConfig(M=100)
        estimates = np.array([pseudomarginal_log_likelihood(problem, truth, y, SIGMA_E, config,
                                                            np.random.default_rng(seed))
                              for seed in range(50)])
        assert np.all(np.isfinite(estimates))
        assert estimates.std(ddof=1) < 0.05 * abs(estimates.mean())

    def test_workers_do_not_change_result(self):
        problem = PulloutProblem(h=0.25)
        y = problem.exact_prediction(THETA)
        serial = estimate_pseudomarginal(problem, THETA, y, SIGMA_E, PseudomarginalConfig(M=8),
                                         np.random.default_rng(5))
        threaded = estimate_pseudomarginal(problem, THETA, y, SIGMA_E, PseudomarginalConfig(M=8, workers=3),
                                           np.random.default_rng(5))
        assert threaded.value == serial.value

    def test_failed_replicas_dropped(self, monkeypatch):
        problem = PulloutProblem(h=0.25)
        y = problem.exact_prediction(THETA)
        original = problem.predict
        calls = {"n": 0}

        def flaky(theta, mesh=None):
            calls["n"] += 1
            if calls["n"] % 2 == 0:
                raise MeshError("inverted element")
            return original(theta, mesh)

        monkeypatch.setattr(problem, "predict", flaky)
        likelihood = RandomMeshLikelihood(problem, y, SIGMA_E, PseudomarginalConfig(M=6))
        value = likelihood.log_likelihood(THETA, np.random.default_rng(0))
        assert np.isfinite(value)
        assert likelihood.last_estimate.n_failed == 3
        assert likelihood.n_failed_replicas == 3

    def test_all_replicas_failed(self, monkeypatch):
        problem = PulloutProblem(h=0.25)

        def broken(theta, mesh=None):
            raise MeshError("inverted element")

        monkeypatch.setattr(problem, "predict", broken)
        with pytest.raises(LikelihoodEvaluationError, match="all 4 mesh replicas failed"):
            estimate_pseudomarginal(problem, THETA, [1.0], SIGMA_E, PseudomarginalConfig(M=4),
                                    np.random.default_rng(0))

    def test_replica_on_unperturbed_mesh_is_fem(self):
        problem = PulloutProblem(h=0.25)
        y = problem.exact_prediction(THETA)
        value = rmfem_replica_log_likelihood(problem, THETA, problem.mesh(THETA), y, SIGMA_E)
        assert value == pytest.approx(FemLikelihood(problem, y, SIGMA_E).log_likelihood(THETA), rel=1e-12)

    def test_functional_form_matches_estimate(self):
        problem = PulloutProblem(h=0.25)
        y = problem.exact_prediction(THETA)
        config = PseudomarginalConfig(M=4)
        value = pseudomarginal_log_likelihood(problem, THETA, y, SIGMA_E, config, np.random.default_rng(5))
        estimate = estimate_pseudomarginal(problem, THETA, y, SIGMA_E, config, np.random.default_rng(5))
        assert value == estimate.value

    def test_requires_rng(self, pullout_coarse):
        likelihood = RandomMeshLikelihood(pullout_coarse, [1.0], SIGMA_E)
        assert not likelihood.deterministic
        with pytest.raises(ValueError, match="random generator"):
            likelihood.log_likelihood(THETA)

    @pytest.mark.parametrize("kwargs, message", [
        ({"M": 0}, "M must be at least 1"),
        ({"p": 0.0}, "p must be positive"),
        ({"radius": -0.1}, "radius must be non-negative"),
        ({"workers": 0}, "workers must be positive"),
    ])
    def test_config_validation(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            PseudomarginalConfig(**kwargs)


class TestLogMeanExp:
    """Test the stable log-average-exp."""

    def test_large_values(self):
        assert log_mean_exp(np.array([1000.0, 1000.0])) == pytest.approx(1000.0)
        assert log_mean_exp(np.array([-1000.0, -1000.0 + np.log(3.0)])) == pytest.approx(-1000.0 + np.log(2.0))

    def test_far_negative_values(self):
        values = -1e6 + np.array([0.0, -1.0, -2.5, -700.0])
        result = log_mean_exp(values)
        assert np.isfinite(result)
        assert result == pytest.approx(logsumexp(values) - np.log(values.size), rel=1e-14)
        assert result == pytest.approx(-1e6 + np.log(np.mean(np.exp(values + 1e6))), rel=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(min_value=-1e6, max_value=0.0), min_size=1, max_size=50))
    def test_bounded_by_maximum(self, values):
        values = np.array(values)
        result = log_mean_exp(values)
        assert np.isfinite(result)
        assert values.max() - np.log(values.size) - 1e-6 <= result <= values.max() + 1e-6

    def test_negative_infinity(self):
        assert log_mean_exp(np.array([-np.inf, 0.0])) == pytest.approx(np.log(0.5))
        assert log_mean_exp(np.array([-np.inf, -np.inf])) == -np.inf

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            log_mean_exp(np.array([]))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(min_value=-500, max_value=500), min_size=1, max_size=20),
           st.floats(min_value=-1e4, max_value=1e4))
    def test_shift_equivariant(self, values, shift):
        values = np.array(values)
        assert log_mean_exp(values + shift) == pytest.approx(log_mean_exp(values) + shift, abs=1e-8 * (1 + abs(shift)))


class TestStatFem:
    """Test the statFEM likelihood and its hyperprior."""

    def test_reduces_to_fem(self):
        problem = PulloutProblem(h=0.25)
        y = problem.exact_prediction(THETA)
        statfem = StatFemLikelihood(problem, y, SIGMA_E)
        fem = FemLikelihood(problem, y, SIGMA_E)
        value = statfem.log_likelihood(np.concatenate([THETA, [1.0, 0.3, 0.0]]))
        assert abs(value - fem.log_likelihood(THETA)) < 1e-12 * abs(fem.log_likelihood(THETA)) + 1e-12

    def test_parameter_names(self, pullout_coarse):
        likelihood = StatFemLikelihood(pullout_coarse, [1.0], SIGMA_E)
        assert likelihood.parameter_names == ("EA", "k", "rho", "ell_d", "sigma_d")

    def test_functional_form(self, rng):
        points = np.array([[0.0], [0.5], [1.0]])
        prediction = rng.normal(size=3)
        y = prediction + rng.normal(scale=0.1, size=3)
        eta = StatfemHyperparams(rho=0.9, ell_d=0.4, sigma_d=0.2)
        cov = sq_exp_covariance(points, 0.4, 0.2)
        expected = stats.multivariate_normal(0.9 * prediction, cov + 0.1 ** 2 * np.eye(3)).logpdf(y)
        assert statfem_log_likelihood(y, prediction, eta, points, 0.1) == pytest.approx(expected, rel=1e-10)

    def test_rho_absorbs_scaling(self):
        problem = PulloutProblem(h=0.25)
        prediction = problem.predict(THETA)
        likelihood = StatFemLikelihood(problem, 2.0 * prediction, SIGMA_E)
        best = likelihood.log_likelihood(np.concatenate([THETA, [2.0, 0.3, 0.0]]))
        worse = likelihood.log_likelihood(np.concatenate([THETA, [1.0, 0.3, 0.0]]))
        assert best > worse

    def test_covariance_properties(self, rng):
        points = rng.uniform(0, 5, size=(6, 2))
        cov = sq_exp_covariance(points, ell_d=0.7, sigma_d=0.3)
        np.testing.assert_allclose(cov, cov.T)
        np.testing.assert_allclose(np.diag(cov), 0.09)
        assert np.linalg.eigvalsh(cov).min() > -1e-12
        expanded = sq_exp_covariance(points, ell_d=0.7, sigma_d=0.3, components=2)
        assert expanded.shape == (12, 12)
        assert expanded[0, 1] == 0.0
        assert expanded[0, 2] == pytest.approx(cov[0, 1])

    def test_invalid_length_scale(self):
        with pytest.raises(ValueError, match="ell_d must be positive"):
            sq_exp_covariance(np.zeros((2, 1)), ell_d=0.0, sigma_d=1.0)
        with pytest.raises(ValueError, match="sigma_d must be non-negative"):
            StatfemHyperparams(rho=1.0, ell_d=1.0, sigma_d=-1.0)

    def test_hyperprior_centers(self):
        prior = statfem_prior(StatfemPriorConfig(), sensor_spacing=0.5, sigma_e=1e-3)
        assert prior.names == ("rho", "ell_d", "sigma_d")
        assert prior.marginals[0].mu == 0.0
        assert prior.marginals[1].mu == pytest.approx(np.log(0.5))
        assert prior.marginals[2].mu == pytest.approx(np.log(1e-3))

    def test_covariance_factors_over_hyperprior(self):
        """Test that the beam covariance stays positive definite over the central 99% of the hyperprior."""
        beam = BeamGeometry()
        points = sensor_locations(beam)
        sigma_e = 1e-4
        prior = statfem_prior(StatfemPriorConfig(), beam.sensor_spacing, sigma_e)
        quantiles = [0.005, 0.25, 0.5, 0.75, 0.995]
        y = np.zeros(2 * len(points))
        for ell_d in prior.marginals[1].dist.ppf(quantiles):
            for sigma_d in prior.marginals[2].dist.ppf(quantiles):
                eta = StatfemHyperparams(rho=1.0, ell_d=ell_d, sigma_d=sigma_d)
                value = statfem_log_likelihood(y, np.zeros_like(y), eta, points, sigma_e)
                assert np.isfinite(value)

    def test_joint_posterior_outside_support(self):
        problem = PulloutProblem(h=0.5)
        likelihood = StatFemLikelihood(problem, problem.exact_prediction(THETA), SIGMA_E)
        prior = pullout_prior().join(statfem_prior(StatfemPriorConfig(), 1.0, SIGMA_E))
        assert joint_log_posterior(likelihood, prior, np.array([1.0, 100.0, 1.0, 1.0, -1.0])) == -np.inf
        inside = joint_log_posterior(likelihood, prior, np.array([1.0, 100.0, 1.0, 1.0, 1e-3]))
        assert np.isfinite(inside)


class TestRegistry:
    """Test method lookup."""

    def test_all_methods_registered(self):
        assert set(LIKELIHOODS) == {"fem", "bfem", "rmfem", "statfem", "exact"}

    def test_build_with_options(self, pullout_coarse):
        likelihood = build_likelihood("bfem", pullout_coarse, [1.0], SIGMA_E, config=BfemConfig(2))
        assert isinstance(likelihood, BayesianFemLikelihood)
        assert likelihood.config.refinement_levels == 2
        assert likelihood.name == "bfem"

    def test_unknown_method(self, pullout_coarse):
        with pytest.raises(ValueError, match="Unknown method: nope"):
            build_likelihood("nope", pullout_coarse, [1.0], SIGMA_E)
