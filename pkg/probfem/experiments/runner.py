# probfem/experiments/runner.py
import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from probfem.config import Config
from probfem.errors import ProbFemError
from probfem.experiments.data import data_hash, synthesize_observations
from probfem.experiments.pullout import GROUND_TRUTH as PULLOUT_TRUTH, PulloutProblem
from probfem.experiments.three_point import GROUND_TRUTH as THREE_POINT_TRUTH, ThreePointProblem, ThreePointSettings
from probfem.fem.problem import ForwardProblem
from probfem.inference.priors import PriorSpec, hole_prior, pullout_prior
from probfem.inference.sampler import Chain, run_chain
from probfem.likelihoods import BaseLikelihood, build_likelihood, statfem_prior
from probfem.mesh.mesh import Mesh
from probfem.models import ExperimentConfig, ExperimentResult, MethodKind, ParameterSummary, ProblemKind
from probfem.report_generator import (
    ReportGenerator,
    write_json,
    write_kde_grid,
    write_marginals,
    write_table,
)

logger = logging.getLogger(__name__)

DEFAULT_DATA_H = 0.02


def config_hash(experiment: ExperimentConfig) -> str:
    """sha256 of the canonical JSON form of the configuration."""
    canonical = json.dumps(experiment.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ExperimentRunner:
    """Runs one inverse problem end to end.

    This class builds the forward problem and its synthetic data, wires the
    selected likelihood into the sampler and writes the result bundle.
    """

    def __init__(self, config: Optional[Config] = None, experiment: Optional[ExperimentConfig] = None):
        """Initialize the runner.

        Args:
            config: Loaded configuration; takes precedence over experiment
            experiment: Experiment settings when no Config object is at hand
        """
        if config is None:
            if experiment is None:
                raise ValueError("either config or experiment is required")
            config = Config(overrides=experiment.model_dump(mode="json"))
        self.config = config
        self.experiment = config.experiment

    @property
    def ground_truth(self) -> Dict[str, float]:
        default = PULLOUT_TRUTH if self.experiment.problem == ProblemKind.PULLOUT else THREE_POINT_TRUTH
        truth = dict(default)
        if self.experiment.ground_truth:
            unknown = set(self.experiment.ground_truth) - set(default)
            if unknown:
                raise ValueError(f"Unknown ground-truth parameters: {sorted(unknown)}")
            truth.update(self.experiment.ground_truth)
        return truth

    def build_problem(self, h: Optional[float] = None) -> ForwardProblem:
        h = self.experiment.h if h is None else h
        if self.experiment.problem == ProblemKind.PULLOUT:
            return PulloutProblem(h, F=self.experiment.load)
        return ThreePointProblem(ThreePointSettings(h=h))

    def truth_vector(self, problem: ForwardProblem) -> np.ndarray:
        truth = self.ground_truth
        return np.array([truth[name] for name in problem.parameter_names])

    def synthesize(self) -> np.ndarray:
        """Observation data; the data mesh is independent of the inference mesh."""
        exp = self.experiment
        if exp.problem == ProblemKind.PULLOUT:
            data_problem = self.build_problem()
        else:
            data_problem = self.build_problem(exp.data_h or DEFAULT_DATA_H)
        logger.info(f"Synthesizing {exp.problem.value} data with seed {exp.data_seed}")
        return synthesize_observations(data_problem, self.truth_vector(data_problem), exp.sigma_e, exp.data_seed)

    def build_likelihood(self, problem: ForwardProblem, y: np.ndarray) -> BaseLikelihood:
        method = self.experiment.method
        options = {}
        if method == MethodKind.BFEM:
            options["config"] = self.config.bfem_config()
        elif method == MethodKind.RMFEM:
            options["config"] = self.config.pseudomarginal_config()
        return build_likelihood(method.value, problem, y, self.experiment.sigma_e, **options)

    def build_prior(self, problem: ForwardProblem, likelihood: BaseLikelihood) -> PriorSpec:
        if self.experiment.problem == ProblemKind.PULLOUT:
            prior = pullout_prior()
        else:
            beam = problem.beam
            prior = hole_prior(problem.admissible, length=beam.length, height=beam.H)
        if likelihood.extra_parameter_names:
            prior = prior.join(statfem_prior(self.config.statfem_prior_config(),
                                             problem.sensor_spacing, self.experiment.sigma_e))
        if self.experiment.prior:
            prior = prior.with_marginals(self.experiment.prior)
        return prior

    def run(self, write: bool = True) -> ExperimentResult:
        """Sample the posterior and optionally write the result bundle.

        Raises:
            ProbFemError: on any mesh, solver, likelihood or sampler failure
        """
        exp = self.experiment
        started = time.perf_counter()
        logger.info(f"Experiment {exp.problem.value}/{exp.method.value} with h={exp.h}")

        problem = self.build_problem()
        y = self.synthesize()
        likelihood = self.build_likelihood(problem, y)
        prior = self.build_prior(problem, likelihood)
        chain = run_chain(likelihood.log_likelihood, prior, self.config.chain_config(),
                          deterministic=likelihood.deterministic,
                          parameter_names=likelihood.parameter_names)
        runtime = time.perf_counter() - started
        logger.info(f"Experiment done in {runtime:.1f}s, acceptance {chain.acceptance_rate:.3f}")

        extras = self._extras(problem, chain, y)
        out = Path(exp.output_dir)
        files = self._write_bundle(out, problem, prior, chain, y, extras) if write else []
        summary = chain.summary()["parameters"]
        return ExperimentResult(
            problem=exp.problem,
            method=exp.method,
            h=exp.h,
            seed=exp.seed,
            parameters={name: ParameterSummary(**stats) for name, stats in summary.items()},
            ground_truth=self.ground_truth,
            acceptance_rate=chain.acceptance_rate,
            n_failed=chain.n_failed,
            data_hash=data_hash(y),
            config_hash=config_hash(exp),
            runtime_seconds=runtime,
            output_dir=str(out),
            files=[str(f) for f in files],
            extras=extras,
        )

    def _extras(self, problem: ForwardProblem, chain: Chain, y: np.ndarray) -> Dict:
        extras = {"observations": y.tolist(), "observation_points": problem.observation_points.tolist()}
        if self.experiment.problem == ProblemKind.PULLOUT:
            log_samples = np.log(chain.samples[:, :2])
            extras["log_correlation"] = float(np.corrcoef(log_samples.T)[0, 1])
        return extras

    def _write_bundle(self, out: Path, problem: ForwardProblem, prior: PriorSpec, chain: Chain,
                      y: np.ndarray, extras: Dict) -> list:
        out.mkdir(parents=True, exist_ok=True)
        exp = self.experiment
        files = [chain.to_csv(out / "chain.csv")]
        report = ReportGenerator(exp, chain, self.ground_truth, prior.bounds(), extras)
        files.append(report.save_json(out / "summary.json"))
        files.append(report.save_markdown(out / "summary.md"))
        files.extend(write_marginals(chain, prior.bounds(), out / "marginals"))
        files.append(write_json({
            "seed": exp.seed,
            "data_seed": exp.data_seed,
            "config_hash": config_hash(exp),
            "data_hash": data_hash(y),
            "problem": exp.problem.value,
            "method": exp.method.value,
            "h": exp.h,
            "ground_truth": self.ground_truth,
        }, out / "meta.json"))
        files.append(write_table(out / "data.csv", ["y"], [[v] for v in y]))
        if exp.problem == ProblemKind.PULLOUT:
            files.append(write_kde_grid(chain.samples[:, :2], ("EA", "k"), out / "kde_EA_k.csv"))
        else:
            files.append(self._write_boundary(out / "boundary.csv", problem, chain, y))
        return files

    def _write_boundary(self, path: Path, problem: ForwardProblem, chain: Chain, y: np.ndarray) -> Path:
        """Sensor coordinates with observed and predicted displacements, unscaled."""
        points = problem.observation_points
        at_truth = problem.predict(self.truth_vector(problem))
        mean = chain.samples[:, :problem.dim].mean(axis=0)
        try:
            at_mean = problem.predict(mean) if problem.admissible(mean) else np.full_like(at_truth, np.nan)
        except (ProbFemError, ValueError) as e:
            logger.warning(f"No prediction at the posterior mean: {e}")
            at_mean = np.full_like(at_truth, np.nan)
        rows = np.column_stack([points, y.reshape(len(points), -1), at_truth.reshape(len(points), -1),
                                at_mean.reshape(len(points), -1)])
        header = ["x", "y", "obs_ux", "obs_uy", "truth_ux", "truth_uy", "mean_ux", "mean_uy"]
        return write_table(path, header, rows)


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    return ExperimentRunner(experiment=config).run(write=write)


def generate_mesh(problem: ProblemKind, h: float, parameters: Optional[Dict[str, float]] = None) -> Mesh:
    """Computational mesh of a problem, for the three-point problem at the given (default true) hole."""
    problem = ProblemKind(problem)
    if problem == ProblemKind.PULLOUT:
        return PulloutProblem(h).mesh()
    truth = dict(THREE_POINT_TRUTH)
    truth.update(parameters or {})
    forward = ThreePointProblem(ThreePointSettings(h=h))
    theta = [truth[name] for name in forward.parameter_names]
    if not forward.admissible(theta):
        raise ValueError(f"hole {truth} does not fit inside the beam")
    return forward.mesh(theta)
