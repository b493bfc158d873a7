# probfem/likelihoods/rmfem.py
"""Random-mesh FEM pseudomarginal likelihood.

exp of the returned value is an unbiased estimate of the marginal
likelihood over mesh perturbations; the sampler treats it as a
Monte Carlo within Metropolis target.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from probfem.errors import LikelihoodEvaluationError, ProbFemError
from probfem.fem.problem import ForwardProblem
from probfem.likelihoods.base import BaseLikelihood
from probfem.likelihoods.gaussian import gaussian_log_likelihood
from probfem.mesh.mesh import Mesh
from probfem.mesh.perturbation import DEFAULT_MAX_ATTEMPTS, DEFAULT_RADIUS, MeshPerturber

logger = logging.getLogger(__name__)


@dataclass
class PseudomarginalConfig:
    """Replica count, perturbation exponent and radius of the random meshes."""
    M: int = 100
    p: float = 1.0
    radius: float = DEFAULT_RADIUS
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    workers: int = 1

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be at least 1, got {self.M}")
        if self.p <= 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.radius < 0:
            raise ValueError(f"radius must be non-negative, got {self.radius}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be positive, got {self.max_attempts}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")


def log_mean_exp(values: np.ndarray) -> float:
    """log(mean(exp(values))) without overflow or underflow."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("log_mean_exp of an empty array")
    peak = values.max()
    if not np.isfinite(peak):
        return float(peak)
    return float(peak + np.log(np.mean(np.exp(values - peak))))


def rmfem_replica_log_likelihood(problem: ForwardProblem, theta: np.ndarray, mesh: Mesh,
                                 y: np.ndarray, sigma_e: float) -> float:
    """FEM Gaussian log-likelihood of y on one perturbed mesh."""
    return gaussian_log_likelihood(y, problem.predict(theta, mesh), None, sigma_e)


@dataclass
class PseudomarginalEstimate:
    """Outcome of one pseudomarginal evaluation."""
    value: float
    replica_values: np.ndarray
    predictions: np.ndarray
    n_failed: int


def _replica(problem: ForwardProblem, perturber: MeshPerturber, theta: np.ndarray, y: np.ndarray,
             sigma_e: float, seed: np.random.SeedSequence):
    try:
        mesh = perturber.sample(np.random.default_rng(seed))
        prediction = problem.predict(theta, mesh)
        return gaussian_log_likelihood(y, prediction, None, sigma_e), prediction
    except ProbFemError as e:
        logger.debug(f"Dropped replica: {e}")
        return None


def estimate_pseudomarginal(problem: ForwardProblem, theta: np.ndarray, y: np.ndarray, sigma_e: float,
                            config: PseudomarginalConfig, rng: np.random.Generator) -> PseudomarginalEstimate:
    """Average the FEM likelihood over M freshly perturbed meshes.

    Raises:
        LikelihoodEvaluationError: if every replica fails
    """
    theta = np.asarray(theta, dtype=float)
    mesh = problem.mesh(theta)
    perturber = MeshPerturber(mesh, config.p, problem.fixed_nodes(mesh),
                              config.radius, config.max_attempts)
    seeds = np.random.SeedSequence(int(rng.integers(2 ** 63))).spawn(config.M)

    if config.workers > 1 and config.M > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda s: _replica(problem, perturber, theta, y, sigma_e, s), seeds))
    else:
        results = [_replica(problem, perturber, theta, y, sigma_e, s) for s in seeds]

    kept: List = [r for r in results if r is not None]
    n_failed = len(results) - len(kept)
    if not kept:
        raise LikelihoodEvaluationError(f"all {config.M} mesh replicas failed for theta={theta.tolist()}")
    if n_failed:
        logger.warning(f"{n_failed} of {config.M} mesh replicas failed and were dropped")
    values = np.array([r[0] for r in kept])
    return PseudomarginalEstimate(value=log_mean_exp(values), replica_values=values,
                                  predictions=np.array([r[1] for r in kept]), n_failed=n_failed)


def pseudomarginal_log_likelihood(problem: ForwardProblem, theta: np.ndarray, y: np.ndarray,
                                  sigma_e: float, config: PseudomarginalConfig,
                                  rng: np.random.Generator) -> float:
    return estimate_pseudomarginal(problem, theta, y, sigma_e, config, rng).value


class RandomMeshLikelihood(BaseLikelihood):
    """Pseudomarginal RM-FEM likelihood; every call draws fresh meshes."""

    deterministic = False

    def __init__(self, problem, y, sigma_e, config: Optional[PseudomarginalConfig] = None):
        super().__init__(problem, y, sigma_e)
        self.config = config or PseudomarginalConfig()
        self.last_estimate: Optional[PseudomarginalEstimate] = None
        self.n_failed_replicas = 0

    @property
    def name(self) -> str:
        return "rmfem"

    def log_likelihood(self, params: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        if rng is None:
            raise ValueError("RM-FEM likelihood needs a random generator")
        theta, _ = self.split(params)
        estimate = estimate_pseudomarginal(self.problem, theta, self.y, self.sigma_e, self.config, rng)
        self.last_estimate = estimate
        self.n_failed_replicas += estimate.n_failed
        return estimate.value
