# probfem/likelihoods/statfem.py
"""statFEM likelihood y = rho P u + d + e with d ~ GP(0, k_d)."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from probfem.inference.priors import LogNormal, PriorSpec
from probfem.likelihoods.base import BaseLikelihood
from probfem.likelihoods.gaussian import gaussian_log_likelihood

HYPERPARAMETER_NAMES = ("rho", "ell_d", "sigma_d")


@dataclass(frozen=True)
class StatfemHyperparams:
    rho: float
    ell_d: float
    sigma_d: float

    def __post_init__(self):
        if not self.ell_d > 0:
            raise ValueError(f"ell_d must be positive, got {self.ell_d}")
        if self.sigma_d < 0:
            raise ValueError(f"sigma_d must be non-negative, got {self.sigma_d}")

    @classmethod
    def from_vector(cls, eta) -> "StatfemHyperparams":
        rho, ell_d, sigma_d = (float(v) for v in eta)
        return cls(rho, ell_d, sigma_d)


@dataclass
class StatfemPriorConfig:
    """Log-normal hyperprior parameters; None centers on the problem's natural scales."""
    rho_sigma: float = 0.5
    ell_sigma: float = 0.5
    sigma_d_sigma: float = 1.0
    ell_center: Optional[float] = None
    sigma_d_center: Optional[float] = None

    def __post_init__(self):
        for name in ("rho_sigma", "ell_sigma", "sigma_d_sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("ell_center", "sigma_d_center"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")


def statfem_prior(config: StatfemPriorConfig, sensor_spacing: float, sigma_e: float) -> PriorSpec:
    """Prior on (rho, ell_d, sigma_d): log-normals around 1, the sensor spacing and the noise level."""
    ell = config.ell_center if config.ell_center is not None else sensor_spacing
    sigma_d = config.sigma_d_center if config.sigma_d_center is not None else sigma_e
    return PriorSpec(HYPERPARAMETER_NAMES, (
        LogNormal(0.0, config.rho_sigma),
        LogNormal(float(np.log(ell)), config.ell_sigma),
        LogNormal(float(np.log(sigma_d)), config.sigma_d_sigma),
    ))


def sq_exp_covariance(points: np.ndarray, ell_d: float, sigma_d: float,
                      components: int = 1) -> np.ndarray:
    """sigma_d^2 exp(-|x - x'|^2 / (2 ell_d^2)), expanded as k_d kron I for vector data."""
    if not ell_d > 0:
        raise ValueError(f"ell_d must be positive, got {ell_d}")
    points = np.asarray(points, dtype=float)
    points = points.reshape(len(points), -1)
    sq = cdist(points, points, "sqeuclidean")
    kernel = sigma_d ** 2 * np.exp(-0.5 * sq / ell_d ** 2)
    return kernel if components == 1 else np.kron(kernel, np.eye(components))


def statfem_log_likelihood(y: np.ndarray, prediction: np.ndarray, eta: StatfemHyperparams,
                           points: np.ndarray, sigma_e: float) -> float:
    """log N(y; rho P u_h, k_d(X, X) + sigma_e^2 I)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    components = y.size // len(points)
    cov = sq_exp_covariance(points, eta.ell_d, eta.sigma_d, components)
    return gaussian_log_likelihood(y, eta.rho * np.asarray(prediction, dtype=float), cov, sigma_e)


def joint_log_posterior(likelihood: "StatFemLikelihood", prior: PriorSpec, params: np.ndarray,
                        rng: Optional[np.random.Generator] = None) -> float:
    """log p(theta) + log p(eta) + log p(y | theta, eta), up to log p(y)."""
    log_prior = prior.logpdf(params)
    if log_prior == -np.inf:
        return -np.inf
    return log_prior + likelihood.log_likelihood(params, rng)


class StatFemLikelihood(BaseLikelihood):
    """FEM prediction scaled by rho plus a squared-exponential misspecification term."""

    extra_parameter_names = HYPERPARAMETER_NAMES

    @property
    def name(self) -> str:
        return "statfem"

    def log_likelihood(self, params: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        theta, eta = self.split(params)
        return statfem_log_likelihood(self.y, self.problem.predict(theta),
                                      StatfemHyperparams.from_vector(eta),
                                      self.problem.observation_points, self.sigma_e)
