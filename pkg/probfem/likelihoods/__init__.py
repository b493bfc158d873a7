"""Likelihood models for FE-based inverse problems."""
from typing import Dict, Type

from probfem.likelihoods.base import BaseLikelihood
from probfem.likelihoods.gaussian import gaussian_log_likelihood
from probfem.likelihoods.fem import FemLikelihood
from probfem.likelihoods.bfem import (
    BayesianFemLikelihood,
    BfemConfig,
    BfemLikelihood,
    bfem_likelihood,
    bfem_log_likelihood,
    sigma_u_hat,
)
from probfem.likelihoods.rmfem import (
    PseudomarginalConfig,
    PseudomarginalEstimate,
    RandomMeshLikelihood,
    estimate_pseudomarginal,
    log_mean_exp,
    pseudomarginal_log_likelihood,
    rmfem_replica_log_likelihood,
)
from probfem.likelihoods.statfem import (
    StatFemLikelihood,
    StatfemHyperparams,
    StatfemPriorConfig,
    joint_log_posterior,
    sq_exp_covariance,
    statfem_log_likelihood,
    statfem_prior,
)
from probfem.likelihoods.exact import ExactLikelihood

LIKELIHOODS: Dict[str, Type[BaseLikelihood]] = {
    "fem": FemLikelihood,
    "bfem": BayesianFemLikelihood,
    "rmfem": RandomMeshLikelihood,
    "statfem": StatFemLikelihood,
    "exact": ExactLikelihood,
}


def build_likelihood(method: str, problem, y, sigma_e: float, **options) -> BaseLikelihood:
    """Instantiate the likelihood registered for a method name.

    Raises:
        ValueError: for an unknown method
    """
    try:
        cls = LIKELIHOODS[method]
    except KeyError:
        raise ValueError(f"Unknown method: {method}. Available: {sorted(LIKELIHOODS)}")
    return cls(problem, y, sigma_e, **options)


__all__ = [
    "BaseLikelihood",
    "BayesianFemLikelihood",
    "BfemConfig",
    "BfemLikelihood",
    "ExactLikelihood",
    "FemLikelihood",
    "LIKELIHOODS",
    "PseudomarginalConfig",
    "PseudomarginalEstimate",
    "RandomMeshLikelihood",
    "StatFemLikelihood",
    "StatfemHyperparams",
    "StatfemPriorConfig",
    "bfem_likelihood",
    "bfem_log_likelihood",
    "build_likelihood",
    "estimate_pseudomarginal",
    "gaussian_log_likelihood",
    "joint_log_posterior",
    "log_mean_exp",
    "pseudomarginal_log_likelihood",
    "rmfem_replica_log_likelihood",
    "sigma_u_hat",
    "sq_exp_covariance",
    "statfem_log_likelihood",
    "statfem_prior",
]
