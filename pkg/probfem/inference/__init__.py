"""Priors and the tempered adaptive random-walk Metropolis sampler."""
from probfem.inference.priors import (
    LogNormal,
    PriorSpec,
    Uniform,
    hole_prior,
    lognormal_logpdf,
    marginal_from_dict,
    prior_from_dict,
    prior_sample,
    pullout_prior,
    uniform_logpdf,
)
from probfem.inference.sampler import (
    Chain,
    ChainConfig,
    MetropolisSampler,
    acceptance_probability,
    metropolis_accept,
    run_chain,
    tempered_log_target,
    temperature,
)

__all__ = [
    "Chain",
    "ChainConfig",
    "LogNormal",
    "MetropolisSampler",
    "PriorSpec",
    "Uniform",
    "acceptance_probability",
    "hole_prior",
    "lognormal_logpdf",
    "marginal_from_dict",
    "metropolis_accept",
    "prior_from_dict",
    "prior_sample",
    "pullout_prior",
    "run_chain",
    "tempered_log_target",
    "temperature",
    "uniform_logpdf",
]
