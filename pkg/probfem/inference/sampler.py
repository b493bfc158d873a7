# probfem/inference/sampler.py
"""Random-walk Metropolis with tempered burn-in and adaptive proposal scale.

During burn-in the likelihood is raised to tau_t = t / (N_burn - 1) and
the global proposal scale follows a Robbins-Monro recursion towards the
target acceptance rate. Afterwards the proposal and tau = 1 are frozen and
the retained samples are stored.
"""
import csv
import logging
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from probfem.errors import ChainInitializationError, ProbFemError
from probfem.inference.priors import PriorSpec

logger = logging.getLogger(__name__)

LogLikelihood = Callable[[np.ndarray, np.random.Generator], float]

INITIAL_SCALE = 2.38


@dataclass
class ChainConfig:
    """Sample counts and adaptation settings of one chain."""
    n_burn: int = 10000
    n_samples: int = 10000
    target_acceptance: float = 0.234
    adaptation_exponent: float = 0.6
    window: int = 100
    seed: int = 0
    adapt_covariance: bool = False
    max_init_draws: int = 10000

    def __post_init__(self):
        if self.n_burn < 1:
            raise ValueError(f"n_burn must be at least 1, got {self.n_burn}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be at least 1, got {self.n_samples}")
        if not 0.0 < self.target_acceptance < 1.0:
            raise ValueError(f"target_acceptance must be in (0, 1), got {self.target_acceptance}")
        if not 0.5 < self.adaptation_exponent <= 1.0:
            raise ValueError(f"adaptation_exponent must be in (0.5, 1], got {self.adaptation_exponent}")
        if self.window < 1:
            raise ValueError(f"window must be positive, got {self.window}")
        if self.max_init_draws < 1:
            raise ValueError(f"max_init_draws must be positive, got {self.max_init_draws}")


@dataclass
class Chain:
    """Retained samples and burn-in diagnostics of a finished chain."""
    parameter_names: tuple
    samples: np.ndarray
    log_posterior: np.ndarray
    log_likelihood: np.ndarray
    accepted: int
    proposal_cov: np.ndarray
    temperatures: np.ndarray
    scales: np.ndarray
    window_acceptance: np.ndarray
    n_failed: int = 0
    seed: int = 0
    config: Dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.n_samples if self.n_samples else 0.0

    def to_csv(self, path) -> Path:
        """One row per retained sample: parameters, log-likelihood, log-posterior."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(list(self.parameter_names) + ["log_likelihood", "log_posterior"])
            for row, ll, lp in zip(self.samples, self.log_likelihood, self.log_posterior):
                writer.writerow([repr(float(v)) for v in row] + [repr(float(ll)), repr(float(lp))])
        return path

    def summary(self) -> Dict:
        quantiles = np.quantile(self.samples, [0.025, 0.5, 0.975], axis=0)
        return {
            "parameters": {
                name: {
                    "mean": float(np.mean(self.samples[:, i])),
                    "std": float(np.std(self.samples[:, i], ddof=1)) if self.n_samples > 1 else 0.0,
                    "q025": float(quantiles[0, i]),
                    "median": float(quantiles[1, i]),
                    "q975": float(quantiles[2, i]),
                }
                for i, name in enumerate(self.parameter_names)
            },
            "acceptance_rate": self.acceptance_rate,
            "final_burn_in_acceptance": float(self.window_acceptance[-1]) if len(self.window_acceptance) else None,
            "final_scale": float(self.scales[-1]) if len(self.scales) else None,
            "n_samples": self.n_samples,
            "n_failed": self.n_failed,
            "seed": self.seed,
            "config": self.config,
        }


def tempered_log_target(log_prior: float, log_likelihood: float, tau: float) -> float:
    """log p(theta) + tau log p(y | theta); the likelihood is ignored at tau = 0."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if log_prior == -np.inf:
        return -np.inf
    if tau == 0.0:
        return float(log_prior)
    return float(log_prior + tau * log_likelihood)


def temperature(t: int, n_burn: int) -> float:
    """Linear schedule from 0 at the first burn-in step to 1 at the last."""
    if n_burn <= 1 or t >= n_burn - 1:
        return 1.0
    return t / (n_burn - 1)


def acceptance_probability(delta: float) -> float:
    """min(1, exp(delta)) for a symmetric proposal."""
    if np.isnan(delta):
        return 0.0
    return 1.0 if delta >= 0 else float(np.exp(delta))


def metropolis_accept(delta: float, u: float) -> bool:
    return u < acceptance_probability(delta)


def _empirical_cholesky(states: Sequence[np.ndarray], jitter: np.ndarray) -> Optional[np.ndarray]:
    cov = np.atleast_2d(np.cov(np.asarray(states), rowvar=False)) + np.diag(jitter)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        return None


class MetropolisSampler:
    """Runs one chain for a log-likelihood and a prior.

    Stochastic (pseudomarginal) likelihoods are re-evaluated at the current
    state every step; deterministic ones are cached.
    """

    def __init__(self, log_likelihood: LogLikelihood, prior: PriorSpec, config: ChainConfig,
                 deterministic: bool = True, parameter_names: Optional[Sequence[str]] = None):
        self.log_likelihood = log_likelihood
        self.prior = prior
        self.config = config
        self.deterministic = deterministic
        self.parameter_names = tuple(parameter_names or prior.names)
        self.n_failed = 0

    def _evaluate(self, x: np.ndarray, rng: np.random.Generator) -> float:
        try:
            value = float(self.log_likelihood(x, rng))
        except ProbFemError as e:
            self.n_failed += 1
            logger.debug(f"Likelihood failed at {x.tolist()}: {e}")
            return -np.inf
        return value if not np.isnan(value) else -np.inf

    def initialize(self, rng: np.random.Generator):
        for _ in range(self.config.max_init_draws):
            try:
                x = self.prior.sample(rng)
            except RuntimeError as e:
                raise ChainInitializationError(f"prior sampling failed: {e}") from e
            log_prior = self.prior.logpdf(x)
            if not np.isfinite(log_prior):
                continue
            log_like = self._evaluate(x, rng)
            if np.isfinite(log_like):
                return x, log_prior, log_like
        raise ChainInitializationError(
            f"no starting point with finite prior and likelihood in {self.config.max_init_draws} prior draws"
        )

    def run(self, rng: Optional[np.random.Generator] = None) -> Chain:
        cfg = self.config
        rng = np.random.default_rng(cfg.seed) if rng is None else rng
        d = self.prior.dim
        prior_cov = self.prior.covariance()
        chol = np.linalg.cholesky(prior_cov)
        jitter = 1e-10 * np.diag(prior_cov)
        log_scale = np.log(INITIAL_SCALE / np.sqrt(d))

        x, lp_x, ll_x = self.initialize(rng)
        total = cfg.n_burn + cfg.n_samples
        samples = np.empty((cfg.n_samples, d))
        log_posterior = np.empty(cfg.n_samples)
        log_likelihood = np.empty(cfg.n_samples)
        temperatures = np.empty(cfg.n_burn)
        scales = np.empty(cfg.n_burn)
        recent = deque(maxlen=cfg.window)
        window_acceptance = []
        adapt_states = []
        switched = False
        accepted = 0
        progress = max(1, total // 10)
        logger.info(f"Chain start: dim={d}, burn-in={cfg.n_burn}, samples={cfg.n_samples}")

        for t in range(total):
            burn = t < cfg.n_burn
            tau = temperature(t, cfg.n_burn) if burn else 1.0
            if not self.deterministic:
                refreshed = self._evaluate(x, rng)
                if np.isfinite(refreshed):
                    ll_x = refreshed

            scale = np.exp(log_scale)
            proposal = x + scale * (chol @ rng.standard_normal(d))
            u = rng.uniform()
            accept = False
            lp_p = self.prior.logpdf(proposal)
            if np.isfinite(lp_p):
                ll_p = self._evaluate(proposal, rng)
                if np.isfinite(ll_p):
                    delta = tempered_log_target(lp_p, ll_p, tau) - tempered_log_target(lp_x, ll_x, tau)
                    accept = metropolis_accept(delta, u)
            if accept:
                x, lp_x, ll_x = proposal, lp_p, ll_p

            if burn:
                temperatures[t] = tau
                scales[t] = scale
                recent.append(accept)
                rate = float(np.mean(recent))
                if (t + 1) % cfg.window == 0:
                    window_acceptance.append(rate)
                log_scale += (t + 1) ** -cfg.adaptation_exponent * (rate - cfg.target_acceptance)
                if cfg.adapt_covariance and t >= cfg.n_burn // 2:
                    adapt_states.append(x.copy())
                    if len(adapt_states) >= max(cfg.window, 2 * d + 1) and (t + 1) % cfg.window == 0:
                        updated = _empirical_cholesky(adapt_states, jitter)
                        if updated is not None:
                            chol = updated
                            if not switched:
                                log_scale = np.log(INITIAL_SCALE / np.sqrt(d))
                                switched = True
                if t == cfg.n_burn - 1:
                    logger.info(f"Burn-in done: scale={np.exp(log_scale):.4g}, "
                                f"window acceptance={rate:.3f}")
            else:
                i = t - cfg.n_burn
                samples[i] = x
                log_likelihood[i] = ll_x
                log_posterior[i] = lp_x + ll_x
                accepted += int(accept)

            if (t + 1) % progress == 0:
                logger.info(f"Chain {100 * (t + 1) // total}%: scale={scale:.4g}, "
                            f"window acceptance={np.mean(recent) if recent else 0.0:.3f}")

        proposal_cov = np.exp(2 * log_scale) * chol @ chol.T
        return Chain(
            parameter_names=self.parameter_names,
            samples=samples,
            log_posterior=log_posterior,
            log_likelihood=log_likelihood,
            accepted=accepted,
            proposal_cov=proposal_cov,
            temperatures=temperatures,
            scales=scales,
            window_acceptance=np.array(window_acceptance),
            n_failed=self.n_failed,
            seed=cfg.seed,
            config=asdict(cfg),
        )


def run_chain(log_likelihood: LogLikelihood, prior: PriorSpec, config: ChainConfig,
              rng: Optional[np.random.Generator] = None, deterministic: bool = True,
              parameter_names: Optional[Sequence[str]] = None) -> Chain:
    """Run random-walk Metropolis on prior x likelihood.

    Raises:
        ChainInitializationError: if no in-support start is found
    """
    return MetropolisSampler(log_likelihood, prior, config, deterministic, parameter_names).run(rng)
