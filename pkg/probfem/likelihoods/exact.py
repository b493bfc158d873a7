# probfem/likelihoods/exact.py
"""Reference likelihood built on the closed-form forward solution."""
from typing import Optional

import numpy as np

from probfem.likelihoods.base import BaseLikelihood
from probfem.likelihoods.gaussian import gaussian_log_likelihood


class ExactLikelihood(BaseLikelihood):
    """y ~ N(P u(theta), sigma_e^2 I) with the exact solution u."""

    def __init__(self, problem, y, sigma_e):
        if not problem.has_exact_solution:
            raise ValueError(f"{type(problem).__name__} has no closed-form solution for the exact method")
        super().__init__(problem, y, sigma_e)

    @property
    def name(self) -> str:
        return "exact"

    def log_likelihood(self, params: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        theta, _ = self.split(params)
        return gaussian_log_likelihood(self.y, self.problem.exact_prediction(theta), None, self.sigma_e)
