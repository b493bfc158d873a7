# probfem/likelihoods/fem.py
"""Plain FEM likelihood: the discretization error is ignored."""
from typing import Optional

import numpy as np

from probfem.likelihoods.base import BaseLikelihood
from probfem.likelihoods.gaussian import gaussian_log_likelihood


class FemLikelihood(BaseLikelihood):
    """y ~ N(P u_h(theta), sigma_e^2 I)."""

    @property
    def name(self) -> str:
        return "fem"

    def log_likelihood(self, params: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        theta, _ = self.split(params)
        return gaussian_log_likelihood(self.y, self.problem.predict(theta), None, self.sigma_e)
