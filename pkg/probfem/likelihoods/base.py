# probfem/likelihoods/base.py
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from probfem.fem.problem import ForwardProblem


class BaseLikelihood(ABC):
    """Base class for all likelihood models of observed displacements."""

    #: deterministic likelihoods may be cached for the current chain state
    deterministic: bool = True
    #: parameters inferred alongside theta (statFEM hyperparameters)
    extra_parameter_names: Tuple[str, ...] = ()

    def __init__(self, problem: ForwardProblem, y: np.ndarray, sigma_e: float):
        """Initialize the likelihood with its forward problem and data.

        Args:
            problem: Forward problem mapping theta to predictions
            y: Observation vector
            sigma_e: Known observation noise standard deviation
        """
        if sigma_e <= 0:
            raise ValueError(f"sigma_e must be positive, got {sigma_e}")
        self.problem = problem
        self.y = np.atleast_1d(np.asarray(y, dtype=float))
        self.sigma_e = float(sigma_e)

    @property
    def parameter_names(self) -> Tuple[str, ...]:
        return tuple(self.problem.parameter_names) + tuple(self.extra_parameter_names)

    @abstractmethod
    def log_likelihood(self, params: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        """Evaluate log p(y | params).

        Args:
            params: Forward parameters followed by extra_parameter_names
            rng: Random stream for stochastic estimators

        Returns:
            Log-likelihood value
        """
        pass

    @property
    @abstractmethod
    def name(self) -> str:
        """Get method name.

        Returns:
            Method name string
        """
        pass

    def split(self, params: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Forward parameters and extra parameters."""
        params = np.asarray(params, dtype=float)
        n = self.problem.dim
        return params[:n], params[n:]
