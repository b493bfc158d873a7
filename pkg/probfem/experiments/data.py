# probfem/experiments/data.py
"""Closed-form pullout solution and synthetic observation data."""
import hashlib

import numpy as np

from probfem.fem.problem import ForwardProblem


def pullout_exact_solution(EA: float, k: float, F: float, x):
    """u(x) = F / sqrt(k EA) cosh(nu x) / sinh(nu), nu = sqrt(k / EA).

    The cosh/sinh ratio is evaluated as
    (exp(nu (x - 1)) + exp(-nu (x + 1))) / (1 - exp(-2 nu)), which stays
    finite for large nu.
    """
    if EA <= 0:
        raise ValueError(f"EA must be positive, got {EA}")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    x = np.asarray(x, dtype=float)
    nu = np.sqrt(k / EA)
    ratio = (np.exp(nu * (x - 1.0)) + np.exp(-nu * (x + 1.0))) / -np.expm1(-2.0 * nu)
    u = F / np.sqrt(k * EA) * ratio
    return float(u) if u.ndim == 0 else u


def synthesize_observations(problem: ForwardProblem, theta, sigma_e: float, seed: int) -> np.ndarray:
    """Noisy observations of the ground truth.

    The clean signal comes from the closed-form solution when the problem
    has one, otherwise from a FE solve on the problem's own (fine) mesh.
    """
    if sigma_e < 0:
        raise ValueError(f"sigma_e must be non-negative, got {sigma_e}")
    theta = np.asarray(theta, dtype=float)
    if problem.has_exact_solution:
        clean = np.atleast_1d(problem.exact_prediction(theta))
    else:
        clean = problem.predict(theta)
    rng = np.random.default_rng(seed)
    return clean + sigma_e * rng.standard_normal(clean.shape)


def data_hash(y: np.ndarray) -> str:
    """sha256 of the float64 bytes of y."""
    return hashlib.sha256(np.ascontiguousarray(y, dtype="<f8").tobytes()).hexdigest()
