# probfem/likelihoods/gaussian.py
"""Multivariate normal log-density shared by every likelihood."""
from typing import Optional

import numpy as np
import scipy.linalg

from probfem.errors import CovarianceError

LOG_2PI = float(np.log(2.0 * np.pi))


def gaussian_log_likelihood(y: np.ndarray, mean: np.ndarray, cov: Optional[np.ndarray],
                            sigma_e: float) -> float:
    """log N(y; mean, cov + sigma_e^2 I) through a Cholesky factorization.

    cov may be None for pure observation noise; the noise-only case takes
    the same path as cov = 0, so both give identical results.

    Raises:
        CovarianceError: if cov + sigma_e^2 I is not positive definite
        ValueError: on mismatched dimensions
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    if y.shape != mean.shape:
        raise ValueError(f"y and mean differ in shape: {y.shape} vs {mean.shape}")
    m = y.size
    total = np.zeros((m, m)) if cov is None else np.array(cov, dtype=float, copy=True)
    if total.shape != (m, m):
        raise ValueError(f"cov must be {m}x{m}, got {total.shape}")
    total[np.diag_indices(m)] += sigma_e ** 2
    try:
        factor = scipy.linalg.cho_factor(total, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise CovarianceError(f"likelihood covariance is not positive definite: {e}") from e
    residual = y - mean
    alpha = scipy.linalg.cho_solve(factor, residual, check_finite=False)
    log_det = 2.0 * np.sum(np.log(np.diag(factor[0])))
    return float(-0.5 * (residual @ alpha + log_det + m * LOG_2PI))
