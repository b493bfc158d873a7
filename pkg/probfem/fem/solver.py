# probfem/fem/solver.py
"""Direct solvers for symmetric positive-definite FE systems."""
import logging

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import splu

from probfem.errors import IndefiniteSystemError
from probfem.fem.system import LinearSystem, Matrix

logger = logging.getLogger(__name__)

# systems up to this size are factored densely
DENSE_THRESHOLD = 2000
# smallest accepted pivot, relative to the largest diagonal entry
PIVOT_TOLERANCE = 1e-14


class Factorization:
    """Reusable factorization of an SPD matrix.

    Dense Cholesky for small systems, sparse LU otherwise. Both reject
    matrices that are not positive definite with IndefiniteSystemError.
    """

    def __init__(self, K: Matrix):
        self.n = K.shape[0]
        if K.shape != (self.n, self.n):
            raise ValueError(f"K must be square, got shape {K.shape}")
        self._dense = self.n <= DENSE_THRESHOLD
        scale = float(np.max(np.abs(K.diagonal()))) if self.n else 0.0
        if self.n == 0 or not np.isfinite(scale) or scale <= 0:
            raise IndefiniteSystemError(f"stiffness diagonal is not positive (max |K_ii| = {scale})")
        if self._dense:
            self._factor_dense(K.toarray() if sparse.issparse(K) else np.asarray(K, dtype=float), scale)
        else:
            self._factor_sparse(sparse.csc_matrix(K), scale)

    def _factor_dense(self, K: np.ndarray, scale: float):
        try:
            self._cho = scipy.linalg.cho_factor(K, lower=True, check_finite=False)
        except np.linalg.LinAlgError as e:
            raise IndefiniteSystemError(f"Cholesky factorization failed: {e}") from e
        pivots = np.diag(self._cho[0]) ** 2
        if not np.all(np.isfinite(pivots)) or pivots.min() <= PIVOT_TOLERANCE * scale:
            raise IndefiniteSystemError(f"stiffness is numerically singular (pivot {pivots.min():.3e})")

    def _factor_sparse(self, K: sparse.csc_matrix, scale: float):
        try:
            self._lu = splu(K, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                            options={"SymmetricMode": True})
        except RuntimeError as e:
            raise IndefiniteSystemError(f"sparse factorization failed: {e}") from e
        pivots = self._lu.U.diagonal()
        if not np.all(np.isfinite(pivots)) or pivots.min() <= PIVOT_TOLERANCE * scale:
            raise IndefiniteSystemError(f"stiffness is not positive definite (pivot {pivots.min():.3e})")
        logger.debug(f"Sparse LU of {self.n} dofs with {self._lu.L.nnz + self._lu.U.nnz} factor entries")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve K x = rhs for a vector or a matrix of right-hand sides."""
        rhs = np.asarray(rhs, dtype=float)
        if self._dense:
            return scipy.linalg.cho_solve(self._cho, rhs, check_finite=False)
        return self._lu.solve(rhs)


def factorize(K: Matrix) -> Factorization:
    return Factorization(K)


def solve(system: LinearSystem) -> np.ndarray:
    """Coefficients w of the free dofs, K w = f."""
    return factorize(system.K).solve(system.f)


def residual_norm(system: LinearSystem, w: np.ndarray) -> float:
    """||K w - f|| / ||f||."""
    norm_f = np.linalg.norm(system.f)
    residual = np.linalg.norm(system.K @ w - system.f)
    return float(residual / norm_f) if norm_f else float(residual)
