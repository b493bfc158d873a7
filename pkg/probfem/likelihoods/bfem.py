# probfem/likelihoods/bfem.py
"""Bayesian FEM likelihood.

The prior u ~ GP(0, sigma_u^2 A^-1) conditioned on the Galerkin equations
leaves a posterior whose mean is the FEM solution and whose covariance
is sigma_u^2 (A^-1 - Phi K^-1 Phi^T). The A^-1 term is approximated on a
hierarchically refined mesh.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from probfem.errors import NegativeEnergyError, NonNestedMeshError
from probfem.fem.observation import ObservationOperator
from probfem.fem.problem import ForwardSolution
from probfem.likelihoods.base import BaseLikelihood
from probfem.likelihoods.gaussian import gaussian_log_likelihood

logger = logging.getLogger(__name__)

# eigenvalues below -CLIP_TOLERANCE * trace indicate a broken nesting
CLIP_TOLERANCE = 1e-10


@dataclass
class BfemConfig:
    """Reference-mesh settings for the BFEM covariance."""
    refinement_levels: int = 1

    def __post_init__(self):
        if self.refinement_levels < 1:
            raise ValueError(f"refinement_levels must be at least 1, got {self.refinement_levels}")


@dataclass(frozen=True, eq=False)
class BfemLikelihood:
    """Gaussian observation model of the BFEM posterior.

    Attributes:
        mean: P u_h
        cov: sigma_u^2 (C_fine - C_coarse), PSD after clipping
        sigma_u: evidence-maximizing scale
        sigma_e: observation noise std
        min_eigenvalue: smallest eigenvalue of C_fine - C_coarse before clipping
    """
    mean: np.ndarray
    cov: np.ndarray
    sigma_u: float
    sigma_e: float
    min_eigenvalue: float = 0.0

    def log_likelihood(self, y: np.ndarray) -> float:
        return bfem_log_likelihood(y, self)


def sigma_u_hat(f: np.ndarray, u: np.ndarray, n: int) -> float:
    """sqrt(f^T u / n), the scale maximizing the evidence p(f | sigma_u).

    Raises:
        NegativeEnergyError: if f^T u < 0
    """
    energy = float(np.dot(f, u))
    if energy < 0:
        raise NegativeEnergyError(f"f^T u = {energy:.6e} is negative")
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    return float(np.sqrt(energy / n))


def _projected_inverse(solution: ForwardSolution, operator: ObservationOperator) -> np.ndarray:
    """Phi K^-1 Phi^T on the free dofs of a solved system."""
    phi = operator.restrict(solution.system.free_dofs)
    columns = solution.factorization.solve(phi.T.toarray())
    return np.atleast_2d(phi @ columns)


def _check_nested(coarse: ForwardSolution, fine: ForwardSolution):
    n_coarse = coarse.mesh.n_nodes
    fine_nodes = fine.mesh.nodes
    if len(fine_nodes) < n_coarse or not np.array_equal(fine_nodes[:n_coarse], coarse.mesh.nodes):
        raise NonNestedMeshError("fine mesh does not start with the coarse nodes")


def bfem_likelihood(coarse: ForwardSolution, fine: ForwardSolution,
                    P_coarse: ObservationOperator, P_fine: ObservationOperator,
                    sigma_e: float) -> BfemLikelihood:
    """Assemble mean and covariance of the BFEM observation model.

    Raises:
        NonNestedMeshError: if fine is not a refinement of coarse
        ValueError: if the operators observe different points
    """
    if P_coarse.points.shape != P_fine.points.shape or not np.allclose(P_coarse.points, P_fine.points):
        raise ValueError("coarse and fine observation operators use different points")
    _check_nested(coarse, fine)

    sigma_u = sigma_u_hat(coarse.system.f, coarse.w, coarse.system.n)
    mean = P_coarse.apply(coarse.u)

    difference = _projected_inverse(fine, P_fine) - _projected_inverse(coarse, P_coarse)
    difference = 0.5 * (difference + difference.T)
    eigenvalues, eigenvectors = np.linalg.eigh(difference)
    trace = max(float(np.trace(difference)), 0.0)
    min_eigenvalue = float(eigenvalues.min())
    if min_eigenvalue < -CLIP_TOLERANCE * trace:
        logger.warning(f"BFEM covariance eigenvalue {min_eigenvalue:.3e} below tolerance "
                       f"(trace {trace:.3e}); clipping")
    clipped = np.clip(eigenvalues, 0.0, None)
    difference = (eigenvectors * clipped) @ eigenvectors.T
    cov = sigma_u ** 2 * 0.5 * (difference + difference.T)
    return BfemLikelihood(mean=mean, cov=cov, sigma_u=sigma_u, sigma_e=sigma_e,
                          min_eigenvalue=min_eigenvalue)


def bfem_log_likelihood(y: np.ndarray, like: BfemLikelihood) -> float:
    return gaussian_log_likelihood(y, like.mean, like.cov, like.sigma_e)


class BayesianFemLikelihood(BaseLikelihood):
    """BFEM likelihood with sigma_u re-estimated for every parameter value."""

    def __init__(self, problem, y, sigma_e, config: Optional[BfemConfig] = None):
        super().__init__(problem, y, sigma_e)
        self.config = config or BfemConfig()

    @property
    def name(self) -> str:
        return "bfem"

    def build(self, theta: np.ndarray) -> BfemLikelihood:
        theta = np.asarray(theta, dtype=float)
        coarse_mesh = self.problem.mesh(theta)
        fine_mesh = self.problem.refine(coarse_mesh, self.config.refinement_levels).fine
        coarse = self.problem.solve(coarse_mesh, theta)
        fine = self.problem.solve(fine_mesh, theta)
        return bfem_likelihood(coarse, fine,
                               self.problem.observation_operator(coarse_mesh),
                               self.problem.observation_operator(fine_mesh),
                               self.sigma_e)

    def log_likelihood(self, params: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        theta, _ = self.split(params)
        return bfem_log_likelihood(self.y, self.build(theta))
