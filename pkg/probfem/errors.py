# probfem/errors.py
"""Exception hierarchy shared by the mesh, solver, likelihood and sampler layers.

Anything derived from ProbFemError raised while evaluating a likelihood is
treated by the sampler as a rejected proposal rather than a crash.
"""


class ProbFemError(Exception):
    """Base class for all probfem failures."""


class MeshError(ProbFemError):
    """A mesh is malformed or a requested node cannot be located."""


class PerturbationError(MeshError):
    """No valid randomly perturbed mesh was found within the retry budget."""


class TriangulationError(MeshError):
    """The mesher could not reach the requested quality targets."""


class NonNestedMeshError(MeshError):
    """A fine mesh is not a hierarchical refinement of the coarse mesh."""


class PointOutsideDomainError(ValueError, ProbFemError):
    """An evaluation point is not contained in any element."""


class SingularSystemError(ProbFemError):
    """A stiffness matrix has rigid-body modes left after constraints."""


class IndefiniteSystemError(SingularSystemError):
    """A factorization met a non-positive pivot."""


class NegativeEnergyError(ProbFemError):
    """f^T u < 0, which cannot happen for a symmetric positive definite system."""


class CovarianceError(ProbFemError):
    """A likelihood covariance is not positive (semi)definite."""


class LikelihoodEvaluationError(ProbFemError):
    """A likelihood could not be evaluated at the requested parameters."""


class ChainInitializationError(ProbFemError):
    """No in-support starting point was found for a Markov chain."""


class DataMismatchError(ProbFemError):
    """Result bundles were produced from different observation data."""
