"""Finite element assembly, solvers and point evaluation."""
from probfem.fem.system import LinearSystem, restrict, symmetry_error
from probfem.fem.bar import MaterialParams1D, assemble_bar
from probfem.fem.elasticity import (
    BoundaryConditions2D,
    MaterialParams2D,
    assemble_elasticity,
    element_stresses,
    plane_stress_matrix,
    reaction_forces,
    stiffness_matrix,
)
from probfem.fem.solver import Factorization, factorize, residual_norm, solve
from probfem.fem.problem import ForwardProblem, ForwardSolution
from probfem.fem.observation import (
    ObservationOperator,
    PointLocator,
    evaluate_solution,
    observation_matrix,
)

__all__ = [
    "BoundaryConditions2D",
    "Factorization",
    "ForwardProblem",
    "ForwardSolution",
    "LinearSystem",
    "MaterialParams1D",
    "MaterialParams2D",
    "ObservationOperator",
    "PointLocator",
    "assemble_bar",
    "assemble_elasticity",
    "element_stresses",
    "evaluate_solution",
    "factorize",
    "observation_matrix",
    "plane_stress_matrix",
    "reaction_forces",
    "residual_norm",
    "restrict",
    "solve",
    "stiffness_matrix",
    "symmetry_error",
]
