# probfem/fem/problem.py
"""Parameter-to-observation maps built on the FE layer."""
import threading
import weakref
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from probfem.fem.observation import ObservationOperator, observation_matrix
from probfem.fem.solver import Factorization, factorize
from probfem.fem.system import LinearSystem
from probfem.mesh.mesh import Mesh, find_nodes
from probfem.mesh.refinement import RefinementMap, refine_hierarchical


@dataclass(frozen=True, eq=False)
class ForwardSolution:
    """Solved system on one mesh."""
    system: LinearSystem
    factorization: Factorization
    w: np.ndarray

    @property
    def mesh(self) -> Mesh:
        return self.system.mesh

    @property
    def u(self) -> np.ndarray:
        """Global nodal displacement including the lifting."""
        return self.system.full_solution(self.w)


class ForwardProblem(ABC):
    """Maps parameters theta to predicted observations through a FE solve.

    Subclasses decide how theta enters: through the mesh (geometry), the
    assembly (material), or both.
    """

    parameter_names: Tuple[str, ...] = ()
    has_exact_solution: bool = False

    def __init__(self):
        self._operators = weakref.WeakKeyDictionary()
        # RM-FEM replicas call observation_operator from worker threads
        self._operators_lock = threading.Lock()

    @property
    def dim(self) -> int:
        return len(self.parameter_names)

    @abstractmethod
    def mesh(self, theta: np.ndarray) -> Mesh:
        """Computational mesh for the given parameters."""

    @abstractmethod
    def assemble(self, mesh: Mesh, theta: np.ndarray) -> LinearSystem:
        """Linear system on an arbitrary (coarse, refined or perturbed) mesh."""

    @property
    @abstractmethod
    def observation_points(self) -> np.ndarray:
        """(m, d) sensor coordinates."""

    @property
    def sensor_spacing(self) -> float:
        """Characteristic distance between sensors."""
        return 1.0

    def admissible(self, theta: np.ndarray) -> bool:
        return True

    def exact_prediction(self, theta: np.ndarray) -> np.ndarray:
        """Observations from the closed-form solution, where one exists."""
        raise NotImplementedError(f"{type(self).__name__} has no closed-form solution")

    def fixed_nodes(self, mesh: Mesh) -> np.ndarray:
        """Nodes that must not move under mesh perturbation."""
        return find_nodes(mesh, self.observation_points)

    def refine(self, mesh: Mesh, levels: int = 1) -> RefinementMap:
        return refine_hierarchical(mesh, levels)

    def observation_operator(self, mesh: Mesh) -> ObservationOperator:
        with self._operators_lock:
            operator = self._operators.get(mesh)
        if operator is None:
            operator = observation_matrix(mesh, self.observation_points)
            with self._operators_lock:
                operator = self._operators.setdefault(mesh, operator)
        return operator

    def solve(self, mesh: Mesh, theta: np.ndarray) -> ForwardSolution:
        system = self.assemble(mesh, theta)
        factorization = factorize(system.K)
        return ForwardSolution(system=system, factorization=factorization,
                               w=factorization.solve(system.f))

    def observe(self, solution: ForwardSolution) -> np.ndarray:
        """Predicted observation vector, point-major with components interleaved."""
        return self.observation_operator(solution.mesh).apply(solution.u)

    def predict(self, theta: np.ndarray, mesh: Mesh = None) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        mesh = self.mesh(theta) if mesh is None else mesh
        return self.observe(self.solve(mesh, theta))

    def named(self, theta: Sequence[float]) -> dict:
        return dict(zip(self.parameter_names, np.asarray(theta, dtype=float).tolist()))
