# probfem/experiments/pullout.py
"""Pullout test: bar on an elastic foundation, displacement observed at x = 1."""
import numpy as np

from probfem.experiments.data import pullout_exact_solution
from probfem.fem.bar import MaterialParams1D, assemble_bar
from probfem.fem.problem import ForwardProblem
from probfem.fem.system import LinearSystem
from probfem.mesh.mesh import Mesh, generate_interval_mesh
from probfem.mesh.refinement import RefinementMap

GROUND_TRUTH = {"EA": 0.8, "k": 70.0}
LOAD = 10.0


class PulloutProblem(ForwardProblem):
    """theta = (EA, k); the mesh of [0, 1] is fixed, so it and its refinements are cached."""

    parameter_names = ("EA", "k")
    has_exact_solution = True

    def __init__(self, h: float, F: float = LOAD):
        super().__init__()
        if h <= 0 or abs(round(1.0 / h) * h - 1.0) > 1e-9:
            raise ValueError(f"h must divide the unit bar, got {h}")
        n_elements = round(1.0 / h)
        self.h = h
        self.F = F
        self._mesh = generate_interval_mesh(1.0, n_elements)
        self._refinements = {}

    def mesh(self, theta=None) -> Mesh:
        return self._mesh

    def assemble(self, mesh: Mesh, theta) -> LinearSystem:
        EA, k = (float(v) for v in theta)
        return assemble_bar(mesh, MaterialParams1D(EA=EA, k=k, F=self.F))

    @property
    def observation_points(self) -> np.ndarray:
        return np.array([[1.0]])

    def refine(self, mesh: Mesh, levels: int = 1) -> RefinementMap:
        if mesh is not self._mesh:
            return super().refine(mesh, levels)
        if levels not in self._refinements:
            self._refinements[levels] = super().refine(mesh, levels)
        return self._refinements[levels]

    def exact_prediction(self, theta) -> np.ndarray:
        EA, k = (float(v) for v in theta)
        return np.array([pullout_exact_solution(EA, k, self.F, 1.0)])
