# probfem/fem/observation.py
"""Point evaluation of piecewise-linear fields.

Observation matrices map global nodal vectors (dof = node * dofs_per_node
+ component) to values at the observation points, ordered point-major:
row = point * dofs_per_node + component.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from probfem.errors import PointOutsideDomainError
from probfem.mesh.mesh import Mesh

# barycentric coordinates may undershoot zero by this much
LOCATE_TOLERANCE = 1e-10
_CANDIDATE_NODES = 8


def _barycentric_1d(mesh: Mesh, x: float, elements: np.ndarray) -> np.ndarray:
    xa = mesh.nodes[mesh.elements[elements, 0], 0]
    xb = mesh.nodes[mesh.elements[elements, 1], 0]
    t = (x - xa) / (xb - xa)
    return np.column_stack([1.0 - t, t])


def _barycentric_2d(mesh: Mesh, point: np.ndarray, elements: np.ndarray) -> np.ndarray:
    x = mesh.nodes[mesh.elements[elements]]
    x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
    det = ((x2[:, 1] - x3[:, 1]) * (x1[:, 0] - x3[:, 0])
           + (x3[:, 0] - x2[:, 0]) * (x1[:, 1] - x3[:, 1]))
    l1 = ((x2[:, 1] - x3[:, 1]) * (point[0] - x3[:, 0])
          + (x3[:, 0] - x2[:, 0]) * (point[1] - x3[:, 1])) / det
    l2 = ((x3[:, 1] - x1[:, 1]) * (point[0] - x3[:, 0])
          + (x1[:, 0] - x3[:, 0]) * (point[1] - x3[:, 1])) / det
    return np.column_stack([l1, l2, 1.0 - l1 - l2])


class PointLocator:
    """Finds the element containing a point and its barycentric coordinates.

    Candidates are the elements around the nearest nodes; a full scan is
    the fallback.
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self._tree = cKDTree(mesh.nodes)
        n_vertices = mesh.elements.shape[1]
        self._incidence = sparse.csr_matrix(
            (np.ones(mesh.elements.size),
             (mesh.elements.ravel(), np.repeat(np.arange(mesh.n_elements), n_vertices))),
            shape=(mesh.n_nodes, mesh.n_elements),
        )
        self._barycentric = _barycentric_1d if mesh.dim == 1 else _barycentric_2d

    def _best(self, point: np.ndarray, candidates: np.ndarray) -> Tuple[int, np.ndarray, float]:
        target = point[0] if self.mesh.dim == 1 else point
        lam = self._barycentric(self.mesh, target, candidates)
        worst = lam.min(axis=1)
        best = int(np.argmax(worst))
        return int(candidates[best]), lam[best], float(worst[best])

    def locate(self, point) -> Tuple[int, np.ndarray]:
        """Element index and barycentric coordinates of a point.

        Raises:
            PointOutsideDomainError: if no element contains the point
        """
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape != (self.mesh.dim,):
            raise ValueError(f"point must have {self.mesh.dim} coordinates, got shape {point.shape}")
        k = min(_CANDIDATE_NODES, self.mesh.n_nodes)
        _, near = self._tree.query(point, k=k)
        candidates = np.unique(self._incidence[np.atleast_1d(near)].indices)
        element, lam, worst = self._best(point, candidates)
        if worst < -LOCATE_TOLERANCE:
            element, lam, worst = self._best(point, np.arange(self.mesh.n_elements))
        if worst < -LOCATE_TOLERANCE:
            raise PointOutsideDomainError(f"point {point.tolist()} lies outside the mesh")
        lam = np.clip(lam, 0.0, None)
        return element, lam / lam.sum()


@dataclass(frozen=True, eq=False)
class ObservationOperator:
    """Sparse point-evaluation operator on global nodal vectors."""
    points: np.ndarray
    matrix: sparse.csr_matrix
    dofs_per_node: int

    @property
    def n_observations(self) -> int:
        return self.matrix.shape[0]

    def restrict(self, dofs: np.ndarray) -> sparse.csr_matrix:
        """Columns belonging to the given global dofs, e.g. a system's free dofs."""
        return self.matrix[:, dofs]

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u


def observation_matrix(mesh: Mesh, points: np.ndarray,
                       dofs_per_node: Optional[int] = None) -> ObservationOperator:
    """Operator interpolating a nodal field at the given points.

    Raises:
        PointOutsideDomainError: if a point is outside every element
    """
    dofs_per_node = mesh.dim if dofs_per_node is None else dofs_per_node
    points = np.asarray(points, dtype=float).reshape(-1, mesh.dim)
    locator = PointLocator(mesh)
    rows, cols, data = [], [], []
    for i, point in enumerate(points):
        element, lam = locator.locate(point)
        vertices = mesh.elements[element]
        for comp in range(dofs_per_node):
            rows.extend([i * dofs_per_node + comp] * len(vertices))
            cols.extend(vertices * dofs_per_node + comp)
            data.extend(lam)
    shape = (len(points) * dofs_per_node, mesh.n_nodes * dofs_per_node)
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=shape)
    return ObservationOperator(points=points, matrix=matrix, dofs_per_node=dofs_per_node)


def evaluate_solution(mesh: Mesh, w: np.ndarray, lifting: Optional[np.ndarray],
                      points: np.ndarray) -> np.ndarray:
    """Field w + lifting at the points, shape (m,) in 1D and (m, 2) in 2D.

    Both vectors are global nodal vectors; lifting may be None.
    """
    w = np.asarray(w, dtype=float)
    dofs_per_node = w.size // mesh.n_nodes
    if dofs_per_node * mesh.n_nodes != w.size or dofs_per_node < 1:
        raise ValueError(f"w has {w.size} entries, not a multiple of {mesh.n_nodes} nodes")
    u = w if lifting is None else w + np.asarray(lifting, dtype=float)
    values = observation_matrix(mesh, points, dofs_per_node).apply(u)
    return values if dofs_per_node == 1 else values.reshape(-1, dofs_per_node)
