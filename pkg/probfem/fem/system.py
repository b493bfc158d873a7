# probfem/fem/system.py
"""Assembled linear systems with Dirichlet lifting."""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import sparse

from probfem.mesh.mesh import Mesh

Matrix = Union[np.ndarray, sparse.spmatrix]


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """K w = f over the free (unconstrained) degrees of freedom.

    Global dofs are numbered node * dofs_per_node + component. The full
    field is u = lifting + E w, where E scatters free unknowns into the
    global vector and lifting carries the prescribed Dirichlet values.

    Attributes:
        K: stiffness restricted to free dofs
        f: load on free dofs, including the lifting term -K_fc u_c
        free_dofs: global index of every unknown
        lifting: global vector with Dirichlet values, zero elsewhere
        stiffness: unconstrained global stiffness (reactions, energy checks)
        f_ext: unconstrained global load
        mesh: mesh the system was assembled on
    """
    K: Matrix
    f: np.ndarray
    free_dofs: np.ndarray
    lifting: np.ndarray
    stiffness: Matrix
    f_ext: np.ndarray
    mesh: Mesh
    dofs_per_node: int = 1

    @property
    def n(self) -> int:
        """Number of unknowns."""
        return len(self.free_dofs)

    @property
    def n_dofs(self) -> int:
        return self.mesh.n_nodes * self.dofs_per_node

    @property
    def constrained_dofs(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.n_dofs), self.free_dofs)

    @property
    def dof_map(self) -> np.ndarray:
        """(n_nodes, dofs_per_node) unknown index of every node/component, -1 if constrained."""
        index = np.full(self.n_dofs, -1, dtype=np.intp)
        index[self.free_dofs] = np.arange(self.n)
        return index.reshape(self.mesh.n_nodes, self.dofs_per_node)

    def expand(self, w: np.ndarray) -> np.ndarray:
        """Scatter free coefficients into a global vector, zero at constrained dofs."""
        full = np.zeros(self.n_dofs)
        full[self.free_dofs] = w
        return full

    def full_solution(self, w: np.ndarray) -> np.ndarray:
        """Global nodal field lifting + E w."""
        return self.lifting + self.expand(w)

    def scaled(self, factor: float) -> "LinearSystem":
        """Same system with every load (and prescribed value) multiplied by factor."""
        return LinearSystem(K=self.K, f=factor * self.f, free_dofs=self.free_dofs,
                            lifting=factor * self.lifting, stiffness=self.stiffness,
                            f_ext=factor * self.f_ext, mesh=self.mesh,
                            dofs_per_node=self.dofs_per_node)


def restrict(matrix: Matrix, rows: np.ndarray, cols: Optional[np.ndarray] = None) -> Matrix:
    """Submatrix matrix[rows][:, cols] for dense or sparse input."""
    cols = rows if cols is None else cols
    if sparse.issparse(matrix):
        return matrix.tocsr()[rows][:, cols]
    return matrix[np.ix_(rows, cols)]


def symmetry_error(matrix: Matrix) -> float:
    """max |K - K^T| / max |K|."""
    if sparse.issparse(matrix):
        diff = abs(matrix - matrix.T).max()
        scale = abs(matrix).max()
    else:
        diff = np.abs(matrix - matrix.T).max()
        scale = np.abs(matrix).max()
    return float(diff / scale) if scale else 0.0
