# probfem/fem/elasticity.py
"""Linear plane-stress elasticity with constant-strain triangles."""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse

from probfem.errors import SingularSystemError
from probfem.fem.system import LinearSystem, restrict
from probfem.mesh.mesh import Mesh

logger = logging.getLogger(__name__)

DOFS_PER_NODE = 2


@dataclass(frozen=True)
class MaterialParams2D:
    """Young's modulus and Poisson ratio of the body, stiff blocks and imposed deflection w.

    Elements tagged 1 (support and load blocks) use E_support.
    """
    E: float = 30e9
    nu: float = 0.2
    E_support: float = 1e15
    w: float = 0.01

    def __post_init__(self):
        if self.E <= 0:
            raise ValueError(f"E must be positive, got {self.E}")
        if self.E_support <= 0:
            raise ValueError(f"E_support must be positive, got {self.E_support}")
        if not 0.0 <= self.nu < 0.5:
            raise ValueError(f"nu must be in [0, 0.5), got {self.nu}")


@dataclass(frozen=True, eq=False)
class BoundaryConditions2D:
    """Prescribed displacement components and optional nodal forces.

    Attributes:
        nodes: node index of every constraint
        components: 0 for x, 1 for y
        values: prescribed displacement
        nodal_forces: (n_nodes, 2) point loads, zero if omitted
    """
    nodes: np.ndarray
    components: np.ndarray
    values: np.ndarray
    nodal_forces: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.intp).ravel()
        components = np.asarray(self.components, dtype=np.intp).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        if not (len(nodes) == len(components) == len(values)):
            raise ValueError(
                f"nodes, components and values differ in length: {len(nodes)}, {len(components)}, {len(values)}"
            )
        if len(nodes) == 0:
            raise ValueError("at least one Dirichlet constraint is required")
        if np.any((components < 0) | (components >= DOFS_PER_NODE)):
            raise ValueError(f"components must be 0 or 1, got {np.unique(components)}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "values", values)

    @property
    def dofs(self) -> np.ndarray:
        return self.nodes * DOFS_PER_NODE + self.components


def plane_stress_matrix(E: float, nu: float) -> np.ndarray:
    """Constitutive matrix D for (sigma_xx, sigma_yy, tau_xy) = D (e_xx, e_yy, gamma_xy)."""
    return E / (1.0 - nu ** 2) * np.array([
        [1.0, nu, 0.0],
        [nu, 1.0, 0.0],
        [0.0, 0.0, (1.0 - nu) / 2.0],
    ])


def strain_displacement(mesh: Mesh):
    """B matrices (n_e, 3, 6) and areas of every triangle."""
    x = mesh.nodes[mesh.elements]
    x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
    area = 0.5 * ((x2[:, 0] - x1[:, 0]) * (x3[:, 1] - x1[:, 1])
                  - (x3[:, 0] - x1[:, 0]) * (x2[:, 1] - x1[:, 1]))
    b = np.column_stack([x2[:, 1] - x3[:, 1], x3[:, 1] - x1[:, 1], x1[:, 1] - x2[:, 1]])
    c = np.column_stack([x3[:, 0] - x2[:, 0], x1[:, 0] - x3[:, 0], x2[:, 0] - x1[:, 0]])
    B = np.zeros((mesh.n_elements, 3, 6))
    B[:, 0, 0::2] = b
    B[:, 1, 1::2] = c
    B[:, 2, 0::2] = c
    B[:, 2, 1::2] = b
    B /= (2.0 * area)[:, None, None]
    return B, area


def element_moduli(mesh: Mesh, mat: MaterialParams2D) -> np.ndarray:
    """Young's modulus of every element."""
    E = np.full(mesh.n_elements, mat.E)
    if mesh.element_tags is not None:
        E[mesh.element_tags == 1] = mat.E_support
    return E


def element_dofs(mesh: Mesh) -> np.ndarray:
    """(n_e, 6) global dofs of every triangle, interleaved x/y."""
    e = mesh.elements
    return np.column_stack([
        DOFS_PER_NODE * e[:, 0], DOFS_PER_NODE * e[:, 0] + 1,
        DOFS_PER_NODE * e[:, 1], DOFS_PER_NODE * e[:, 1] + 1,
        DOFS_PER_NODE * e[:, 2], DOFS_PER_NODE * e[:, 2] + 1,
    ])


def stiffness_matrix(mesh: Mesh, mat: MaterialParams2D) -> sparse.csr_matrix:
    """Global plane-stress stiffness over all 2 n_nodes dofs, without constraints."""
    if mesh.dim != 2 or mesh.elements.shape[1] != 3:
        raise ValueError(f"stiffness_matrix needs a triangle mesh, got dim={mesh.dim}")
    B, area = strain_displacement(mesh)
    D = plane_stress_matrix(1.0, mat.nu)
    scale = element_moduli(mesh, mat) * area
    local = np.einsum("eki,kl,elj->eij", B, D, B) * scale[:, None, None]

    dofs = element_dofs(mesh)
    rows = np.repeat(dofs, 6, axis=1).ravel()
    cols = np.tile(dofs, (1, 6)).ravel()
    n = DOFS_PER_NODE * mesh.n_nodes
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _check_rigid_modes(mesh: Mesh, bc: BoundaryConditions2D):
    """Constraints must remove both translations and the rotation."""
    x, y = mesh.nodes[bc.nodes, 0], mesh.nodes[bc.nodes, 1]
    modes = np.zeros((len(bc.nodes), 3))
    is_x = bc.components == 0
    modes[is_x, 0] = 1.0
    modes[~is_x, 1] = 1.0
    modes[is_x, 2] = -y[is_x]
    modes[~is_x, 2] = x[~is_x]
    if np.linalg.matrix_rank(modes) < 3:
        raise SingularSystemError("Dirichlet constraints leave rigid-body modes")


def assemble_elasticity(mesh: Mesh, mat: MaterialParams2D, bc: BoundaryConditions2D) -> LinearSystem:
    """Plane-stress system with Dirichlet data eliminated through a lifting.

    The lifting is the nodal vector carrying the prescribed values; the
    free load is f_f - K_fc u_c.

    Raises:
        SingularSystemError: if the constraints leave rigid-body modes
        ValueError: on a constraint index outside the mesh
    """
    if np.any(bc.nodes >= mesh.n_nodes):
        raise ValueError(f"constraint node outside mesh of {mesh.n_nodes} nodes")
    _check_rigid_modes(mesh, bc)

    stiffness = stiffness_matrix(mesh, mat)
    n = stiffness.shape[0]
    f_ext = np.zeros(n)
    if bc.nodal_forces is not None:
        f_ext += np.asarray(bc.nodal_forces, dtype=float).reshape(n)

    lifting = np.zeros(n)
    lifting[bc.dofs] = bc.values
    constrained = np.unique(bc.dofs)
    free = np.setdiff1d(np.arange(n), constrained)

    K = restrict(stiffness, free)
    f = f_ext[free] - restrict(stiffness, free, constrained) @ lifting[constrained]
    logger.debug(f"Assembled elasticity system: {len(free)} free dofs, {len(constrained)} constrained")
    return LinearSystem(K=K, f=f, free_dofs=free, lifting=lifting, stiffness=stiffness,
                        f_ext=f_ext, mesh=mesh, dofs_per_node=DOFS_PER_NODE)


def element_stresses(mesh: Mesh, mat: MaterialParams2D, u: np.ndarray) -> np.ndarray:
    """(n_e, 3) constant stress (sigma_xx, sigma_yy, tau_xy) from a global displacement vector."""
    B, _ = strain_displacement(mesh)
    strains = np.einsum("eij,ej->ei", B, np.asarray(u)[element_dofs(mesh)])
    D = plane_stress_matrix(1.0, mat.nu)
    return element_moduli(mesh, mat)[:, None] * strains @ D.T


def reaction_forces(system: LinearSystem, u: np.ndarray) -> np.ndarray:
    """Forces K u - f at the constrained dofs, in system.constrained_dofs order."""
    residual = system.stiffness @ u - system.f_ext
    return residual[system.constrained_dofs]
