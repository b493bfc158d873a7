# probfem/fem/bar.py
"""Bar on an elastic foundation: -(EA u')' + k u = 0 with end load F."""
from dataclasses import dataclass

import numpy as np

from probfem.errors import SingularSystemError
from probfem.fem.system import LinearSystem
from probfem.mesh.mesh import Mesh


@dataclass(frozen=True)
class MaterialParams1D:
    """Axial stiffness EA, foundation stiffness k and end load F."""
    EA: float
    k: float
    F: float = 10.0

    def __post_init__(self):
        if not self.EA > 0:
            raise ValueError(f"EA must be positive, got {self.EA}")
        if not self.k >= 0:
            raise ValueError(f"k must be non-negative, got {self.k}")


def assemble_bar(mesh: Mesh, mat: MaterialParams1D) -> LinearSystem:
    """Linear elements with consistent foundation matrix; F acts at the right end node.

    Both ends carry Neumann data, so there are no constrained dofs.

    Raises:
        SingularSystemError: for k = 0, which leaves the rigid translation free
    """
    if mesh.dim != 1:
        raise ValueError(f"assemble_bar needs a 1D mesh, got dim={mesh.dim}")
    if mat.k == 0:
        raise SingularSystemError("k = 0 leaves a rigid-body mode in the bar on elastic foundation")

    n = mesh.n_nodes
    a, b = mesh.elements[:, 0], mesh.elements[:, 1]
    h = mesh.nodes[b, 0] - mesh.nodes[a, 0]
    diagonal = mat.EA / h + mat.k * h / 3.0
    off = -mat.EA / h + mat.k * h / 6.0

    K = np.zeros((n, n))
    np.add.at(K, (a, a), diagonal)
    np.add.at(K, (b, b), diagonal)
    np.add.at(K, (a, b), off)
    np.add.at(K, (b, a), off)

    f = np.zeros(n)
    f[int(np.argmax(mesh.nodes[:, 0]))] = mat.F
    return LinearSystem(K=K, f=f, free_dofs=np.arange(n), lifting=np.zeros(n),
                        stiffness=K, f_ext=f, mesh=mesh, dofs_per_node=1)
