# probfem/tests/helpers.py
"""Small meshes and chains shared by the unit tests."""
import numpy as np

from probfem.inference.sampler import Chain
from probfem.mesh.mesh import Mesh, boundary_edges_from_elements


def unit_square_mesh(n: int = 2, size: float = 1.0) -> Mesh:
    """Structured n x n square of side `size`, each cell split along its diagonal."""
    xs = np.linspace(0.0, size, n + 1)
    X, Y = np.meshgrid(xs, xs)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    elements = []
    for row in range(n):
        for col in range(n):
            a = row * (n + 1) + col
            b, c = a + 1, a + n + 1
            d = c + 1
            elements.append([a, b, d])
            elements.append([a, d, c])
    elements = np.array(elements)
    edges = boundary_edges_from_elements(elements)
    return Mesh(nodes=nodes, elements=elements, boundary_nodes=np.unique(edges), boundary_edges=edges)


def right_triangle_mesh() -> Mesh:
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    elements = np.array([[0, 1, 2]])
    edges = boundary_edges_from_elements(elements)
    return Mesh(nodes=nodes, elements=elements, boundary_nodes=[0, 1, 2], boundary_edges=edges)


def make_chain(samples, names=("EA", "k"), seed: int = 0) -> Chain:
    """Chain object around fixed samples, as the sampler would return it."""
    samples = np.asarray(samples, dtype=float)
    n_burn = 20
    return Chain(
        parameter_names=tuple(names),
        samples=samples,
        log_posterior=np.zeros(len(samples)),
        log_likelihood=np.zeros(len(samples)),
        accepted=len(samples) // 4,
        proposal_cov=np.eye(samples.shape[1]),
        temperatures=np.linspace(0.0, 1.0, n_burn),
        scales=np.ones(n_burn),
        window_acceptance=np.array([0.3, 0.25]),
        seed=seed,
        config={"n_burn": n_burn},
    )
