# probfem/mesh/refinement.py
"""Uniform hierarchical refinement: segments split in two, triangles in four."""
from dataclasses import dataclass

import numpy as np

from probfem.mesh.mesh import Mesh


@dataclass(frozen=True, eq=False)
class RefinementMap:
    """Coarse/fine pair produced by refine_hierarchical.

    The first coarse.n_nodes fine nodes are the coarse nodes in the same
    order, so coarse nodal vectors embed into the fine space by padding.
    """
    coarse: Mesh
    fine: Mesh
    coarse_to_fine: np.ndarray
    parent: np.ndarray

    @property
    def n_coarse_nodes(self) -> int:
        return self.coarse.n_nodes


def _edge_keys(edges: np.ndarray, n_nodes: int) -> np.ndarray:
    ordered = np.sort(edges, axis=-1).astype(np.int64)
    return ordered[..., 0] * n_nodes + ordered[..., 1]


def _refine_interval(mesh: Mesh) -> RefinementMap:
    n, ne = mesh.n_nodes, mesh.n_elements
    a, b = mesh.elements[:, 0], mesh.elements[:, 1]
    midpoints = n + np.arange(ne)
    nodes = np.vstack([mesh.nodes, 0.5 * (mesh.nodes[a] + mesh.nodes[b])])
    children = np.stack([np.column_stack([a, midpoints]), np.column_stack([midpoints, b])], axis=1)
    elements = children.reshape(-1, 2)
    fine = Mesh(nodes=nodes, elements=elements, boundary_nodes=mesh.boundary_nodes,
                element_tags=None if mesh.element_tags is None else np.repeat(mesh.element_tags, 2))
    return RefinementMap(coarse=mesh, fine=fine,
                         coarse_to_fine=np.arange(2 * ne).reshape(ne, 2),
                         parent=np.repeat(np.arange(ne), 2))


def _refine_triangles(mesh: Mesh) -> RefinementMap:
    n, ne = mesh.n_nodes, mesh.n_elements
    tri = mesh.elements
    local_edges = tri[:, [0, 1, 1, 2, 2, 0]].reshape(ne, 3, 2)
    keys = _edge_keys(local_edges, n)
    unique_keys, inverse = np.unique(keys.ravel(), return_inverse=True)
    edge_id = inverse.reshape(ne, 3)
    first = unique_keys // n
    second = unique_keys % n
    nodes = np.vstack([mesh.nodes, 0.5 * (mesh.nodes[first] + mesh.nodes[second])])

    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    mab, mbc, mca = (n + edge_id[:, 0], n + edge_id[:, 1], n + edge_id[:, 2])
    children = np.stack([
        np.column_stack([a, mab, mca]),
        np.column_stack([mab, b, mbc]),
        np.column_stack([mca, mbc, c]),
        np.column_stack([mab, mbc, mca]),
    ], axis=1)
    elements = children.reshape(-1, 3)

    boundary_edges = mesh.boundary_edges
    if len(boundary_edges):
        split = n + np.searchsorted(unique_keys, _edge_keys(boundary_edges, n))
        halves = np.stack([np.column_stack([boundary_edges[:, 0], split]),
                           np.column_stack([split, boundary_edges[:, 1]])], axis=1)
        fine_edges = halves.reshape(-1, 2)
        fine_tags = tuple(tag for tag in mesh.boundary_tags for _ in range(2))
        boundary_nodes = np.unique(fine_edges)
    else:
        fine_edges = np.zeros((0, 2), dtype=np.intp)
        fine_tags = ()
        boundary_nodes = mesh.boundary_nodes

    fine = Mesh(nodes=nodes, elements=elements, boundary_nodes=boundary_nodes,
                boundary_edges=fine_edges, boundary_tags=fine_tags,
                element_tags=None if mesh.element_tags is None else np.repeat(mesh.element_tags, 4))
    return RefinementMap(coarse=mesh, fine=fine,
                         coarse_to_fine=np.arange(4 * ne).reshape(ne, 4),
                         parent=np.repeat(np.arange(ne), 4))


def refine_hierarchical(mesh: Mesh, levels: int = 1) -> RefinementMap:
    """Refine every element uniformly, `levels` times.

    Args:
        mesh: coarse mesh
        levels: number of successive refinements (one gives the usual
            reference mesh with half the element size)

    Returns:
        RefinementMap whose coarse_to_fine rows list the 2**levels (1D) or
        4**levels (2D) descendants of each coarse element.
    """
    if levels < 1:
        raise ValueError(f"levels must be at least 1, got {levels}")
    step = _refine_interval if mesh.dim == 1 else _refine_triangles
    result = step(mesh)
    for _ in range(levels - 1):
        nxt = step(result.fine)
        result = RefinementMap(
            coarse=mesh,
            fine=nxt.fine,
            coarse_to_fine=nxt.coarse_to_fine[result.coarse_to_fine].reshape(mesh.n_elements, -1),
            parent=result.parent[nxt.parent],
        )
    return result
