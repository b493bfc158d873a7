# probfem/mesh/mesh.py
"""Simplicial mesh container (1D segments, 2D triangles) and basic queries."""
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from probfem.errors import MeshError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable simplicial mesh.

    Attributes:
        nodes: (n_nodes, dim) coordinates
        elements: (n_elements, dim + 1) node indices; triangles counter-clockwise
        boundary_nodes: sorted indices of nodes on the domain boundary
        boundary_edges: (k, 2) boundary segments of a 2D mesh, empty in 1D
        boundary_tags: one tag per boundary edge ("outer", "hole", ...)
        element_tags: optional material region per element (0 = body)
    """
    nodes: np.ndarray
    elements: np.ndarray
    boundary_nodes: np.ndarray
    boundary_edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.intp))
    boundary_tags: Tuple[str, ...] = ()
    element_tags: Optional[np.ndarray] = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        if nodes.ndim != 2 or nodes.shape[1] not in (1, 2):
            raise ValueError(f"nodes must have shape (n, 1) or (n, 2), got {nodes.shape}")
        elements = np.asarray(self.elements, dtype=np.intp).reshape(-1, nodes.shape[1] + 1)
        edges = np.asarray(self.boundary_edges, dtype=np.intp).reshape(-1, 2)
        tags = tuple(self.boundary_tags) or ("outer",) * len(edges)
        if len(tags) != len(edges):
            raise ValueError(f"boundary_tags must have one entry per boundary edge, got {len(tags)} for {len(edges)}")

        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "elements", _frozen(elements))
        object.__setattr__(self, "boundary_nodes", _frozen(np.unique(np.asarray(self.boundary_nodes, dtype=np.intp))))
        object.__setattr__(self, "boundary_edges", _frozen(edges))
        object.__setattr__(self, "boundary_tags", tags)
        if self.element_tags is not None:
            object.__setattr__(self, "element_tags", _frozen(np.asarray(self.element_tags, dtype=np.intp)))

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @cached_property
    def diameter(self) -> float:
        """Diagonal of the bounding box."""
        return float(np.linalg.norm(self.nodes.max(axis=0) - self.nodes.min(axis=0)))

    def signed_measures(self) -> np.ndarray:
        """Signed element lengths (1D) or areas (2D)."""
        return signed_measures(self.nodes, self.elements)

    def element_diameters(self) -> np.ndarray:
        """Longest edge of every element."""
        x = self.nodes[self.elements]
        if self.dim == 1:
            return np.abs(x[:, 1, 0] - x[:, 0, 0])
        edges = x[:, [1, 2, 0], :] - x
        return np.sqrt((edges ** 2).sum(axis=2)).max(axis=1)

    @cached_property
    def node_sizes(self) -> np.ndarray:
        """Local mesh size h_i: smallest diameter over the elements touching node i."""
        sizes = np.full(self.n_nodes, np.inf)
        diameters = self.element_diameters()
        np.minimum.at(sizes, self.elements.ravel(), np.repeat(diameters, self.elements.shape[1]))
        sizes.setflags(write=False)
        return sizes

    def tagged_edges(self, tag: str) -> np.ndarray:
        """Boundary edges carrying the given tag."""
        mask = np.array([t == tag for t in self.boundary_tags], dtype=bool)
        return self.boundary_edges[mask] if mask.size else self.boundary_edges

    def with_nodes(self, nodes: np.ndarray) -> "Mesh":
        """Same topology, tags and boundary, moved nodes."""
        return replace(self, nodes=nodes)


def signed_measures(nodes: np.ndarray, elements: np.ndarray) -> np.ndarray:
    x = nodes[elements]
    if nodes.shape[1] == 1:
        return x[:, 1, 0] - x[:, 0, 0]
    e1 = x[:, 1] - x[:, 0]
    e2 = x[:, 2] - x[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def validate_mesh(mesh: Mesh) -> bool:
    """Check the structural invariants of a mesh.

    Returns:
        True when every element references valid, distinct nodes and has
        strictly positive signed measure (1D: increasing x, 2D: counter-clockwise).
    """
    elements = mesh.elements
    if mesh.n_nodes == 0 or mesh.n_elements == 0:
        return False
    if not np.all(np.isfinite(mesh.nodes)):
        return False
    if elements.min() < 0 or elements.max() >= mesh.n_nodes:
        return False
    ordered = np.sort(elements, axis=1)
    if np.any(ordered[:, 1:] == ordered[:, :-1]):
        return False
    if np.any(mesh.signed_measures() <= 0.0):
        return False
    if mesh.boundary_nodes.size and (mesh.boundary_nodes.min() < 0 or mesh.boundary_nodes.max() >= mesh.n_nodes):
        return False
    return True


def generate_interval_mesh(length: float, n_elements: int) -> Mesh:
    """Uniform mesh of [0, length] with n_elements equal segments."""
    if length <= 0:
        raise ValueError(f"length must be positive, got {length}")
    if int(n_elements) != n_elements or n_elements < 1:
        raise ValueError(f"n_elements must be a positive integer, got {n_elements}")
    n_elements = int(n_elements)
    nodes = np.linspace(0.0, length, n_elements + 1)[:, None]
    elements = np.column_stack([np.arange(n_elements), np.arange(1, n_elements + 1)])
    return Mesh(nodes=nodes, elements=elements, boundary_nodes=np.array([0, n_elements]))


def boundary_edges_from_elements(elements: np.ndarray) -> np.ndarray:
    """Edges of a triangulation that belong to exactly one triangle, oriented as in their triangle."""
    elements = np.asarray(elements, dtype=np.intp)
    edges = elements[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    keys = np.sort(edges, axis=1)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    return edges[counts[inverse.ravel()] == 1]


def find_nodes(mesh: Mesh, points: Sequence, tol: Optional[float] = None) -> np.ndarray:
    """Indices of the mesh nodes coinciding with the given points.

    Args:
        mesh: mesh to search
        points: (m, dim) coordinates
        tol: matching tolerance, defaults to 1e-9 times the mesh diameter

    Raises:
        MeshError: if some point has no node within tol
    """
    points = np.asarray(points, dtype=float).reshape(-1, mesh.dim)
    if tol is None:
        tol = 1e-9 * mesh.diameter
    distance, index = cKDTree(mesh.nodes).query(points)
    missing = distance > tol
    if np.any(missing):
        raise MeshError(f"No mesh node within {tol:.3g} of points {points[missing].tolist()}")
    return index.astype(np.intp)
