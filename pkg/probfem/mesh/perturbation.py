# probfem/mesh/perturbation.py
"""Random node perturbation x_i -> x_i + h_i^p * alpha_i for random-mesh FEM."""
import logging
from typing import Iterable, Optional

import numpy as np

from probfem.errors import PerturbationError
from probfem.mesh.mesh import Mesh, signed_measures

logger = logging.getLogger(__name__)

DEFAULT_RADIUS = 0.25
DEFAULT_MAX_ATTEMPTS = 100
# boundary nodes where the boundary turns by more than this stay fixed
CORNER_ANGLE = np.deg2rad(45.0)


def sample_uniform_ball(dim: int, radius: float, rng: np.random.Generator,
                        size: Optional[int] = None) -> np.ndarray:
    """Draw points uniformly from the ball of the given radius around the origin.

    Returns:
        array of shape (dim,) or (size, dim)
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    count = 1 if size is None else size
    if dim == 1:
        out = rng.uniform(-radius, radius, size=(count, 1))
    else:
        angle = rng.uniform(0.0, 2.0 * np.pi, size=count)
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=count))
        out = np.column_stack([r * np.cos(angle), r * np.sin(angle)])
    return out[0] if size is None else out


def _project_onto_segments(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    direction = ends - starts
    length2 = (direction ** 2).sum(axis=1)
    t = ((points - starts) * direction).sum(axis=1) / length2
    return starts + np.clip(t, 0.0, 1.0)[:, None] * direction


class MeshPerturber:
    """Reusable sampler of perturbed copies of one mesh.

    Boundary bookkeeping is done once here so that drawing many replicas
    only costs the random offsets and a validity check.
    """

    def __init__(self, mesh: Mesh, p: float = 1.0, fixed_nodes: Iterable[int] = (),
                 radius: float = DEFAULT_RADIUS, max_attempts: int = DEFAULT_MAX_ATTEMPTS):
        if p <= 0:
            raise ValueError(f"p must be positive, got {p}")
        if radius < 0:
            raise ValueError(f"radius must be non-negative, got {radius}")
        if max_attempts < 1:
            raise ValueError(f"max_attempts must be positive, got {max_attempts}")
        fixed = np.unique(np.asarray(list(fixed_nodes), dtype=np.intp))
        if fixed.size and (fixed.min() < 0 or fixed.max() >= mesh.n_nodes):
            raise ValueError(f"fixed_nodes must be valid node indices for {mesh.n_nodes} nodes")

        self.mesh = mesh
        self.radius = radius
        self.max_attempts = max_attempts
        self.scale = mesh.node_sizes ** p
        self.pinned = np.zeros(mesh.n_nodes, dtype=bool)
        self.pinned[fixed] = True

        self.sliding = np.zeros(0, dtype=np.intp)
        self.prev_node = np.zeros(0, dtype=np.intp)
        self.next_node = np.zeros(0, dtype=np.intp)
        if mesh.dim == 1:
            self.pinned[mesh.boundary_nodes] = True
        else:
            self._classify_boundary()
        self.scale = np.where(self.pinned, 0.0, self.scale)

    def _classify_boundary(self):
        mesh = self.mesh
        edges = mesh.boundary_edges
        boundary = np.unique(edges) if len(edges) else mesh.boundary_nodes
        neighbours = {}
        for (start, end), tag in zip(edges.tolist(), mesh.boundary_tags):
            neighbours.setdefault(start, []).append((end, tag))
            neighbours.setdefault(end, []).append((start, tag))

        sliding, prev_nodes, next_nodes = [], [], []
        for node in boundary.tolist():
            adjacent = neighbours.get(node, [])
            if self.pinned[node] or len(adjacent) != 2:
                self.pinned[node] = True
                continue
            (prev, tag_in), (nxt, tag_out) = adjacent
            if tag_in != tag_out:
                self.pinned[node] = True
                continue
            d_in = mesh.nodes[node] - mesh.nodes[prev]
            d_out = mesh.nodes[nxt] - mesh.nodes[node]
            cos_turn = d_in @ d_out / (np.linalg.norm(d_in) * np.linalg.norm(d_out))
            if np.arccos(np.clip(cos_turn, -1.0, 1.0)) > CORNER_ANGLE:
                self.pinned[node] = True
                continue
            sliding.append(node)
            prev_nodes.append(prev)
            next_nodes.append(nxt)

        # mesh.boundary_nodes may list nodes that carry no tagged edge
        self.pinned[np.setdiff1d(mesh.boundary_nodes, boundary)] = True
        self.sliding = np.asarray(sliding, dtype=np.intp)
        self.prev_node = np.asarray(prev_nodes, dtype=np.intp)
        self.next_node = np.asarray(next_nodes, dtype=np.intp)

    def _propose(self, rng: np.random.Generator) -> np.ndarray:
        mesh = self.mesh
        offsets = sample_uniform_ball(mesh.dim, self.radius, rng, size=mesh.n_nodes)
        moved = mesh.nodes + self.scale[:, None] * offsets
        if self.sliding.size:
            x = mesh.nodes[self.sliding]
            candidate = moved[self.sliding]
            on_prev = _project_onto_segments(candidate, mesh.nodes[self.prev_node], x)
            on_next = _project_onto_segments(candidate, x, mesh.nodes[self.next_node])
            use_prev = ((on_prev - candidate) ** 2).sum(axis=1) <= ((on_next - candidate) ** 2).sum(axis=1)
            moved[self.sliding] = np.where(use_prev[:, None], on_prev, on_next)
        moved[self.pinned] = mesh.nodes[self.pinned]
        return moved

    def sample(self, rng: np.random.Generator) -> Mesh:
        """Draw one perturbed mesh, resampling until no element is inverted.

        Raises:
            PerturbationError: if every attempt produced an inverted element
        """
        for attempt in range(self.max_attempts):
            moved = self._propose(rng)
            if np.all(signed_measures(moved, self.mesh.elements) > 0.0):
                if attempt:
                    logger.debug(f"Perturbed mesh accepted after {attempt + 1} attempts")
                return self.mesh.with_nodes(moved)
        raise PerturbationError(
            f"No valid perturbed mesh after {self.max_attempts} attempts "
            f"(radius {self.radius}, {self.mesh.n_elements} elements)"
        )


def perturb_mesh(mesh: Mesh, p: float, fixed_nodes: Iterable[int], rng: np.random.Generator,
                 radius: float = DEFAULT_RADIUS, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> Mesh:
    """Randomly displace the nodes of a mesh.

    Interior nodes move by h_i^p * alpha_i with alpha_i uniform in a ball of
    the given radius. Boundary nodes are moved the same way and projected back
    onto their two incident boundary edges; boundary corners and fixed_nodes
    keep their coordinates.
    """
    return MeshPerturber(mesh, p, fixed_nodes, radius, max_attempts).sample(rng)
