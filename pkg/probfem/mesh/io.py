# probfem/mesh/io.py
"""Plain-text mesh format and GMSH ASCII v2.2 import.

Text layout::

    dim n_nodes n_elements
    id x [y]                  (n_nodes lines)
    id n1 n2 [n3]             (n_elements lines)
    boundary
    id                        (one boundary node per line)
    boundary_edges            (optional, 2D)
    n1 n2 tag
    element_tags              (optional)
    id tag
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

import numpy as np

from probfem.errors import MeshError
from probfem.mesh.mesh import Mesh, boundary_edges_from_elements, signed_measures

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_SECTIONS = ("boundary", "boundary_edges", "element_tags")


def write_mesh(mesh: Mesh, path: PathLike) -> Path:
    """Write a mesh in the plain-text format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{mesh.dim} {mesh.n_nodes} {mesh.n_elements}"]
    for i, x in enumerate(mesh.nodes):
        lines.append(f"{i} " + " ".join(f"{v:.17g}" for v in x))
    for i, element in enumerate(mesh.elements):
        lines.append(f"{i} " + " ".join(str(int(v)) for v in element))
    lines.append("boundary")
    lines.extend(str(int(i)) for i in mesh.boundary_nodes)
    if len(mesh.boundary_edges):
        lines.append("boundary_edges")
        for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            lines.append(f"{int(a)} {int(b)} {tag}")
    if mesh.element_tags is not None:
        lines.append("element_tags")
        lines.extend(f"{i} {int(t)}" for i, t in enumerate(mesh.element_tags))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"Wrote mesh with {mesh.n_elements} elements to {path}")
    return path


def read_mesh(path: PathLike) -> Mesh:
    """Read a mesh written by write_mesh.

    Raises:
        MeshError: if the file is truncated or malformed
    """
    path = Path(path)
    rows = [line.split() for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    try:
        dim, n_nodes, n_elements = (int(v) for v in rows[0])
        node_rows = rows[1:1 + n_nodes]
        element_rows = rows[1 + n_nodes:1 + n_nodes + n_elements]
        nodes = np.array([[float(v) for v in row[1:1 + dim]] for row in node_rows])
        elements = np.array([[int(v) for v in row[1:2 + dim]] for row in element_rows], dtype=np.intp)
    except (ValueError, IndexError) as e:
        raise MeshError(f"Malformed mesh file {path}: {e}") from e
    if len(node_rows) != n_nodes or len(element_rows) != n_elements:
        raise MeshError(f"Mesh file {path} is truncated")

    sections: Dict[str, List[List[str]]] = {}
    current = None
    for row in rows[1 + n_nodes + n_elements:]:
        if len(row) == 1 and row[0] in _SECTIONS:
            current = row[0]
            sections[current] = []
        elif current is None:
            raise MeshError(f"Unexpected line in {path}: {' '.join(row)}")
        else:
            sections[current].append(row)

    boundary = np.array([int(r[0]) for r in sections.get("boundary", [])], dtype=np.intp)
    edge_rows = sections.get("boundary_edges", [])
    edges = np.array([[int(r[0]), int(r[1])] for r in edge_rows], dtype=np.intp).reshape(-1, 2)
    tags = tuple(r[2] if len(r) > 2 else "outer" for r in edge_rows)
    tag_rows = sections.get("element_tags")
    element_tags = None
    if tag_rows is not None:
        element_tags = np.zeros(n_elements, dtype=np.intp)
        for r in tag_rows:
            element_tags[int(r[0])] = int(r[1])
    return Mesh(nodes=nodes, elements=elements, boundary_nodes=boundary,
                boundary_edges=edges, boundary_tags=tags, element_tags=element_tags)


def read_gmsh(path: PathLike, edge_names: Optional[Mapping[int, str]] = None,
              stiff_groups: Iterable[int] = ()) -> Mesh:
    """Import a GMSH ASCII v2.2 file containing line (type 1) and triangle (type 2) elements.

    A file with triangles gives a 2D mesh whose line elements become tagged
    boundary edges. A file with lines only gives a 1D mesh along x.

    Physical group numbers carry no material meaning of their own: triangles
    get element tag 1 (support material) only when their group is listed in
    stiff_groups, and 0 (body) otherwise.

    Args:
        path: .msh file
        edge_names: boundary tag per line physical group, e.g. {3: "support_base"};
            unnamed groups keep their number as tag
        stiff_groups: triangle physical groups meshing the support and load blocks
    """
    edge_names = dict(edge_names or {})
    stiff = set(int(g) for g in stiff_groups)
    path = Path(path)
    lines = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
    try:
        fmt = lines[lines.index("$MeshFormat") + 1].split()
        start = lines.index("$Nodes") + 1
        n_nodes = int(lines[start])
        node_rows = [lines[start + 1 + i].split() for i in range(n_nodes)]
        start = lines.index("$Elements") + 1
        n_elements = int(lines[start])
        element_rows = [lines[start + 1 + i].split() for i in range(n_elements)]
    except (ValueError, IndexError) as e:
        raise MeshError(f"Malformed GMSH file {path}: {e}") from e
    if not fmt or not fmt[0].startswith("2"):
        raise MeshError(f"Unsupported GMSH format version {fmt[0] if fmt else '?'} in {path}")

    ids = {int(row[0]): i for i, row in enumerate(node_rows)}
    coords = np.array([[float(v) for v in row[1:4]] for row in node_rows])

    lines_, line_tags, triangles, triangle_tags = [], [], [], []
    for row in element_rows:
        values = [int(v) for v in row]
        kind, n_tags = values[1], values[2]
        tags = values[3:3 + n_tags]
        connectivity = [ids[v] for v in values[3 + n_tags:]]
        physical = tags[0] if tags else 0
        if kind == 1:
            lines_.append(connectivity)
            line_tags.append(physical)
        elif kind == 2:
            triangles.append(connectivity)
            triangle_tags.append(physical)
        elif kind != 15:
            raise MeshError(f"Unsupported GMSH element type {kind} in {path}")

    if triangles:
        elements = np.array(triangles, dtype=np.intp)
        nodes = coords[:, :2]
        flipped = signed_measures(nodes, elements) < 0
        elements[flipped] = elements[flipped][:, [0, 2, 1]]
        if lines_:
            edges = np.array(lines_, dtype=np.intp)
            tags = tuple(edge_names.get(t, str(t)) for t in line_tags)
        else:
            edges = boundary_edges_from_elements(elements)
            tags = ("outer",) * len(edges)
        element_tags = np.array([1 if t in stiff else 0 for t in triangle_tags], dtype=np.intp)
        return _drop_unused(nodes, elements, edges, tags, element_tags)

    if not lines_:
        raise MeshError(f"No line or triangle elements in {path}")
    elements = np.array(lines_, dtype=np.intp)
    nodes = coords[:, :1]
    flipped = nodes[elements[:, 1], 0] < nodes[elements[:, 0], 0]
    elements[flipped] = elements[flipped][:, ::-1]
    counts = np.bincount(elements.ravel(), minlength=len(nodes))
    return Mesh(nodes=nodes, elements=elements, boundary_nodes=np.flatnonzero(counts == 1))


def _drop_unused(nodes, elements, edges, tags, element_tags) -> Mesh:
    # GMSH files often keep geometry points that no triangle uses
    used = np.unique(elements)
    renumber = np.full(len(nodes), -1, dtype=np.intp)
    renumber[used] = np.arange(used.size)
    keep = np.all(renumber[edges] >= 0, axis=1)
    edges = renumber[edges[keep]]
    tags = tuple(t for t, k in zip(tags, keep) if k)
    return Mesh(nodes=nodes[used], elements=renumber[elements], boundary_nodes=np.unique(edges),
                boundary_edges=edges, boundary_tags=tags, element_tags=element_tags)
