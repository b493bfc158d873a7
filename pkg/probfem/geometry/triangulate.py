# probfem/geometry/triangulate.py
"""Quality triangulation of the beam-with-hole domain.

The boundary polylines (outer outline with sensors, block interfaces and
the hole) are fed to Triangle together with a hexagonal lattice of
interior points; Triangle computes the constrained Delaunay triangulation
and applies Ruppert refinement up to the minimum-angle bound.
"""
import logging
from typing import List, Tuple

import numpy as np
import triangle

from probfem.errors import TriangulationError
from probfem.geometry.beam import (
    BeamGeometry,
    beam_outline,
    hole_admissible,
    interface_segments,
    sensor_locations,
)
from probfem.geometry.hole import (
    ADMISSIBILITY_CLEARANCE,
    HoleParams,
    hole_boundary,
    hole_perimeter,
    signed_distance_hole,
)
from probfem.mesh.mesh import Mesh, find_nodes, signed_measures, validate_mesh

logger = logging.getLogger(__name__)

MIN_ANGLE_DEG = 20.0
# lattice spacing and boundary keep-out, relative to h
LATTICE_SPACING = 1.3
LATTICE_MARGIN = 0.5
MAX_AREA = 0.6

_MARKERS = {"outer": 1, "hole": 2, "support_base": 3, "load": 4, "interface": 5}
_TAGS = {v: k for k, v in _MARKERS.items()}
_BOUNDARY_MARKERS = (1, 2, 3, 4)


class _PSLG:
    """Vertex/segment accumulator that never duplicates a vertex."""

    def __init__(self):
        self.vertices: List[np.ndarray] = []
        self.segments: List[Tuple[int, int]] = []
        self.markers: List[int] = []
        self._index = {}

    def vertex(self, point) -> int:
        point = np.asarray(point, dtype=float)
        key = (round(float(point[0]), 12), round(float(point[1]), 12))
        if key not in self._index:
            self._index[key] = len(self.vertices)
            self.vertices.append(point)
        return self._index[key]

    def polyline(self, points: np.ndarray, marker: int, h: float, closed: bool = False):
        """Add the edges of a polyline, splitting each into pieces no longer than h."""
        count = len(points)
        stop = count if closed else count - 1
        for i in range(stop):
            start, end = points[i], points[(i + 1) % count]
            pieces = max(1, int(np.ceil(np.linalg.norm(end - start) / h - 1e-9)))
            inner = [start + (end - start) * k / pieces for k in range(1, pieces)]
            ids = [self.vertex(p) for p in [start, *inner, end]]
            for a, b in zip(ids[:-1], ids[1:]):
                self.segments.append((a, b))
                self.markers.append(marker)


def _insert_on_edges(points: np.ndarray, tags: List[str], extra: np.ndarray) -> Tuple[np.ndarray, List[str]]:
    """Insert the extra points lying on outline edges, keeping counter-clockwise order."""
    out_points, out_tags = [], []
    count = len(points)
    for i in range(count):
        start, end = points[i], points[(i + 1) % count]
        out_points.append(start)
        out_tags.append(tags[i])
        direction = end - start
        length = np.linalg.norm(direction)
        t = (extra - start) @ direction / length ** 2
        off = np.abs(direction[0] * (extra[:, 1] - start[1]) - direction[1] * (extra[:, 0] - start[0])) / length
        on_edge = np.flatnonzero((off < 1e-12 * length) & (t > 1e-12) & (t < 1 - 1e-12))
        for k in on_edge[np.argsort(t[on_edge])]:
            out_points.append(extra[k])
            out_tags.append(tags[i])
    return np.array(out_points), out_tags


def _lattice(beam: BeamGeometry, hole: HoleParams, spacing: float, shift: float) -> np.ndarray:
    dy = spacing * np.sqrt(3.0) / 2.0
    ys = np.arange(shift * dy, beam.H, dy)
    rows = []
    for j, y in enumerate(ys):
        x0 = (shift + 0.5 * (j % 2)) * spacing
        xs = np.arange(x0, beam.length, spacing)
        rows.append(np.column_stack([xs, np.full_like(xs, y)]))
    points = np.vstack(rows) if rows else np.zeros((0, 2))
    margin = LATTICE_MARGIN * spacing
    wall = np.minimum.reduce([points[:, 0], beam.length - points[:, 0], points[:, 1], beam.H - points[:, 1]])
    keep = (wall >= margin) & (signed_distance_hole(points, hole) >= margin)
    return points[keep]


def _min_angles(nodes: np.ndarray, elements: np.ndarray) -> np.ndarray:
    x = nodes[elements]
    a = np.linalg.norm(x[:, 1] - x[:, 2], axis=1)
    b = np.linalg.norm(x[:, 2] - x[:, 0], axis=1)
    c = np.linalg.norm(x[:, 0] - x[:, 1], axis=1)
    cos_a = (b ** 2 + c ** 2 - a ** 2) / (2 * b * c)
    cos_b = (a ** 2 + c ** 2 - b ** 2) / (2 * a * c)
    cos_c = (a ** 2 + b ** 2 - c ** 2) / (2 * a * b)
    angles = np.degrees(np.arccos(np.clip(np.column_stack([cos_a, cos_b, cos_c]), -1.0, 1.0)))
    return angles.min(axis=1)


def min_angle(mesh: Mesh) -> float:
    """Smallest interior angle of a triangle mesh, in degrees."""
    return float(_min_angles(mesh.nodes, mesh.elements).min())


def _build(beam: BeamGeometry, hole: HoleParams, h: float, shift: float) -> Mesh:
    pslg = _PSLG()
    outline, tags = beam_outline(beam)
    outline, tags = _insert_on_edges(outline, tags, sensor_locations(beam))
    count = len(outline)
    for i in range(count):
        pslg.polyline(outline[[i, (i + 1) % count]], _MARKERS[tags[i]], h)
    for start, end in interface_segments(beam):
        pslg.polyline(np.array([start, end]), _MARKERS["interface"], h)
    n_hole = max(16, int(np.ceil(hole_perimeter(hole) / (0.5 * h))))
    pslg.polyline(hole_boundary(hole, n_hole), _MARKERS["hole"], np.inf, closed=True)

    n_boundary = len(pslg.vertices)
    interior = _lattice(beam, hole, LATTICE_SPACING * h, shift)
    vertices = np.vstack([np.array(pslg.vertices), interior])

    block_regions = [[0.5 * (x0 + x1), 0.5 * (y0 + y1), 1, 0]
                     for x0, x1, y0, y1 in beam.support_blocks() + [beam.load_block()]]
    # admissible holes keep clear of the left edge, so this seed is always in the body
    body_region = [[0.5 * ADMISSIBILITY_CLEARANCE, 0.5 * beam.H, 0, 0]]
    max_area = MAX_AREA * (LATTICE_SPACING * h) ** 2
    data = {
        "vertices": vertices,
        "segments": np.array(pslg.segments, dtype=np.int32),
        "segment_markers": np.array(pslg.markers, dtype=np.int32)[:, None],
        "holes": np.array([[hole.x, hole.y]]),
        "regions": np.array(body_region + block_regions, dtype=float),
    }
    try:
        out = triangle.triangulate(data, f"pq{MIN_ANGLE_DEG + 0.5}a{max_area:.10f}AQ")
    except Exception as e:
        raise TriangulationError(f"Triangle failed for h={h}: {e}") from e
    logger.debug(f"Triangulated {n_boundary} boundary and {len(interior)} lattice vertices, "
                 f"{len(out.get('triangles', []))} triangles")
    return _to_mesh(out)


def _to_mesh(out: dict) -> Mesh:
    nodes = np.asarray(out["vertices"], dtype=float)
    elements = np.asarray(out["triangles"], dtype=np.intp)
    flipped = signed_measures(nodes, elements) < 0
    elements[flipped] = elements[flipped][:, [0, 2, 1]]
    segments = np.asarray(out["segments"], dtype=np.intp)
    markers = np.asarray(out["segment_markers"], dtype=int).ravel()
    on_boundary = np.isin(markers, _BOUNDARY_MARKERS)
    edges = segments[on_boundary]
    tags = tuple(_TAGS[m] for m in markers[on_boundary])
    attributes = out.get("triangle_attributes")
    element_tags = None if attributes is None else np.rint(np.asarray(attributes).ravel()).astype(np.intp)
    used = np.unique(elements)
    if used.size != len(nodes):
        renumber = np.full(len(nodes), -1, dtype=np.intp)
        renumber[used] = np.arange(used.size)
        nodes, elements, edges = nodes[used], renumber[elements], renumber[edges]
    return Mesh(nodes=nodes, elements=elements, boundary_nodes=np.unique(edges),
                boundary_edges=edges, boundary_tags=tags, element_tags=element_tags)


def triangulate_beam(beam: BeamGeometry, hole: HoleParams, h: float, max_retries: int = 3) -> Mesh:
    """Mesh the beam with its hole using linear triangles of size about h.

    The outline carries a node at every sensor, at the block corners and at
    the load point. Boundary edges are tagged "outer", "hole",
    "support_base" or "load"; element_tags marks block elements with 1.

    Raises:
        ValueError: for h <= 0 or an inadmissible hole
        TriangulationError: if no mesh meeting the angle bound is found
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    if not hole_admissible(hole, beam):
        raise ValueError(f"hole {hole} is not admissible for the beam")
    sensors = sensor_locations(beam)
    last_error = None
    for attempt in range(max_retries):
        shift = 0.37 * attempt
        try:
            mesh = _build(beam, hole, h, shift)
            if not validate_mesh(mesh):
                raise TriangulationError("triangulation produced an invalid mesh")
            angle = min_angle(mesh)
            if angle < MIN_ANGLE_DEG:
                raise TriangulationError(f"minimum angle {angle:.2f} below {MIN_ANGLE_DEG}")
            find_nodes(mesh, np.vstack([sensors, beam.load_point]))
            return mesh
        except TriangulationError as e:
            last_error = e
            logger.warning(f"Triangulation attempt {attempt + 1} for h={h} failed: {e}")
        except Exception as e:
            last_error = TriangulationError(str(e))
            logger.warning(f"Triangulation attempt {attempt + 1} for h={h} failed: {e}")
    raise TriangulationError(f"Could not triangulate beam with h={h}: {last_error}")
