# probfem/geometry/beam.py
"""Three-point bending specimen: beam outline, support/load blocks and sensors."""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from probfem.geometry.hole import (
    ADMISSIBILITY_CLEARANCE,
    HoleParams,
    hole_boundary,
    hole_extent,
)

Rectangle = Tuple[float, float, float, float]


@dataclass(frozen=True)
class BeamGeometry:
    """Simply supported beam of height H, span L and overhang c on each side.

    Supports are stiff blocks under x = c and x = c + L; the load plate sits
    on top at midspan. All blocks share the same footprint.
    """
    H: float = 1.0
    L: float = 4.0
    c: float = 0.5
    support_width: float = 0.2
    support_height: float = 0.1
    sensor_spacing: float = 0.5

    def __post_init__(self):
        if self.H <= 0:
            raise ValueError(f"H must be positive, got {self.H}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.support_width <= 0 or self.support_height <= 0:
            raise ValueError(
                f"support footprint must be positive, got {self.support_width} x {self.support_height}"
            )
        if self.c < self.support_width / 2:
            raise ValueError(f"c must be at least half the support width, got {self.c}")
        if self.sensor_spacing <= 0:
            raise ValueError(f"sensor_spacing must be positive, got {self.sensor_spacing}")

    @property
    def length(self) -> float:
        return self.L + 2 * self.c

    @property
    def support_centers(self) -> Tuple[float, float]:
        return self.c, self.c + self.L

    @property
    def midspan(self) -> float:
        return self.c + self.L / 2

    @property
    def load_point(self) -> np.ndarray:
        """Top-center node of the load plate, where the displacement is prescribed."""
        return np.array([self.midspan, self.H + self.support_height])

    def support_blocks(self) -> List[Rectangle]:
        half = self.support_width / 2
        return [(x - half, x + half, -self.support_height, 0.0) for x in self.support_centers]

    def load_block(self) -> Rectangle:
        half = self.support_width / 2
        return (self.midspan - half, self.midspan + half, self.H, self.H + self.support_height)


def beam_outline(beam: BeamGeometry) -> Tuple[np.ndarray, List[str]]:
    """Corner points of the outer boundary in counter-clockwise order.

    Returns:
        points (k, 2) and k edge tags; edge i runs from points[i] to points[(i + 1) % k]
    """
    (l0, l1, hs_neg, _), (r0, r1, _, _) = beam.support_blocks()
    p0, p1, _, top = beam.load_block()
    hs = -hs_neg
    H, Lt, mid = beam.H, beam.length, beam.midspan
    corners = [
        ((0.0, 0.0), "outer"), ((l0, 0.0), "outer"), ((l0, -hs), "support_base"),
        ((l1, -hs), "outer"), ((l1, 0.0), "outer"), ((r0, 0.0), "outer"),
        ((r0, -hs), "support_base"), ((r1, -hs), "outer"), ((r1, 0.0), "outer"),
        ((Lt, 0.0), "outer"), ((Lt, H), "outer"), ((p1, H), "outer"),
        ((p1, top), "load"), ((mid, top), "load"), ((p0, top), "outer"),
        ((p0, H), "outer"), ((0.0, H), "outer"),
    ]
    return np.array([c[0] for c in corners]), [c[1] for c in corners]


def interface_segments(beam: BeamGeometry) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Internal segments where the blocks meet the beam."""
    segments = [(np.array([x0, 0.0]), np.array([x1, 0.0])) for x0, x1, _, _ in beam.support_blocks()]
    x0, x1, y0, _ = beam.load_block()
    segments.append((np.array([x0, y0]), np.array([x1, y0])))
    return segments


def _outside_blocks(points: np.ndarray, blocks: List[Rectangle], margin: float = 0.0) -> np.ndarray:
    keep = np.ones(len(points), dtype=bool)
    for x0, x1, y0, y1 in blocks:
        inside = ((points[:, 0] > x0 - margin) & (points[:, 0] < x1 + margin)
                  & (points[:, 1] > y0 - margin) & (points[:, 1] < y1 + margin))
        keep &= ~inside
    return keep


def sensor_locations(beam: BeamGeometry) -> np.ndarray:
    """Sensors at uniform spacing along the outer beam boundary.

    Points start half a spacing from each corner; points on the support or
    load footprints are skipped. Order runs counter-clockwise from the
    bottom-left corner.
    """
    h_m = beam.sensor_spacing
    xs = np.arange(h_m / 2, beam.length, h_m)
    ys = np.arange(h_m / 2, beam.H, h_m)
    bottom = np.column_stack([xs, np.zeros_like(xs)])
    right = np.column_stack([np.full_like(ys, beam.length), ys])
    top = np.column_stack([xs[::-1], np.full_like(xs, beam.H)])
    left = np.column_stack([np.zeros_like(ys), ys[::-1]])
    points = np.vstack([bottom, right, top, left])
    footprint = np.ones(len(points), dtype=bool)
    for x0, x1, y0, y1 in beam.support_blocks() + [beam.load_block()]:
        edge_y = y1 if y1 <= 0.0 else y0
        footprint &= ~((points[:, 1] == edge_y) & (points[:, 0] >= x0) & (points[:, 0] <= x1))
    return points[footprint]


def hole_admissible(params: HoleParams, beam: BeamGeometry,
                    clearance: float = ADMISSIBILITY_CLEARANCE, n_samples: int = 256) -> bool:
    """True if the hole lies inside the beam body, clear of its boundary and of the blocks."""
    extent = hole_extent(params)
    if params.x - extent < clearance or params.x + extent > beam.length - clearance:
        return False
    if params.y - extent < clearance or params.y + extent > beam.H - clearance:
        return False
    polyline = hole_boundary(params, n_samples)
    blocks = beam.support_blocks() + [beam.load_block()]
    return bool(np.all(_outside_blocks(polyline, blocks, margin=clearance)))
