"""Rounded-square hole, three-point bending beam and its triangulation."""
from probfem.geometry.hole import (
    ADMISSIBILITY_CLEARANCE,
    HoleParams,
    hole_boundary,
    hole_extent,
    hole_perimeter,
    hole_tangent,
    signed_distance_hole,
)
from probfem.geometry.beam import (
    BeamGeometry,
    beam_outline,
    hole_admissible,
    interface_segments,
    sensor_locations,
)
from probfem.geometry.triangulate import min_angle, triangulate_beam

__all__ = [
    "ADMISSIBILITY_CLEARANCE",
    "BeamGeometry",
    "HoleParams",
    "beam_outline",
    "hole_admissible",
    "hole_boundary",
    "hole_extent",
    "hole_perimeter",
    "hole_tangent",
    "interface_segments",
    "min_angle",
    "sensor_locations",
    "signed_distance_hole",
    "triangulate_beam",
]
