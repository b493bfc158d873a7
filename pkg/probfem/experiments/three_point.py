# probfem/experiments/three_point.py
"""Three-point bending of a beam with an unknown rounded-square hole."""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from probfem.fem.elasticity import BoundaryConditions2D, MaterialParams2D, assemble_elasticity
from probfem.fem.problem import ForwardProblem
from probfem.fem.system import LinearSystem
from probfem.geometry.beam import BeamGeometry, hole_admissible, sensor_locations
from probfem.geometry.hole import HoleParams
from probfem.geometry.triangulate import triangulate_beam
from probfem.mesh.mesh import Mesh, find_nodes

logger = logging.getLogger(__name__)

GROUND_TRUTH = {"x": 1.0, "y": 0.4, "d": 0.4, "alpha": float(np.pi / 6), "r": 0.25}


@dataclass
class ThreePointSettings:
    """Mesh size, material and specimen of the bending test."""
    h: float = 0.2
    beam: BeamGeometry = field(default_factory=BeamGeometry)
    material: MaterialParams2D = field(default_factory=MaterialParams2D)
    max_retries: int = 3

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if self.max_retries < 1:
            raise ValueError(f"max_retries must be positive, got {self.max_retries}")


def beam_boundary_conditions(mesh: Mesh, beam: BeamGeometry, w: float) -> BoundaryConditions2D:
    """Support bases fixed in x and y; vertical displacement -w at the load point."""
    base = np.unique(mesh.tagged_edges("support_base"))
    if base.size == 0:
        raise ValueError("mesh has no support_base edges")
    load = find_nodes(mesh, [beam.load_point])
    nodes = np.concatenate([base, base, load])
    components = np.concatenate([np.zeros(base.size, dtype=np.intp), np.ones(base.size, dtype=np.intp), [1]])
    values = np.concatenate([np.zeros(2 * base.size), [-w]])
    return BoundaryConditions2D(nodes=nodes, components=components, values=values)


class ThreePointProblem(ForwardProblem):
    """theta = (x, y, d, alpha, r) of the hole; material is known.

    Every theta gets its own mesh; the last one is kept so the current
    chain state is not re-meshed.
    """

    parameter_names = ("x", "y", "d", "alpha", "r")

    def __init__(self, settings: Optional[ThreePointSettings] = None):
        super().__init__()
        self.settings = settings or ThreePointSettings()
        self._last: Optional[Tuple[tuple, Mesh]] = None

    @property
    def beam(self) -> BeamGeometry:
        return self.settings.beam

    @property
    def h(self) -> float:
        return self.settings.h

    def admissible(self, theta) -> bool:
        try:
            return hole_admissible(HoleParams.from_vector(theta), self.beam)
        except ValueError:
            return False

    def mesh(self, theta) -> Mesh:
        key = tuple(float(v) for v in theta)
        if self._last is not None and self._last[0] == key:
            return self._last[1]
        mesh = triangulate_beam(self.beam, HoleParams.from_vector(key), self.h,
                                max_retries=self.settings.max_retries)
        self._last = (key, mesh)
        logger.debug(f"Meshed hole {key}: {mesh.n_elements} elements")
        return mesh

    def assemble(self, mesh: Mesh, theta) -> LinearSystem:
        material = self.settings.material
        return assemble_elasticity(mesh, material, beam_boundary_conditions(mesh, self.beam, material.w))

    @property
    def observation_points(self) -> np.ndarray:
        return sensor_locations(self.beam)

    @property
    def sensor_spacing(self) -> float:
        return self.beam.sensor_spacing

    def fixed_nodes(self, mesh: Mesh) -> np.ndarray:
        return find_nodes(mesh, np.vstack([self.observation_points, self.beam.load_point]))
