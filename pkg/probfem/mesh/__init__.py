"""Simplicial meshes: construction, refinement, perturbation and file formats."""
from probfem.mesh.mesh import (
    Mesh,
    boundary_edges_from_elements,
    find_nodes,
    generate_interval_mesh,
    validate_mesh,
)
from probfem.mesh.refinement import RefinementMap, refine_hierarchical
from probfem.mesh.perturbation import MeshPerturber, perturb_mesh, sample_uniform_ball
from probfem.mesh.io import read_gmsh, read_mesh, write_mesh

__all__ = [
    "Mesh",
    "MeshPerturber",
    "RefinementMap",
    "boundary_edges_from_elements",
    "find_nodes",
    "generate_interval_mesh",
    "perturb_mesh",
    "read_gmsh",
    "read_mesh",
    "refine_hierarchical",
    "sample_uniform_ball",
    "validate_mesh",
    "write_mesh",
]
