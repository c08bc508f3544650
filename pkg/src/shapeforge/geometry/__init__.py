"""Geometry kernel: meshes, primitives, sweeps, booleans, arrays, execution."""

from .arrays import array_1d, array_2d
from .bridge import bridge_loops, resample_loop
from .csg import boolean, boolean_many
from .curves import (
    CONSTANT_PROFILE,
    FrameField,
    ScaleProfile,
    eval_section,
    eval_trajectory,
    frames_at_fractions,
)
from .execute import execute_op, execute_program
from .fill import fill_grid
from .io import load_mesh, load_obj, load_ply, save_mesh, save_obj, save_ply_mesh, save_ply_points
from .mesh import (
    Mesh,
    edge_manifold,
    empty_mesh,
    ensure_outward,
    flip_winding,
    has_duplicate_vertices,
    make_mesh,
    merge_meshes,
    mesh_bbox,
    mesh_surface_area,
    mesh_volume,
    signed_volume,
    transform_mesh,
    triangle_areas,
    weld_vertices,
)
from .primitives import make_primitive
from .sweep import revolve, sweep

__all__ = [
    "CONSTANT_PROFILE",
    "FrameField",
    "Mesh",
    "ScaleProfile",
    "array_1d",
    "array_2d",
    "boolean",
    "boolean_many",
    "bridge_loops",
    "edge_manifold",
    "empty_mesh",
    "ensure_outward",
    "eval_section",
    "eval_trajectory",
    "execute_op",
    "execute_program",
    "fill_grid",
    "flip_winding",
    "frames_at_fractions",
    "has_duplicate_vertices",
    "load_mesh",
    "load_obj",
    "load_ply",
    "make_mesh",
    "make_primitive",
    "merge_meshes",
    "mesh_bbox",
    "mesh_surface_area",
    "mesh_volume",
    "resample_loop",
    "revolve",
    "save_mesh",
    "save_obj",
    "save_ply_mesh",
    "save_ply_points",
    "signed_volume",
    "sweep",
    "transform_mesh",
    "triangle_areas",
    "weld_vertices",
]
