"""Numerical laboratory for non-compact surfaces of revolution.

Geodesics, distances, cut loci, comparison triangles, rays, and Busemann
functions on metrics ds^2 = dt^2 + f(t)^2 dtheta^2 with monotone radial
curvature.
"""

from .asymptotics import (
    asymptotic_direction,
    busemann_field,
    busemann_value,
    find_R_delta,
    gradient_alignment_check,
    is_ray,
    main_theorem_suite,
    ray_mass,
)
from .comparison import build_comparison_triangle, gtct_check
from .cutlocus import cut_locus, first_conjugate_through_pole, verify_cut_point
from .geodesic import PolarPoint, angle_at, distance, exp_map, integrate
from .oracle import build_mesh, dijkstra_distance, refine_mesh
from .profile import (
    builtin_model,
    check_von_mangoldt,
    eval_curvature,
    list_builtin_models,
    load_model,
    total_curvature,
)

__version__ = "0.1.0"
