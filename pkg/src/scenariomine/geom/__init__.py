"""Geometry kernel backend selection.

The compiled Cython extension is preferred; the pure-numpy fallback is used
when the extension is missing or SCENARIOMINE_PURE_KERNELS=1 is set. Both
expose the same functions with identical semantics.
"""

import os

if os.environ.get("SCENARIOMINE_PURE_KERNELS"):
    from scenariomine.geom import _kernels_py as kernels

    COMPILED = False
else:
    try:
        from scenariomine.geom import _kernels as kernels  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from scenariomine.geom import _kernels_py as kernels  # type: ignore[no-redef]

        COMPILED = False


def backend_name() -> str:
    return "compiled" if COMPILED else "pure-python"


points_in_polygon = kernels.points_in_polygon
points_to_polyline_distance = kernels.points_to_polyline_distance
points_to_polygon_distance = kernels.points_to_polygon_distance
rect_intersection_area = kernels.rect_intersection_area
BOUNDARY_EPS = kernels.BOUNDARY_EPS
