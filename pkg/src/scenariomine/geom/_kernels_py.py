"""Pure-numpy implementations of the geometry kernels.

Used when the compiled extension is unavailable (or forced via
SCENARIOMINE_PURE_KERNELS=1). Semantics match ``_kernels.pyx`` exactly:
the two backends run the same arithmetic in the same order so results are
bit-identical.
"""

import numpy as np

BOUNDARY_EPS = 1e-9


def points_in_polygon(points, polygon):
    """Even-odd ray cast. Boundary points are NOT handled reliably here;
    callers wanting closed semantics use points_to_polygon_distance == 0."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    poly = np.ascontiguousarray(polygon, dtype=np.float64)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    xi = poly[:, 0][None, :]
    yi = poly[:, 1][None, :]
    xj = np.roll(poly[:, 0], 1)[None, :]
    yj = np.roll(poly[:, 1], 1)[None, :]
    straddles = (yi > y) != (yj > y)
    denom = yj - yi
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = (xj - xi) * (y - yi) / denom + xi
    hits = straddles & (x < x_cross)
    return (hits.sum(axis=1) % 2).astype(np.uint8)


def _segment_sq_distances(pts, verts_a, verts_b):
    # pts (N,2) against segments a->b (M,2); returns (N,M) squared distances
    d = verts_b - verts_a  # (M,2)
    dd = (d * d).sum(axis=1)  # (M,)
    ap = pts[:, None, :] - verts_a[None, :, :]  # (N,M,2)
    t = (ap * d[None, :, :]).sum(axis=2)
    safe = dd > 0.0
    t = np.where(safe[None, :], t / np.where(safe, dd, 1.0)[None, :], 0.0)
    t = np.clip(t, 0.0, 1.0)
    q = verts_a[None, :, :] + t[:, :, None] * d[None, :, :]
    diff = pts[:, None, :] - q
    return (diff * diff).sum(axis=2)


def points_to_polyline_distance(points, polyline):
    """Min Euclidean distance from each point to an open polyline."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    line = np.ascontiguousarray(polyline, dtype=np.float64)
    if len(line) == 1:
        diff = pts - line[0]
        return np.sqrt((diff * diff).sum(axis=1))
    sq = _segment_sq_distances(pts, line[:-1], line[1:])
    return np.sqrt(sq.min(axis=1))


def points_to_polygon_distance(points, polygon):
    """0.0 for points inside or within BOUNDARY_EPS of the closed boundary,
    else the Euclidean distance to the boundary."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    poly = np.ascontiguousarray(polygon, dtype=np.float64)
    closed_a = poly
    closed_b = np.roll(poly, -1, axis=0)
    sq = _segment_sq_distances(pts, closed_a, closed_b)
    dist = np.sqrt(sq.min(axis=1))
    inside = points_in_polygon(pts, poly).astype(bool)
    dist[inside | (dist <= BOUNDARY_EPS)] = 0.0
    return dist


def _clip_convex(subject, edge_a, edge_b):
    # Sutherland-Hodgman single-edge clip, CCW clip polygon (inside = left).
    out = []
    n = len(subject)
    ex = edge_b[0] - edge_a[0]
    ey = edge_b[1] - edge_a[1]
    for i in range(n):
        cur = subject[i]
        prv = subject[i - 1]
        cur_in = ex * (cur[1] - edge_a[1]) - ey * (cur[0] - edge_a[0]) >= 0.0
        prv_in = ex * (prv[1] - edge_a[1]) - ey * (prv[0] - edge_a[0]) >= 0.0
        if cur_in != prv_in:
            dx = cur[0] - prv[0]
            dy = cur[1] - prv[1]
            denom = ex * dy - ey * dx
            if denom != 0.0:
                t = (ex * (edge_a[1] - prv[1]) - ey * (edge_a[0] - prv[0])) / denom
                out.append((prv[0] + t * dx, prv[1] + t * dy))
        if cur_in:
            out.append((cur[0], cur[1]))
    return out


def _shoelace(poly):
    area = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i - 1]
        x1, y1 = poly[i]
        area += x0 * y1 - x1 * y0
    return 0.5 * abs(area)


def _rect_corners(cx, cy, length, width, yaw):
    c = np.cos(yaw)
    s = np.sin(yaw)
    hl = 0.5 * length
    hw = 0.5 * width
    return [
        (cx + c * hl - s * hw, cy + s * hl + c * hw),
        (cx - c * hl - s * hw, cy - s * hl + c * hw),
        (cx - c * hl + s * hw, cy - s * hl - c * hw),
        (cx + c * hl + s * hw, cy + s * hl - c * hw),
    ]


def rect_intersection_area(rects_a, rects_b):
    """Intersection area of oriented rectangle pairs.

    Each row is (cx, cy, length, width, yaw); rows of ``rects_a`` pair with
    the same rows of ``rects_b``.
    """
    a = np.ascontiguousarray(rects_a, dtype=np.float64)
    b = np.ascontiguousarray(rects_b, dtype=np.float64)
    n = len(a)
    out = np.zeros(n, dtype=np.float64)
    for i in range(n):
        subject = _rect_corners(*a[i])
        clip = _rect_corners(*b[i])
        # corners above are CCW for yaw-rotated rectangles
        poly = subject
        for k in range(4):
            poly = _clip_convex(poly, clip[k - 1], clip[k])
            if not poly:
                break
        out[i] = _shoelace(poly) if len(poly) >= 3 else 0.0
    return out
