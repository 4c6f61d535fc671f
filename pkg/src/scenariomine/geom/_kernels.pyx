# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels (hot inner loops).

Must stay semantically identical to ``_kernels_py`` — same arithmetic in the
same order — so the two backends are interchangeable bit-for-bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin, sqrt

cnp.import_array()

BOUNDARY_EPS = 1e-9

cdef double _EPS = 1e-9


def points_in_polygon(points, polygon):
    """Even-odd ray cast. Boundary points are NOT handled reliably here;
    callers wanting closed semantics use points_to_polygon_distance == 0."""
    cdef const cnp.float64_t[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const cnp.float64_t[:, ::1] poly = np.ascontiguousarray(polygon, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t m = poly.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t i, j, k
    cdef double x, y, xi, yi, xj, yj, x_cross
    cdef bint inside
    for k in range(n):
        x = pts[k, 0]
        y = pts[k, 1]
        inside = 0
        j = m - 1
        for i in range(m):
            xi = poly[i, 0]
            yi = poly[i, 1]
            xj = poly[j, 0]
            yj = poly[j, 1]
            if (yi > y) != (yj > y):
                x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
                if x < x_cross:
                    inside = not inside
            j = i
        out[k] = inside
    return out


cdef double _min_sq_dist_to_segments(double px, double py,
                                     const cnp.float64_t[:, :] va,
                                     const cnp.float64_t[:, :] vb,
                                     Py_ssize_t m) noexcept:
    cdef double best = 1e300
    cdef Py_ssize_t i
    cdef double ax, ay, dx, dy, dd, t, qx, qy, ddx, ddy, sq
    for i in range(m):
        ax = va[i, 0]
        ay = va[i, 1]
        dx = vb[i, 0] - ax
        dy = vb[i, 1] - ay
        dd = dx * dx + dy * dy
        if dd > 0.0:
            t = ((px - ax) * dx + (py - ay) * dy) / dd
        else:
            t = 0.0
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx = ax + t * dx
        qy = ay + t * dy
        ddx = px - qx
        ddy = py - qy
        sq = ddx * ddx + ddy * ddy
        if sq < best:
            best = sq
    return best


def points_to_polyline_distance(points, polyline):
    """Min Euclidean distance from each point to an open polyline."""
    cdef const cnp.float64_t[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const cnp.float64_t[:, ::1] line = np.ascontiguousarray(polyline, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t m = line.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k
    cdef double dx, dy
    if m == 1:
        for k in range(n):
            dx = pts[k, 0] - line[0, 0]
            dy = pts[k, 1] - line[0, 1]
            out[k] = sqrt(dx * dx + dy * dy)
        return out
    cdef const cnp.float64_t[:, :] va = line[:m - 1]
    cdef const cnp.float64_t[:, :] vb = line[1:]
    for k in range(n):
        out[k] = sqrt(_min_sq_dist_to_segments(pts[k, 0], pts[k, 1], va, vb, m - 1))
    return out


def points_to_polygon_distance(points, polygon):
    """0.0 for points inside or within BOUNDARY_EPS of the closed boundary,
    else the Euclidean distance to the boundary."""
    cdef const cnp.float64_t[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef const cnp.float64_t[:, ::1] poly = np.ascontiguousarray(polygon, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] closed_b = np.roll(np.asarray(polygon, dtype=np.float64), -1, axis=0)
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t m = poly.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] inside = points_in_polygon(points, polygon)
    cdef const cnp.float64_t[:, :] va = poly
    cdef const cnp.float64_t[:, :] vb = closed_b
    cdef Py_ssize_t k
    cdef double d
    for k in range(n):
        d = sqrt(_min_sq_dist_to_segments(pts[k, 0], pts[k, 1], va, vb, m))
        if inside[k] or d <= _EPS:
            d = 0.0
        out[k] = d
    return out


cdef Py_ssize_t _clip_edge(double* sx, double* sy, Py_ssize_t n,
                           double ax, double ay, double bx, double by,
                           double* ox, double* oy) noexcept:
    # clip subject polygon (sx, sy) by one CCW clip edge a->b, inside = left
    cdef double ex = bx - ax
    cdef double ey = by - ay
    cdef Py_ssize_t i, cnt = 0
    cdef double cx, cy, px, py, dx, dy, denom, t
    cdef bint cur_in, prv_in
    for i in range(n):
        cx = sx[i]
        cy = sy[i]
        px = sx[i - 1] if i > 0 else sx[n - 1]
        py = sy[i - 1] if i > 0 else sy[n - 1]
        cur_in = ex * (cy - ay) - ey * (cx - ax) >= 0.0
        prv_in = ex * (py - ay) - ey * (px - ax) >= 0.0
        if cur_in != prv_in:
            dx = cx - px
            dy = cy - py
            denom = ex * dy - ey * dx
            if denom != 0.0:
                t = (ex * (ay - py) - ey * (ax - px)) / denom
                ox[cnt] = px + t * dx
                oy[cnt] = py + t * dy
                cnt += 1
        if cur_in:
            ox[cnt] = cx
            oy[cnt] = cy
            cnt += 1
    return cnt


def rect_intersection_area(rects_a, rects_b):
    """Intersection area of oriented rectangle pairs.

    Each row is (cx, cy, length, width, yaw); rows of ``rects_a`` pair with
    the same rows of ``rects_b``.
    """
    cdef const cnp.float64_t[:, ::1] a = np.ascontiguousarray(rects_a, dtype=np.float64)
    cdef const cnp.float64_t[:, ::1] b = np.ascontiguousarray(rects_b, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    # Sutherland-Hodgman on two quads caps the vertex count at 16
    cdef double sx[32]
    cdef double sy[32]
    cdef double tx[32]
    cdef double ty[32]
    cdef double cxs[4]
    cdef double cys[4]
    cdef Py_ssize_t i, k, cnt, j
    cdef double c, s, hl, hw, area, x0, y0, x1, y1
    cdef double ax, ay, bx, by
    for i in range(n):
        # subject = rect a corners (CCW)
        c = cos(a[i, 4])
        s = sin(a[i, 4])
        hl = 0.5 * a[i, 2]
        hw = 0.5 * a[i, 3]
        sx[0] = a[i, 0] + c * hl - s * hw
        sy[0] = a[i, 1] + s * hl + c * hw
        sx[1] = a[i, 0] - c * hl - s * hw
        sy[1] = a[i, 1] - s * hl + c * hw
        sx[2] = a[i, 0] - c * hl + s * hw
        sy[2] = a[i, 1] - s * hl - c * hw
        sx[3] = a[i, 0] + c * hl + s * hw
        sy[3] = a[i, 1] + s * hl - c * hw
        cnt = 4
        # clip polygon = rect b corners (CCW)
        c = cos(b[i, 4])
        s = sin(b[i, 4])
        hl = 0.5 * b[i, 2]
        hw = 0.5 * b[i, 3]
        cxs[0] = b[i, 0] + c * hl - s * hw
        cys[0] = b[i, 1] + s * hl + c * hw
        cxs[1] = b[i, 0] - c * hl - s * hw
        cys[1] = b[i, 1] - s * hl + c * hw
        cxs[2] = b[i, 0] - c * hl + s * hw
        cys[2] = b[i, 1] - s * hl - c * hw
        cxs[3] = b[i, 0] + c * hl + s * hw
        cys[3] = b[i, 1] + s * hl - c * hw
        for k in range(4):
            ax = cxs[k - 1] if k > 0 else cxs[3]
            ay = cys[k - 1] if k > 0 else cys[3]
            bx = cxs[k]
            by = cys[k]
            cnt = _clip_edge(sx, sy, cnt, ax, ay, bx, by, tx, ty)
            for j in range(cnt):
                sx[j] = tx[j]
                sy[j] = ty[j]
            if cnt == 0:
                break
        if cnt >= 3:
            area = 0.0
            for j in range(cnt):
                x0 = sx[j - 1] if j > 0 else sx[cnt - 1]
                y0 = sy[j - 1] if j > 0 else sy[cnt - 1]
                x1 = sx[j]
                y1 = sy[j]
                area += x0 * y1 - x1 * y0
            out[i] = 0.5 * fabs(area)
    return out
