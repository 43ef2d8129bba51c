"""Planar geometry helpers used by the landscape and skyroad modules."""

from __future__ import annotations

import numpy as np


def rot90_ccw(v: np.ndarray) -> np.ndarray:
    """Rotate a 2-vector by +90 degrees about the +z axis."""
    return np.array([-v[1], v[0]], dtype=float)


def points_in_polygon(xs: np.ndarray, ys: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Even-odd ray-casting containment test for many points at once.

    Points exactly on an edge are resolved by the half-open crossing rule and
    may land on either side; callers that care keep polygon edges off the
    query lattice.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    inside = np.zeros(xs.shape, dtype=bool)
    n = len(polygon)
    for k in range(n):
        x1, y1 = polygon[k]
        x2, y2 = polygon[(k + 1) % n]
        crosses = (y1 > ys) != (y2 > ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_hit = (x2 - x1) * (ys - y1) / (y2 - y1) + x1
        inside ^= crosses & (xs < x_hit)
    return inside


def point_in_polygon(x: float, y: float, polygon: np.ndarray) -> bool:
    return bool(points_in_polygon(np.array([x]), np.array([y]), polygon)[0])


def _orient(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> bool:
    # collinear r assumed; true if r lies within the bounding box of pq
    return (
        min(p[0], q[0]) - 1e-12 <= r[0] <= max(p[0], q[0]) + 1e-12
        and min(p[1], q[1]) - 1e-12 <= r[1] <= max(p[1], q[1]) + 1e-12
    )


def segments_intersect(p1, q1, p2, q2) -> bool:
    """True if closed segments p1q1 and p2q2 share any point."""
    d1 = _orient(p2, q2, p1)
    d2 = _orient(p2, q2, q1)
    d3 = _orient(p1, q1, p2)
    d4 = _orient(p1, q1, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(p2, q2, p1):
        return True
    if d2 == 0 and _on_segment(p2, q2, q1):
        return True
    if d3 == 0 and _on_segment(p1, q1, p2):
        return True
    if d4 == 0 and _on_segment(p1, q1, q2):
        return True
    return False


def polygon_is_simple(polygon: np.ndarray) -> bool:
    """True for a non-self-intersecting polygon with no repeated vertices."""
    n = len(polygon)
    if n < 3:
        return False
    pts = np.asarray(polygon, dtype=float)
    for i in range(n):
        if np.allclose(pts[i], pts[(i + 1) % n]):
            return False
    for i in range(n):
        p1, q1 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            # adjacent edges share exactly one endpoint; skip them
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            p2, q2 = pts[j], pts[(j + 1) % n]
            if segments_intersect(p1, q1, p2, q2):
                return False
    return True


def polygon_area_centroid(polygon: np.ndarray) -> tuple[float, np.ndarray]:
    """Signed shoelace area and area centroid of a simple polygon."""
    pts = np.asarray(polygon, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    if abs(area) < 1e-12:
        raise ValueError("degenerate polygon: zero area")
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return area, np.array([cx, cy])


def polyline_arclength(points: np.ndarray) -> np.ndarray:
    """Cumulative arc length at each vertex, starting at 0."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return np.zeros(len(pts))
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(steps)])


def point_along_polyline(points: np.ndarray, cumlen: np.ndarray, s: float) -> np.ndarray:
    """Point at arc length s along the polyline (clamped to its ends)."""
    s = min(max(s, 0.0), cumlen[-1])
    i = int(np.searchsorted(cumlen, s, side="right")) - 1
    i = min(max(i, 0), len(points) - 2)
    span = cumlen[i + 1] - cumlen[i]
    t = 0.0 if span == 0 else (s - cumlen[i]) / span
    return points[i] * (1 - t) + points[i + 1] * t


def _points_to_segments_dist(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> float:
    """Min distance from any point to any segment (a[k], b[k])."""
    d = seg_b - seg_a  # (m, 2)
    len2 = (d * d).sum(axis=1)
    len2 = np.where(len2 == 0, 1.0, len2)
    rel = points[:, None, :] - seg_a[None, :, :]  # (n, m, 2)
    t = np.clip((rel * d[None, :, :]).sum(axis=2) / len2[None, :], 0.0, 1.0)
    proj = seg_a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(points[:, None, :] - proj, axis=2)
    return float(dist.min())


def min_polyline_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum distance between two polylines (vertex-to-segment, both ways)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        return float("inf")
    if len(a) == 1 and len(b) == 1:
        return float(np.linalg.norm(a[0] - b[0]))
    best = float("inf")
    if len(b) >= 2:
        best = min(best, _points_to_segments_dist(a, b[:-1], b[1:]))
    if len(a) >= 2:
        best = min(best, _points_to_segments_dist(b, a[:-1], a[1:]))
    return best
