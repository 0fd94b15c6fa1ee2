"""2-D vector arithmetic and the polyline queries shared by all models."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence


class Vec2(NamedTuple):
    """Plain 2-D vector (meters or meters per second)."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Vec2":  # type: ignore[override]
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> "Vec2":
        return Vec2(self.x / k, self.y / k)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        """z-component of the 3-D cross product."""
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Vec2":
        """Unit vector; the zero vector maps to itself."""
        n = math.hypot(self.x, self.y)
        if n == 0.0:
            return ZERO
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Counter-clockwise rotation by 90 degrees."""
        return Vec2(-self.y, self.x)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


ZERO = Vec2(0.0, 0.0)
UNIT_X = Vec2(1.0, 0.0)


def distance(a: Vec2, b: Vec2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def nearest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2:
    ab = b - a
    denom = ab.dot(ab)
    if denom == 0.0:
        return a
    t = (p - a).dot(ab) / denom
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    if ab.cross(p - a) == 0.0:
        return p  # already on the segment; skip the rounding of a + t*ab
    return Vec2(a.x + ab.x * t, a.y + ab.y * t)


def nearest_point_on_polyline(p: Vec2, vertices: Sequence[Vec2]) -> Vec2:
    """Closest point of the polyline to ``p``.

    Ties between segments go to the lowest segment index.
    """
    best = vertices[0]
    best_d = math.inf
    for a, b in zip(vertices, vertices[1:]):
        q = nearest_point_on_segment(p, a, b)
        d = distance(p, q)
        if d < best_d:
            best, best_d = q, d
    return best


def _orient(a: Vec2, b: Vec2, c: Vec2) -> float:
    return (b - a).cross(c - a)


def _on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool:
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)
            and min(a.y, b.y) <= p.y <= max(a.y, b.y))


def segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    """Closed segment intersection test (touching counts)."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def segment_crosses_open_box(a: Vec2, b: Vec2, xmin: float, ymin: float,
                             xmax: float, ymax: float) -> bool:
    """True if segment ``ab`` passes through the open interior of the box.

    A segment running along an edge or touching a corner does not count.
    """
    # Liang-Barsky clip against the closed box, then test the chord midpoint.
    t0, t1 = 0.0, 1.0
    dx, dy = b.x - a.x, b.y - a.y
    for p, q in ((-dx, a.x - xmin), (dx, xmax - a.x),
                 (-dy, a.y - ymin), (dy, ymax - a.y)):
        if p == 0.0:
            if q < 0.0:
                return False
            continue
        r = q / p
        if p < 0.0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return False
    tm = 0.5 * (t0 + t1)
    mx, my = a.x + dx * tm, a.y + dy * tm
    return xmin < mx < xmax and ymin < my < ymax
