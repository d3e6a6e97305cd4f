"""Projective geometry primitives: points, segments, lines, homographies.

Points carry a homogeneous coordinate so vanishing points at infinity are
first-class values.  Homographies are 3x3 invertible matrices acting on
homogeneous coordinates; composition and inversion are exact matrix
operations, normalisation happens only when a point is read back out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import DegenerateGeometryError

# Relative weight below which a homogeneous w is treated as zero (ideal point).
_IDEAL_EPS = 1e-12

Provenance = Literal["ground_truth", "line_detection", "quad", "identity"]


@dataclass(frozen=True)
class Point:
    """A 2D point in homogeneous form (x, y, w); w == 0 means ideal."""

    x: float
    y: float
    w: float = 1.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.w)):
            raise ValueError("point coordinates must be finite")
        if self.x == 0.0 and self.y == 0.0 and self.w == 0.0:
            raise ValueError("homogeneous point must be nonzero")

    @classmethod
    def at(cls, x: float, y: float) -> "Point":
        return cls(float(x), float(y), 1.0)

    @classmethod
    def ideal(cls, dx: float, dy: float) -> "Point":
        n = math.hypot(dx, dy)
        if n == 0.0:
            raise ValueError("ideal point needs a nonzero direction")
        return cls(dx / n, dy / n, 0.0)

    @property
    def is_ideal(self) -> bool:
        return abs(self.w) <= _IDEAL_EPS * max(abs(self.x), abs(self.y))

    @property
    def xy(self) -> tuple[float, float]:
        if self.is_ideal:
            raise DegenerateGeometryError("ideal point has no affine coordinates")
        return (self.x / self.w, self.y / self.w)

    def direction_from(self, origin: tuple[float, float]) -> tuple[float, float]:
        """Unit direction from ``origin`` toward this point (its own direction if ideal)."""
        if self.is_ideal:
            dx, dy = self.x, self.y
        else:
            px, py = self.xy
            dx, dy = px - origin[0], py - origin[1]
        n = math.hypot(dx, dy)
        if n == 0.0:
            raise DegenerateGeometryError("point coincides with origin")
        return (dx / n, dy / n)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.w], dtype=float)

    @classmethod
    def from_array(cls, v: np.ndarray) -> "Point":
        """Build a point from a homogeneous 3-vector, normalising its scale."""
        x, y, w = (float(c) for c in v)
        scale = max(abs(x), abs(y), abs(w))
        if scale == 0.0:
            raise DegenerateGeometryError("zero homogeneous vector")
        x, y, w = x / scale, y / scale, w / scale
        if abs(w) > _IDEAL_EPS:
            return cls(x / w, y / w, 1.0)
        n = math.hypot(x, y)
        return cls(x / n, y / n, 0.0)


@dataclass(frozen=True)
class Line:
    """A line as a homogeneous 3-vector (a, b, c): ax + by + c = 0."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if self.a == 0.0 and self.b == 0.0 and self.c == 0.0:
            raise ValueError("line vector must be nonzero")

    @classmethod
    def from_points(cls, p: Point, q: Point) -> "Line":
        v = np.cross(p.to_array(), q.to_array())
        if not np.any(v):
            raise DegenerateGeometryError("coincident points define no line")
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def from_point_direction(cls, x: float, y: float, dx: float, dy: float) -> "Line":
        return cls.from_points(Point.at(x, y), Point.at(x + dx, y + dy))

    def intersection(self, other: "Line") -> Point:
        v = np.cross(self.to_array(), other.to_array())
        if not np.any(v):
            raise DegenerateGeometryError("lines are identical")
        return Point.from_array(v)

    def distance_to(self, x: float, y: float) -> float:
        n = math.hypot(self.a, self.b)
        if n == 0.0:
            raise DegenerateGeometryError("line at infinity has no pixel distance")
        return abs(self.a * x + self.b * y + self.c) / n

    @property
    def direction(self) -> tuple[float, float]:
        """Unit direction along the line, oriented deterministically."""
        dx, dy = -self.b, self.a
        n = math.hypot(dx, dy)
        if n == 0.0:
            raise DegenerateGeometryError("line at infinity has no direction")
        dx, dy = dx / n, dy / n
        # Fix the sign so callers get a reproducible orientation.
        if dx < 0 or (dx == 0 and dy < 0):
            dx, dy = -dx, -dy
        return (dx, dy)

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=float)


@dataclass(frozen=True)
class LineSegment:
    """A finite segment between two pixel points."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        if self.length == 0.0:
            raise ValueError("segment endpoints must differ")

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)

    @property
    def midpoint(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    @property
    def direction(self) -> tuple[float, float]:
        n = self.length
        return ((self.x2 - self.x1) / n, (self.y2 - self.y1) / n)

    def supporting_line(self) -> Line:
        return Line.from_points(Point.at(self.x1, self.y1), Point.at(self.x2, self.y2))

    def angle_deg(self) -> float:
        """Undirected angle to the +x axis in [0, 180)."""
        ang = math.degrees(math.atan2(self.y2 - self.y1, self.x2 - self.x1))
        return ang % 180.0


@dataclass(frozen=True)
class Homography:
    """An invertible 3x3 projective transform with provenance."""

    matrix: np.ndarray
    provenance: Provenance = "identity"

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"homography matrix must be 3x3, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("homography matrix must be finite")
        scale = np.abs(m).max()
        if scale == 0.0 or abs(np.linalg.det(m / scale)) <= 1e-9:
            raise DegenerateGeometryError("homography matrix is singular")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3), provenance="identity")

    @classmethod
    def translation(cls, tx: float, ty: float, provenance: Provenance = "identity") -> "Homography":
        m = np.eye(3)
        m[0, 2], m[1, 2] = tx, ty
        return cls(m, provenance=provenance)

    @classmethod
    def similarity(
        cls,
        scale: float = 1.0,
        angle_deg: float = 0.0,
        tx: float = 0.0,
        ty: float = 0.0,
        provenance: Provenance = "identity",
    ) -> "Homography":
        t = math.radians(angle_deg)
        c, s = scale * math.cos(t), scale * math.sin(t)
        m = np.array([[c, -s, tx], [s, c, ty], [0.0, 0.0, 1.0]])
        return cls(m, provenance=provenance)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix), provenance=self.provenance)

    def compose(self, other: "Homography") -> "Homography":
        """The homography applying ``other`` first, then ``self``."""
        prov = self.provenance if self.provenance != "identity" else other.provenance
        return Homography(self.matrix @ other.matrix, provenance=prov)

    def __matmul__(self, other: "Homography") -> "Homography":
        return self.compose(other)


def apply_homography(h: Homography, p: Point) -> Point:
    """Apply ``h`` to a point, yielding a normalised (finite or ideal) point."""
    return Point.from_array(h.matrix @ p.to_array())


def transform_points(h: Homography, pts: np.ndarray) -> np.ndarray:
    """Apply ``h`` to an (N, 2) array of finite points; result must be finite.

    Raises
    ------
    DegenerateGeometryError
        If any input point maps to (or numerically at) the line at infinity.
    """
    pts = np.asarray(pts, dtype=float)
    ones = np.ones((pts.shape[0], 1))
    hom = np.hstack([pts, ones]) @ h.matrix.T
    w = hom[:, 2]
    scale = np.abs(hom).max(axis=1)
    if np.any(np.abs(w) <= _IDEAL_EPS * scale):
        raise DegenerateGeometryError("a point mapped to infinity")
    return hom[:, :2] / w[:, None]


def transform_box_hull(h: Homography, box: Sequence[float]) -> tuple[float, float, float, float]:
    """Map a box's corners through ``h`` and return their axis-aligned hull."""
    x0, y0, x1, y1 = box
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
    mapped = transform_points(h, corners)
    return (
        float(mapped[:, 0].min()),
        float(mapped[:, 1].min()),
        float(mapped[:, 0].max()),
        float(mapped[:, 1].max()),
    )


def _has_collinear_triple(pts: np.ndarray, rel_tol: float = 1e-9) -> bool:
    scale = max(float(np.ptp(pts[:, 0])), float(np.ptp(pts[:, 1])), 1.0)
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                u = pts[j] - pts[i]
                v = pts[k] - pts[i]
                if abs(u[0] * v[1] - u[1] * v[0]) <= rel_tol * scale * scale:
                    return True
    return False


def homography_from_correspondences(
    src: Iterable[tuple[float, float]],
    dst: Iterable[tuple[float, float]],
    provenance: Provenance = "quad",
) -> Homography:
    """Solve the homography mapping four source points onto four targets.

    Uses the standard 8-equation linear system with h33 fixed to 1.  No three
    source or target points may be collinear.
    """
    s = np.asarray(list(src), dtype=float)
    d = np.asarray(list(dst), dtype=float)
    if s.shape != (4, 2) or d.shape != (4, 2):
        raise ValueError("exactly four 2D correspondences required")
    if _has_collinear_triple(s) or _has_collinear_triple(d):
        raise DegenerateGeometryError("three correspondence points are collinear")
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        x, y = s[i]
        u, v = d[i]
        a[2 * i] = [x, y, 1, 0, 0, 0, -x * u, -y * u]
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -x * v, -y * v]
        b[2 * i] = u
        b[2 * i + 1] = v
    try:
        coeffs = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateGeometryError(f"correspondence system is singular: {exc}") from exc
    m = np.append(coeffs, 1.0).reshape(3, 3)
    return Homography(m, provenance=provenance)
