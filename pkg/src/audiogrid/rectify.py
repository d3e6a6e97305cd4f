"""Perspective rectification of distorted chart images.

Two routes produce a rectifying homography:

* line detection: binarise, extract Hough segments, fit two vanishing
  points by RANSAC (votes weighted by segment length), then build the
  transform sending both vanishing points back to infinity;
* quadrilateral: approximate a chart-region polygon by four lines (robust
  to rounded corners), intersect them into four corners and map those onto
  a square.

Both are wrapped as sklearn-style transformers (`fit` estimates the
homography, `transform` warps an image) so they compose with pipelines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import cv2
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import (
    DegenerateGeometryError,
    InsufficientDataError,
    QuadApproximationError,
    RectificationError,
)
from .geometry import Homography, LineSegment, Point, transform_points
from .hough import HoughParams, hough_segments
from .imaging import binarize
from .validation import check_gray_image, check_points

VOTE_ANGLE_DEG = 5.0
MIN_VP_SEPARATION_DEG = 15.0


# -- vanishing points ---------------------------------------------------------

@dataclass(frozen=True)
class VanishingPointModel:
    """A vanishing point with the segments that voted for it.

    ``total_vote`` is the sum of inlier segment lengths; ``low_support``
    flags models backed by fewer than 3 segments.
    """

    vp: Point
    inlier_indices: tuple[int, ...]
    total_vote: float
    low_support: bool


def vote(segment: LineSegment, vp: Point, angle_deg: float = VOTE_ANGLE_DEG) -> float:
    """Length of ``segment`` if it points at ``vp`` to within ``angle_deg``.

    The angle is measured between the segment and the line joining the
    vanishing point to the segment midpoint (the ideal point's own direction
    when the vanishing point is at infinity).  A vanishing point coinciding
    with the midpoint cannot vote.
    """
    mx, my = segment.midpoint
    if vp.is_ideal:
        dvx, dvy = vp.x, vp.y
    else:
        px, py = vp.xy
        dvx, dvy = px - mx, py - my
    norm = math.hypot(dvx, dvy)
    if norm < 1e-12:
        return 0.0
    dx, dy = segment.direction
    cosang = abs(dx * dvx + dy * dvy) / norm
    if cosang > math.cos(math.radians(angle_deg)):
        return segment.length
    return 0.0


def _segment_arrays(segments: list[LineSegment]):
    mids = np.array([s.midpoint for s in segments])
    dirs = np.array([s.direction for s in segments])
    lengths = np.array([s.length for s in segments])
    return mids, dirs, lengths


def _votes(vp: Point, mids, dirs, lengths, cos_thresh: float) -> np.ndarray:
    if vp.is_ideal:
        dv = np.tile(np.array([vp.x, vp.y]), (len(mids), 1))
    else:
        dv = np.asarray(vp.xy) - mids
    norms = np.linalg.norm(dv, axis=1)
    ok = norms > 1e-12
    cosang = np.zeros(len(mids))
    cosang[ok] = np.abs(np.einsum("ij,ij->i", dirs[ok], dv[ok])) / norms[ok]
    return np.where(cosang > cos_thresh, lengths, 0.0)


def _refit_vp(segments: list[LineSegment], weights: np.ndarray) -> Point:
    """Least-squares vanishing point of weighted segment supporting lines.

    Minimises the algebraic residual over Hartley-normalised coordinates,
    which gracefully returns an ideal point for a parallel pencil.
    """
    pts = np.array([[s.x1, s.y1, s.x2, s.y2] for s in segments])
    all_xy = np.vstack([pts[:, :2], pts[:, 2:]])
    mean = all_xy.mean(axis=0)
    scale = max(float(np.abs(all_xy - mean).mean()), 1e-9)
    p1 = (pts[:, :2] - mean) / scale
    p2 = (pts[:, 2:] - mean) / scale
    h1 = np.hstack([p1, np.ones((len(p1), 1))])
    h2 = np.hstack([p2, np.ones((len(p2), 1))])
    lines = np.cross(h1, h2)
    norms = np.linalg.norm(lines[:, :2], axis=1, keepdims=True)
    lines = lines / np.maximum(norms, 1e-12)
    a = lines * np.sqrt(weights)[:, None]
    _, _, vt = np.linalg.svd(a, full_matrices=False)
    x, y, w = vt[-1]
    return Point.from_array(np.array([scale * x + mean[0] * w, scale * y + mean[1] * w, w]))


def ransac_vanishing_point(
    segments: list[LineSegment],
    iterations: int = 500,
    seed: int = 0,
    angle_deg: float = VOTE_ANGLE_DEG,
    exclusion_center: tuple[float, float] | None = None,
    exclusion_radius: float = 0.0,
) -> VanishingPointModel:
    """Fit one vanishing point: sample segment pairs, keep the best voted.

    Model proposals are the intersections of the two sampled segments'
    supporting lines (an ideal point for parallel pairs).  The best model is
    refined by a weighted least-squares fit over its inliers when that does
    not lose votes.  Deterministic given ``seed``.

    An optional exclusion disc rejects proposals too close to the image
    center: for a plane photographed at a bounded camera angle, vanishing
    points cannot fall near the principal point, so in-chart pencils (e.g.
    the data polyline meeting gridlines) are invalid models.
    """
    n = len(segments)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 segments, got {n}")
    mids, dirs, lengths = _segment_arrays(segments)
    lines = np.array([s.supporting_line().to_array() for s in segments])
    cos_thresh = math.cos(math.radians(angle_deg))
    rng = np.random.default_rng(seed)

    def excluded(vp: Point) -> bool:
        if exclusion_center is None or exclusion_radius <= 0 or vp.is_ideal:
            return False
        x, y = vp.xy
        return math.hypot(x - exclusion_center[0], y - exclusion_center[1]) < exclusion_radius

    best_vp: Point | None = None
    best_total = -1.0
    for _ in range(iterations):
        i, j = rng.choice(n, size=2, replace=False)
        v = np.cross(lines[i], lines[j])
        if not np.any(v):
            continue
        vp = Point.from_array(v)
        if excluded(vp):
            continue
        total = float(_votes(vp, mids, dirs, lengths, cos_thresh).sum())
        if total > best_total:
            best_total = total
            best_vp = vp
    if best_vp is None:
        raise InsufficientDataError("all sampled segment pairs were degenerate")

    def coherence_of(vp: Point, votes: np.ndarray) -> float:
        idx = np.nonzero(votes > 0)[0]
        if len(idx) == 0:
            return math.inf
        if vp.is_ideal:
            dv = np.tile(np.array([vp.x, vp.y]), (len(idx), 1))
        else:
            dv = np.asarray(vp.xy) - mids[idx]
        norms = np.linalg.norm(dv, axis=1)
        cosang = np.minimum(
            np.abs(np.einsum("ij,ij->i", dirs[idx], dv)) / np.maximum(norms, 1e-12), 1.0
        )
        resid = np.degrees(np.arccos(cosang))
        return float(np.average(resid, weights=lengths[idx]))

    # Refine on a tightening cone: contaminants that merely graze the vote
    # cone fall out of the constraint set while true pencil members stay.
    # The refit wins when it explains its support more tightly without
    # giving up a large share of the vote.
    votes = _votes(best_vp, mids, dirs, lengths, cos_thresh)
    refined = best_vp
    for factor in (1.0, 0.5, 0.25):
        cone = math.cos(math.radians(angle_deg * factor))
        support = np.nonzero(_votes(refined, mids, dirs, lengths, cone) > 0)[0]
        if len(support) < 2:
            break
        refined = _refit_vp([segments[k] for k in support], lengths[support])
    refit_votes = _votes(refined, mids, dirs, lengths, cos_thresh)
    if (
        not excluded(refined)
        and refit_votes.sum() >= 0.7 * votes.sum()
        and coherence_of(refined, refit_votes) <= coherence_of(best_vp, votes)
    ):
        best_vp, votes = refined, refit_votes
    inliers = np.nonzero(votes > 0)[0]

    total = float(sum(vote(segments[k], best_vp, angle_deg) for k in inliers))
    return VanishingPointModel(
        vp=best_vp,
        inlier_indices=tuple(int(k) for k in inliers),
        total_vote=total,
        low_support=len(inliers) < 3,
    )


def support_coherence(model: VanishingPointModel, segments: list[LineSegment]) -> float:
    """Length-weighted mean residual angle (degrees) of a model's inliers.

    A genuine gridline pencil passes within a fraction of a degree of its
    vanishing point; a compromise model stitched from unrelated segments
    shows residuals well above one degree.
    """
    if not model.inlier_indices:
        return math.inf
    total = 0.0
    weight = 0.0
    for k in model.inlier_indices:
        seg = segments[k]
        mx, my = seg.midpoint
        if model.vp.is_ideal:
            dvx, dvy = model.vp.x, model.vp.y
        else:
            px, py = model.vp.xy
            dvx, dvy = px - mx, py - my
        norm = math.hypot(dvx, dvy)
        if norm < 1e-12:
            continue
        dx, dy = seg.direction
        cosang = min(abs(dx * dvx + dy * dvy) / norm, 1.0)
        total += seg.length * math.degrees(math.acos(cosang))
        weight += seg.length
    return total / weight if weight > 0 else math.inf


def homography_from_vanishing_points(
    v1: Point,
    v2: Point,
    center: tuple[float, float] = (0.0, 0.0),
    min_separation_deg: float = MIN_VP_SEPARATION_DEG,
) -> Homography:
    """Build the transform mapping ``v1`` to the ideal x point and ``v2`` to y.

    The projective part sends the vanishing line to the line at infinity;
    an affine part then aligns the rectified directions with the axes.  The
    image ``center`` is fixed and unit lengths along the two directions at
    the center are preserved, so only parallelism (not scale) is asserted.
    """
    d1 = v1.direction_from(center)
    d2 = v2.direction_from(center)
    cosang = abs(d1[0] * d2[0] + d1[1] * d2[1])
    if cosang > math.cos(math.radians(min_separation_deg)):
        raise DegenerateGeometryError(
            "vanishing points are angularly too close "
            f"({math.degrees(math.acos(min(cosang, 1.0))):.2f} deg apart)"
        )
    cx, cy = center
    t_in = np.array([[1, 0, -cx], [0, 1, -cy], [0, 0, 1]], dtype=float)
    t_out = np.array([[1, 0, cx], [0, 1, cy], [0, 0, 1]], dtype=float)
    v1c = t_in @ v1.to_array()
    v2c = t_in @ v2.to_array()
    line = np.cross(v1c, v2c)
    ab = math.hypot(line[0], line[1])
    if ab < 1e-15 * max(abs(line[2]), 1.0):
        h_proj = np.eye(3)
    else:
        if abs(line[2]) / ab < 1.0:
            raise DegenerateGeometryError("vanishing line passes through the image center")
        h_proj = np.eye(3)
        h_proj[2, 0] = line[0] / line[2]
        h_proj[2, 1] = line[1] / line[2]

    def rect_dir(vc: np.ndarray) -> np.ndarray:
        u = h_proj @ vc
        d = u[:2]
        return d / np.linalg.norm(d)

    basis = np.column_stack([rect_dir(v1c), rect_dir(v2c)])
    affine = np.eye(3)
    affine[:2, :2] = np.linalg.inv(basis)
    return Homography(t_out @ affine @ h_proj @ t_in, provenance="line_detection")


def estimate_rectification_from_lines(
    img: np.ndarray,
    hough: HoughParams | None = None,
    iterations: int = 500,
    seed: int = 0,
    coherence_deg: float = 0.75,
) -> Homography:
    """Estimate a rectifying homography from gridline segments.

    Binarise, extract segments, fit a first vanishing point, drop its
    inliers, fit the second on the remainder.  The vanishing point whose
    segments lie closer to horizontal becomes the x direction.

    Raises
    ------
    RectificationError
        When too few segments exist, either point's support is incoherent
        (mean inlier residual above ``coherence_deg``) or the two points
        are angularly degenerate.
    """
    img = check_gray_image(img)
    base = np.random.default_rng(seed)
    s_hough, s_vp1, s_vp2 = (int(v) for v in base.integers(0, 2**31 - 1, size=3))
    # Half-degree bins keep walks on thin gridlines longer, which makes the
    # sparser of the two line families competitive in the vote.
    params = hough if hough is not None else HoughParams(theta_deg=0.5, seed=s_hough)
    segments = hough_segments(binarize(img), params)
    if len(segments) < 4:
        raise RectificationError(f"only {len(segments)} line segments found")

    h_img, w_img = img.shape
    center = (0.5 * w_img, 0.5 * h_img)
    # A plane photographed at <= 45 deg puts vanishing points at least
    # roughly a focal length out; reject in-chart pencils outright.
    radius = 0.6 * max(w_img, h_img)

    def fit_coherent(pool: list[int], seed_: int, name: str) -> VanishingPointModel:
        """Best coherent pencil in the pool; retry past incoherent winners.

        An incoherent winner (a chance alignment of unrelated segments) is
        set aside and the search repeats on what it did not claim, so a
        genuine gridline family behind it can still be found.
        """
        last_coherence = math.inf
        for attempt in range(3):
            if len(pool) < 2:
                break
            sub = [segments[i] for i in pool]
            m = ransac_vanishing_point(
                sub, iterations, seed_ + attempt,
                exclusion_center=center, exclusion_radius=radius,
            )
            last_coherence = support_coherence(m, sub)
            global_inliers = tuple(pool[i] for i in m.inlier_indices)
            if last_coherence <= coherence_deg:
                return VanishingPointModel(m.vp, global_inliers, m.total_vote, m.low_support)
            pool = [i for i in pool if i not in set(global_inliers)]
        raise RectificationError(
            f"no coherent {name} vanishing point "
            f"(last mean inlier residual {last_coherence:.2f} deg)"
        )

    try:
        m1 = fit_coherent(list(range(len(segments))), s_vp1, "first")
        rest_pool = [i for i in range(len(segments)) if i not in set(m1.inlier_indices)]
        if len(rest_pool) < 2:
            raise InsufficientDataError("no segments left for the second vanishing point")
        m2 = fit_coherent(rest_pool, s_vp2, "second")
    except InsufficientDataError as exc:
        raise RectificationError(str(exc)) from exc

    def mean_tilt(model: VanishingPointModel) -> float:
        angles = [segments[i].angle_deg() for i in model.inlier_indices]
        return float(np.mean([min(a, 180.0 - a) for a in angles]))

    if mean_tilt(m1) <= mean_tilt(m2):
        vx, vy = m1.vp, m2.vp
    else:
        vx, vy = m2.vp, m1.vp
    try:
        return homography_from_vanishing_points(vx, vy, center)
    except DegenerateGeometryError as exc:
        raise RectificationError(str(exc)) from exc


# -- polygon simplification and quadrilaterals --------------------------------

def _chord_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    chord = b - a
    n = np.hypot(*chord)
    if n < 1e-12:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    return np.abs(np.cross(chord, pts - a)) / n


def _dp_chain(pts: np.ndarray, i0: int, i1: int, eps: float, keep: np.ndarray) -> None:
    if i1 <= i0 + 1:
        return
    interior = pts[i0 + 1 : i1]
    d = _chord_distances(interior, pts[i0], pts[i1])
    imax = int(np.argmax(d))
    if d[imax] > eps:
        split = i0 + 1 + imax
        keep[split] = True
        _dp_chain(pts, i0, split, eps, keep)
        _dp_chain(pts, split, i1, eps, keep)


def douglas_peucker(polygon, epsilon: float) -> np.ndarray:
    """Simplify a closed polygon; output vertices are a subset of the input.

    Three anchors (farthest from the centroid, farthest from that vertex,
    farthest from their chord) are always kept, so the result never drops
    below a triangle.
    """
    pts = check_points(polygon, 3, "polygon")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    n = len(pts)
    centroid = pts.mean(axis=0)
    a1 = int(np.argmax(np.hypot(*(pts - centroid).T)))
    rolled = np.roll(pts, -a1, axis=0)
    a2 = int(np.argmax(np.hypot(*(rolled - rolled[0]).T)))
    d_line = _chord_distances(rolled, rolled[0], rolled[a2])
    a3 = int(np.argmax(d_line))
    anchors = sorted({0, a2, a3})

    keep = np.zeros(n + 1, dtype=bool)
    closed = np.vstack([rolled, rolled[:1]])
    bounds = anchors + [n]
    for i0, i1 in zip(bounds, bounds[1:]):
        keep[i0] = True
        _dp_chain(closed, i0, i1, epsilon, keep)
    keep[n] = False
    return rolled[keep[:n]]


def douglas_peucker_to_n(polygon, n_vertices: int = 4) -> np.ndarray:
    """Raise epsilon until the simplified polygon has ``n_vertices`` corners.

    The naive baseline for corner recovery: its output vertices always lie
    on the input polygon.
    """
    pts = check_points(polygon, 3, "polygon")
    if len(pts) <= n_vertices:
        return pts
    lo, hi = 0.0, float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))))
    best = None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        simp = douglas_peucker(pts, mid)
        if len(simp) == n_vertices:
            best = simp
        if len(simp) > n_vertices:
            lo = mid
        else:
            hi = mid
    return best if best is not None else douglas_peucker(pts, hi)


@dataclass(frozen=True)
class Quadrilateral:
    """Four corners with positive signed area (counterclockwise order)."""

    corners: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.corners) != 4:
            raise ValueError("a quadrilateral has exactly 4 corners")
        if self.area <= 0:
            object.__setattr__(
                self, "corners", tuple(reversed(self.corners))
            )
        if self.area <= 0:
            raise ValueError("quadrilateral must have strictly positive area")

    @property
    def area(self) -> float:
        pts = np.array(self.corners)
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * float(
            np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)
        )

    @property
    def is_convex(self) -> bool:
        pts = np.array(self.corners)
        crosses = []
        for i in range(4):
            u = pts[(i + 1) % 4] - pts[i]
            v = pts[(i + 2) % 4] - pts[(i + 1) % 4]
            crosses.append(u[0] * v[1] - u[1] * v[0])
        return all(c > 0 for c in crosses) or all(c < 0 for c in crosses)

    def to_array(self) -> np.ndarray:
        return np.array(self.corners, dtype=float)

    @property
    def mean_side(self) -> float:
        pts = self.to_array()
        return float(np.mean(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)))


def _order_corners(pts: np.ndarray) -> tuple[tuple[float, float], ...]:
    c = pts.mean(axis=0)
    angles = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
    order = np.argsort(angles)
    return tuple((float(x), float(y)) for x, y in pts[order])


def approx_quadrilateral(
    polygon, dp_frac: float = 0.005, proximity_frac: float = 0.01
) -> Quadrilateral:
    """Fit four lines to a polygon outline and intersect them into corners.

    Unlike plain Douglas-Peucker, the corners need not be polygon vertices,
    so rounded corners (as produced by segmentation masks) are recovered at
    the true line intersections.  Steps: light simplification, then four
    rounds of "take the longest edge, drop every edge whose endpoints both
    lie near its line", then keep the four pairwise line intersections
    closest to the polygon centroid.
    """
    pts = check_points(polygon, 4, "polygon")
    if np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    perimeter = float(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T).sum())
    if perimeter <= 0:
        raise ValueError("polygon perimeter must be positive")

    simp = douglas_peucker(pts, dp_frac * perimeter)
    edges = []
    for i in range(len(simp)):
        p, q = simp[i], simp[(i + 1) % len(simp)]
        length = math.hypot(*(q - p))
        if length > 1e-9:
            edges.append((p, q, length))

    delta = proximity_frac * perimeter
    lines: list[np.ndarray] = []
    for k in range(4):
        if not edges:
            raise QuadApproximationError(
                f"ran out of edges after finding {k} of 4 lines"
            )
        p, q, _ = max(edges, key=lambda e: e[2])
        line = np.cross(np.array([*p, 1.0]), np.array([*q, 1.0]))
        line = line / math.hypot(line[0], line[1])
        lines.append(line)
        edges = [
            e for e in edges
            if not (
                abs(np.dot(line, [*e[0], 1.0])) <= delta
                and abs(np.dot(line, [*e[1], 1.0])) <= delta
            )
        ]

    centroid = pts.mean(axis=0)
    candidates: list[tuple[float, tuple[float, float]]] = []
    for i in range(4):
        for j in range(i + 1, 4):
            v = np.cross(lines[i], lines[j])
            scale = np.abs(v).max()
            if scale == 0.0:
                continue
            v = v / scale
            if abs(v[2]) <= 1e-12:
                candidates.append((math.inf, (math.nan, math.nan)))
            else:
                x, y = v[0] / v[2], v[1] / v[2]
                candidates.append((math.hypot(x - centroid[0], y - centroid[1]), (x, y)))
    if len(candidates) < 4:
        raise QuadApproximationError("degenerate line configuration")
    candidates.sort(key=lambda c: c[0])
    nearest = candidates[:4]
    if any(math.isinf(d) for d, _ in nearest):
        raise QuadApproximationError("fewer than 4 finite corner intersections")

    quad = Quadrilateral(_order_corners(np.array([p for _, p in nearest])))
    if not quad.is_convex:
        warnings.warn("approximated quadrilateral is not convex", stacklevel=2)
    return quad


def rectify_from_quad(quad: Quadrilateral, side: float | None = None) -> Homography:
    """Homography mapping the quad's corners onto an axis-aligned square.

    ``side`` defaults to the quad's mean edge length, which keeps the
    rectified chart near its source scale.
    """
    from .geometry import homography_from_correspondences

    s = float(side) if side is not None else quad.mean_side
    if s <= 0:
        raise ValueError("side must be positive")
    dst = [(0.0, 0.0), (s, 0.0), (s, s), (0.0, s)]
    return homography_from_correspondences(quad.corners, dst, provenance="quad")


# -- warping ------------------------------------------------------------------

def warp_image(
    img: np.ndarray, h: Homography, out_size: tuple[int, int] | None = None
) -> np.ndarray:
    """Warp ``img`` by ``h`` with bilinear sampling; outside pixels are white.

    ``out_size`` is (width, height), defaulting to the input's size.
    """
    img = check_gray_image(img)
    if out_size is None:
        out_size = (img.shape[1], img.shape[0])
    return cv2.warpPerspective(
        img,
        h.matrix,
        out_size,
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=255,
    )


def fit_to_canvas(
    h: Homography,
    src_size: tuple[int, int],
    out_size: tuple[int, int] | None = None,
    margin: float = 0.02,
) -> Homography:
    """Compose a similarity so the mapped source rectangle fits the canvas.

    Rectification only asserts parallelism; this picks the free similarity
    so the warped chart lands inside the output image.
    """
    w, hgt = src_size
    if out_size is None:
        out_size = src_size
    ow, oh = out_size
    corners = np.array([[0, 0], [w, 0], [w, hgt], [0, hgt]], dtype=float)
    try:
        mapped = transform_points(h, corners)
    except DegenerateGeometryError as exc:
        raise RectificationError(f"image corners map to infinity: {exc}") from exc
    span_x = mapped[:, 0].max() - mapped[:, 0].min()
    span_y = mapped[:, 1].max() - mapped[:, 1].min()
    scale = min(ow * (1 - 2 * margin) / span_x, oh * (1 - 2 * margin) / span_y)
    tx = 0.5 * ow - scale * 0.5 * (mapped[:, 0].max() + mapped[:, 0].min())
    ty = 0.5 * oh - scale * 0.5 * (mapped[:, 1].max() + mapped[:, 1].min())
    fit = Homography(
        np.array([[scale, 0, tx], [0, scale, ty], [0, 0, 1]]), provenance=h.provenance
    )
    return fit @ h


# -- sklearn-style wrappers ----------------------------------------------------

class LineRectifier(BaseEstimator, TransformerMixin):
    """Estimate a rectifying homography from gridlines, then warp images.

    ``fit`` runs the line-detection pipeline on an image and stores the
    canvas-fitted homography as ``homography_``; ``transform`` warps an
    image of the same size.
    """

    def __init__(self, blur_sigma=1.5, window=25, offset=10.0, hough_threshold=30,
                 min_length=None, max_gap=4.0, iterations=500, seed=0, fit_canvas=True):
        self.blur_sigma = blur_sigma
        self.window = window
        self.offset = offset
        self.hough_threshold = hough_threshold
        self.min_length = min_length
        self.max_gap = max_gap
        self.iterations = iterations
        self.seed = seed
        self.fit_canvas = fit_canvas

    def fit(self, X, y=None):
        img = check_gray_image(np.asarray(X))
        base = np.random.default_rng(self.seed)
        hough_seed = int(base.integers(0, 2**31 - 1))
        params = HoughParams(
            threshold=self.hough_threshold,
            min_length=self.min_length,
            max_gap=self.max_gap,
            seed=hough_seed,
        )
        h = estimate_rectification_from_lines(
            img, hough=params, iterations=self.iterations, seed=self.seed
        )
        if self.fit_canvas:
            h = fit_to_canvas(h, (img.shape[1], img.shape[0]))
        self.homography_ = h
        return self

    def transform(self, X):
        img = check_gray_image(np.asarray(X))
        return warp_image(img, self.homography_)


class QuadRectifier(BaseEstimator, TransformerMixin):
    """Rectify via a chart-region polygon: fit on the polygon, warp images."""

    def __init__(self, side=None, fit_canvas=True, canvas_size=None):
        self.side = side
        self.fit_canvas = fit_canvas
        self.canvas_size = canvas_size

    def fit(self, X, y=None):
        self.quad_ = approx_quadrilateral(np.asarray(X, dtype=float))
        self.homography_ = rectify_from_quad(self.quad_, self.side)
        return self

    def transform(self, X):
        img = check_gray_image(np.asarray(X))
        h = self.homography_
        if self.fit_canvas:
            h = fit_to_canvas(
                h, (img.shape[1], img.shape[0]), self.canvas_size
            )
        size = self.canvas_size if self.canvas_size else None
        return warp_image(img, h, size)
