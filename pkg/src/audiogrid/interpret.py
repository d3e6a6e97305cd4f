"""Turn classified detections into a digital audiogram.

The coordinate frame is recovered from tick labels alone: frequency and
hearing-level labels are separated by their class (their value sets are
disjoint), each group's centroids are fitted with a RANSAC line, and the
two lines' intersection becomes the origin.  Projected label positions then
calibrate two RANSAC regressions, linear for hearing level and log2 for
frequency.  Mark centroids are projected, mapped through the calibrations
and snapped to the audiogram grid.

A rotation, uniform scale or translation of all boxes changes nothing: the
calibrations absorb any similarity, so rectification only has to restore
parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DegenerateGeometryError, InsufficientDataError, InterpretationError
from .geometry import Line
from .grid import (
    DEFAULT_GRID,
    Detection,
    DigitalAudiogram,
    GridSpec,
    Mark,
    snap_to_grid,
)
from .validation import check_points

ProjectionMode = Literal["orthogonal", "oblique"]

MIN_AXIS_ANGLE_DEG = 15.0


@dataclass(frozen=True)
class InterpretConfig:
    """Knobs for the fitting stages; defaults suit the synthetic charts."""

    axis_residual_px: float = 3.0
    axis_iterations: int = 500
    cal_residual_hl: float = 5.0
    cal_residual_log2: float = 0.25
    cal_iterations: int = 500
    projection: ProjectionMode = "orthogonal"
    score_threshold: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class AxisFit:
    """A fitted axis direction with its supporting label indices."""

    line: Line
    inlier_indices: tuple[int, ...]
    low_support: bool
    origin: tuple[float, float] | None = None


@dataclass(frozen=True)
class Calibration:
    """Linear map from projected pixel distance to an axis value.

    ``space`` is "linear" for hearing level and "log2" for frequency, in
    which case the fitted line lives in log2(value) space.
    """

    slope: float
    intercept: float
    space: Literal["linear", "log2"]
    inlier_count: int

    def __post_init__(self) -> None:
        if self.slope == 0.0:
            raise ValueError("calibration slope must be nonzero")

    def apply(self, p: float) -> float:
        t = self.slope * p + self.intercept
        if self.space == "log2":
            return float(2.0 ** min(max(t, -60.0), 60.0))
        return float(t)


@dataclass(frozen=True)
class ProjectedMark:
    """Signed axis coordinates of one mark plus its source detection."""

    p_frequency: float
    p_hl: float
    detection_index: int


@dataclass(frozen=True)
class MarkEstimate:
    """Pre-snap real-valued estimate and the snapped grid mark."""

    detection_index: int
    raw_frequency: float
    raw_hl: float
    mark: Mark


@dataclass(frozen=True)
class Diagnostics:
    """Everything the interpreter fitted, for overlays and debugging."""

    freq_axis: AxisFit
    hl_axis: AxisFit
    g_f: Calibration
    g_l: Calibration
    origin: tuple[float, float]
    estimates: tuple[MarkEstimate, ...]
    warnings: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "origin": list(self.origin),
            "freq_axis": {
                "line": [self.freq_axis.line.a, self.freq_axis.line.b, self.freq_axis.line.c],
                "inliers": list(self.freq_axis.inlier_indices),
                "low_support": self.freq_axis.low_support,
            },
            "hl_axis": {
                "line": [self.hl_axis.line.a, self.hl_axis.line.b, self.hl_axis.line.c],
                "inliers": list(self.hl_axis.inlier_indices),
                "low_support": self.hl_axis.low_support,
            },
            "g_f": {"slope": self.g_f.slope, "intercept": self.g_f.intercept,
                    "space": self.g_f.space, "inliers": self.g_f.inlier_count},
            "g_l": {"slope": self.g_l.slope, "intercept": self.g_l.intercept,
                    "space": self.g_l.space, "inliers": self.g_l.inlier_count},
            "estimates": [
                {
                    "detection": e.detection_index,
                    "raw": [e.raw_frequency, e.raw_hl],
                    "snapped": [e.mark.frequency, e.mark.hl, e.mark.ear],
                }
                for e in self.estimates
            ],
            "warnings": list(self.warnings),
        }


# -- small steps ----------------------------------------------------------------

def centroid(d: Detection) -> tuple[float, float]:
    """Bounding-box center, used as the glyph's coordinate."""
    return d.centroid


def group_labels(
    detections: Sequence[Detection],
) -> tuple[list[Detection], list[Detection], list[Detection]]:
    """Split detections into (frequency labels, HL labels, marks) by class."""
    freq = [d for d in detections if d.mark_class.kind == "freq_tick"]
    hl = [d for d in detections if d.mark_class.kind == "hl_tick"]
    marks = [d for d in detections if d.mark_class.is_mark]
    return freq, hl, marks


def fit_axis(
    points,
    residual_px: float = 3.0,
    iterations: int = 500,
    seed: int = 0,
) -> AxisFit:
    """RANSAC line through label centroids, refined by total least squares.

    Inliers are points within ``residual_px`` of the candidate line; the
    final line is a perpendicular (total) least-squares fit on the winners,
    so vertical axes are handled exactly like horizontal ones.
    """
    pts = check_points(points, 2)
    n = len(pts)
    rng = np.random.default_rng(seed)
    best_mask: np.ndarray | None = None
    best_count = 0
    for _ in range(iterations):
        i, j = rng.choice(n, size=2, replace=False)
        p, q = pts[i], pts[j]
        d = q - p
        norm = math.hypot(*d)
        if norm < 1e-12:
            continue
        # unit normal of the candidate line
        nx, ny = -d[1] / norm, d[0] / norm
        dist = np.abs((pts[:, 0] - p[0]) * nx + (pts[:, 1] - p[1]) * ny)
        mask = dist <= residual_px
        count = int(mask.sum())
        if count > best_count:
            best_count = count
            best_mask = mask
    if best_mask is None:
        raise InsufficientDataError("all sampled point pairs were coincident")

    inlier_pts = pts[best_mask]
    mean = inlier_pts.mean(axis=0)
    centered = inlier_pts - mean
    cov = centered.T @ centered
    eigvals, eigvecs = np.linalg.eigh(cov)
    normal = eigvecs[:, 0]  # smallest-variance direction
    a, b = float(normal[0]), float(normal[1])
    c = -(a * mean[0] + b * mean[1])
    return AxisFit(
        line=Line(a, b, c),
        inlier_indices=tuple(int(k) for k in np.nonzero(best_mask)[0]),
        low_support=best_count < max(2, math.ceil(0.6 * n)),
    )


def _axes_origin(f_axis: AxisFit, hl_axis: AxisFit) -> tuple[float, float]:
    uf = f_axis.line.direction
    ul = hl_axis.line.direction
    cosang = abs(uf[0] * ul[0] + uf[1] * ul[1])
    if cosang > math.cos(math.radians(MIN_AXIS_ANGLE_DEG)):
        raise DegenerateGeometryError(
            f"axes are nearly parallel ({math.degrees(math.acos(min(cosang, 1.0))):.1f} deg)"
        )
    p = f_axis.line.intersection(hl_axis.line)
    return p.xy


def _project(
    points: np.ndarray,
    origin: tuple[float, float],
    u_f: tuple[float, float],
    u_l: tuple[float, float],
    mode: ProjectionMode,
) -> np.ndarray:
    """Coordinates of points in the axis frame; column 0 along the frequency
    axis, column 1 along the HL axis."""
    v = points - np.asarray(origin)
    if mode == "orthogonal":
        p_f = v @ np.asarray(u_f)
        p_l = v @ np.asarray(u_l)
        return np.column_stack([p_f, p_l])
    if mode == "oblique":
        basis = np.column_stack([u_f, u_l])
        return np.linalg.solve(basis, v.T).T
    raise ValueError(f"unknown projection mode {mode!r}")


def project_marks(
    marks: Sequence[Detection],
    f_axis: AxisFit,
    hl_axis: AxisFit,
    mode: ProjectionMode = "orthogonal",
) -> list[ProjectedMark]:
    """Project mark centroids into the fitted axis frame.

    Orthogonal mode takes the signed distance from the origin to each
    mark's perpendicular foot on the axis line; oblique mode expresses the
    mark in the (possibly non-orthogonal) axis basis, which is unbiased
    when residual shear survives rectification.
    """
    origin = _axes_origin(f_axis, hl_axis)
    if not marks:
        return []
    pts = np.array([centroid(d) for d in marks])
    coords = _project(pts, origin, f_axis.line.direction, hl_axis.line.direction, mode)
    return [
        ProjectedMark(float(pf), float(pl), i)
        for i, (pf, pl) in enumerate(coords)
    ]


def fit_calibration(
    samples: Sequence[tuple[float, float]],
    space: Literal["linear", "log2"],
    residual: float = 5.0,
    iterations: int = 500,
    seed: int = 0,
) -> Calibration:
    """RANSAC linear regression of axis value against projected distance.

    Targets are raw values (linear space) or their log2 (frequency space);
    the residual threshold lives in target units.  The winning 2-point model
    is refined by ordinary least squares over its inliers.
    """
    ps = np.array([s[0] for s in samples], dtype=float)
    values = np.array([s[1] for s in samples], dtype=float)
    if space == "log2":
        if np.any(values <= 0):
            raise ValueError("log2 calibration requires positive values")
        targets = np.log2(values)
    else:
        targets = values
    if len(ps) < 2 or np.ptp(ps) < 1e-12:
        raise InsufficientDataError("need two samples with distinct projections")

    rng = np.random.default_rng(seed)
    best_mask: np.ndarray | None = None
    best_count = 0
    for _ in range(iterations):
        i, j = rng.choice(len(ps), size=2, replace=False)
        dp = ps[j] - ps[i]
        if abs(dp) < 1e-12:
            continue
        slope = (targets[j] - targets[i]) / dp
        inter = targets[i] - slope * ps[i]
        mask = np.abs(targets - (slope * ps + inter)) <= residual
        count = int(mask.sum())
        if count > best_count:
            best_count = count
            best_mask = mask
    if best_mask is None or best_count < 2:
        raise InsufficientDataError("no valid 2-point calibration model found")
    slope, inter = np.polyfit(ps[best_mask], targets[best_mask], 1)
    if abs(slope) < 1e-12:
        raise InterpretationError("degenerate calibration: zero slope")
    return Calibration(float(slope), float(inter), space, best_count)


# -- full interpretation ----------------------------------------------------------

@dataclass(frozen=True)
class _Frame:
    """Fitted coordinate frame: axes, origin and both calibrations."""

    freq_axis: AxisFit
    hl_axis: AxisFit
    origin: tuple[float, float]
    g_f: Calibration
    g_l: Calibration
    warnings: tuple[str, ...]


def _fit_frame(
    detections: Sequence[Detection], grid: GridSpec, config: InterpretConfig
) -> _Frame:
    freq_labels, hl_labels, _ = group_labels(detections)
    if len(freq_labels) < 2 or len(hl_labels) < 2:
        raise InterpretationError(
            f"need at least 2 labels per axis, got {len(freq_labels)} frequency "
            f"and {len(hl_labels)} HL"
        )
    seeds = np.random.default_rng(config.seed).integers(0, 2**31 - 1, size=4)
    warnings: list[str] = []

    f_pts = np.array([centroid(d) for d in freq_labels])
    l_pts = np.array([centroid(d) for d in hl_labels])
    f_axis = fit_axis(f_pts, config.axis_residual_px, config.axis_iterations, int(seeds[0]))
    hl_axis = fit_axis(l_pts, config.axis_residual_px, config.axis_iterations, int(seeds[1]))
    if f_axis.low_support:
        warnings.append("frequency axis has low inlier support")
    if hl_axis.low_support:
        warnings.append("HL axis has low inlier support")

    origin = _axes_origin(f_axis, hl_axis)
    all_pts = np.array([centroid(d) for d in detections])
    span = max(float(np.ptp(all_pts[:, 0])), float(np.ptp(all_pts[:, 1])), 1.0)
    center = all_pts.mean(axis=0)
    if math.hypot(origin[0] - center[0], origin[1] - center[1]) > 3.0 * span:
        warnings.append("axis origin lies far outside the detection region")

    u_f = f_axis.line.direction
    u_l = hl_axis.line.direction
    f_proj = _project(f_pts, origin, u_f, u_l, config.projection)[:, 0]
    l_proj = _project(l_pts, origin, u_f, u_l, config.projection)[:, 1]
    g_f = fit_calibration(
        list(zip(f_proj, (float(d.mark_class.value) for d in freq_labels))),
        "log2", config.cal_residual_log2, config.cal_iterations, int(seeds[2]),
    )
    g_l = fit_calibration(
        list(zip(l_proj, (float(d.mark_class.value) for d in hl_labels))),
        "linear", config.cal_residual_hl, config.cal_iterations, int(seeds[3]),
    )
    f_axis = AxisFit(f_axis.line, f_axis.inlier_indices, f_axis.low_support, origin)
    hl_axis = AxisFit(hl_axis.line, hl_axis.inlier_indices, hl_axis.low_support, origin)
    return _Frame(f_axis, hl_axis, origin, g_f, g_l, tuple(warnings))


def _predict_marks(
    frame: _Frame,
    detections: Sequence[Detection],
    grid: GridSpec,
    config: InterpretConfig,
    original_indices: Sequence[int] | None = None,
) -> tuple[DigitalAudiogram, tuple[MarkEstimate, ...], tuple[str, ...]]:
    if original_indices is None:
        original_indices = range(len(detections))
    _, _, marks = group_labels(detections)
    warnings: list[str] = []
    estimates: list[MarkEstimate] = []
    best: dict[tuple[int, str], tuple[float, Mark]] = {}
    if marks:
        pts = np.array([centroid(d) for d in marks])
        coords = _project(
            pts, frame.origin,
            frame.freq_axis.line.direction, frame.hl_axis.line.direction,
            config.projection,
        )
        mark_indices = [
            original_indices[i]
            for i, d in enumerate(detections)
            if d.mark_class.is_mark
        ]
        for (pf, pl), det, det_idx in zip(coords, marks, mark_indices):
            raw_f = frame.g_f.apply(float(pf))
            raw_hl = frame.g_l.apply(float(pl))
            f, hl = snap_to_grid(raw_f, raw_hl, grid)
            ear = det.mark_class.ear or "left"
            mark = Mark(f, hl, ear)
            estimates.append(MarkEstimate(det_idx, raw_f, raw_hl, mark))
            key = (f, ear)
            if key in best:
                warnings.append(
                    f"duplicate mark at frequency {f} ({ear}); keeping higher score"
                )
                if det.score > best[key][0]:
                    best[key] = (det.score, mark)
            else:
                best[key] = (det.score, mark)
    audiogram = DigitalAudiogram.from_marks((m for _, m in best.values()), grid)
    return audiogram, tuple(estimates), tuple(warnings)


def interpret(
    detections: Sequence[Detection],
    grid: GridSpec = DEFAULT_GRID,
    config: InterpretConfig = InterpretConfig(),
) -> tuple[DigitalAudiogram, Diagnostics]:
    """Full interpretation of one image's detections.

    Raises
    ------
    InterpretationError
        When either axis has fewer than two labels after score filtering.
    DegenerateGeometryError
        When the fitted axes are nearly parallel.
    """
    kept_indices = [i for i, d in enumerate(detections) if d.score >= config.score_threshold]
    kept = [detections[i] for i in kept_indices]
    frame = _fit_frame(kept, grid, config)
    audiogram, estimates, mark_warnings = _predict_marks(
        frame, kept, grid, config, kept_indices
    )
    diag = Diagnostics(
        freq_axis=frame.freq_axis,
        hl_axis=frame.hl_axis,
        g_f=frame.g_f,
        g_l=frame.g_l,
        origin=frame.origin,
        estimates=estimates,
        warnings=frame.warnings + mark_warnings,
    )
    return audiogram, diag


class AudiogramInterpreter(BaseEstimator):
    """sklearn-style wrapper: fit the coordinate frame, predict grid marks.

    ``fit`` consumes a detection list and learns axes plus calibrations from
    the tick labels; ``predict`` maps the marks of a detection list through
    the fitted frame.  ``fit_predict`` on one list equals ``interpret``.
    """

    def __init__(self, axis_residual_px=3.0, axis_iterations=500,
                 cal_residual_hl=5.0, cal_residual_log2=0.25, cal_iterations=500,
                 projection="orthogonal", score_threshold=0.5, seed=0):
        self.axis_residual_px = axis_residual_px
        self.axis_iterations = axis_iterations
        self.cal_residual_hl = cal_residual_hl
        self.cal_residual_log2 = cal_residual_log2
        self.cal_iterations = cal_iterations
        self.projection = projection
        self.score_threshold = score_threshold
        self.seed = seed

    def _config(self) -> InterpretConfig:
        return InterpretConfig(
            axis_residual_px=self.axis_residual_px,
            axis_iterations=self.axis_iterations,
            cal_residual_hl=self.cal_residual_hl,
            cal_residual_log2=self.cal_residual_log2,
            cal_iterations=self.cal_iterations,
            projection=self.projection,
            score_threshold=self.score_threshold,
            seed=self.seed,
        )

    def fit(self, X: Sequence[Detection], y=None):
        config = self._config()
        kept = [d for d in X if d.score >= config.score_threshold]
        self.frame_ = _fit_frame(kept, DEFAULT_GRID, config)
        return self

    def predict(self, X: Sequence[Detection]) -> DigitalAudiogram:
        config = self._config()
        kept_indices = [i for i, d in enumerate(X) if d.score >= config.score_threshold]
        kept = [X[i] for i in kept_indices]
        audiogram, estimates, warnings = _predict_marks(
            self.frame_, kept, DEFAULT_GRID, config, kept_indices
        )
        self.diagnostics_ = Diagnostics(
            freq_axis=self.frame_.freq_axis,
            hl_axis=self.frame_.hl_axis,
            g_f=self.frame_.g_f,
            g_l=self.frame_.g_l,
            origin=self.frame_.origin,
            estimates=estimates,
            warnings=self.frame_.warnings + warnings,
        )
        return audiogram

    def fit_predict(self, X: Sequence[Detection]) -> DigitalAudiogram:
        return self.fit(X).predict(X)
