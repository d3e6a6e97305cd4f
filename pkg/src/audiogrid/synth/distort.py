"""Apply parameterised camera-style distortions to a rendered chart.

The geometric part is a pinhole-model homography: the chart plane is
rotated by the camera angle about a random in-plane axis, projected with a
focal length equal to the image's larger side, optionally rotated in-plane
and finally re-fitted into the frame with a uniform-scale similarity.
Photometric effects (lighting ramp, sensor noise, occluding rectangles, a
fold shadow) are applied after warping, so the annotation geometry mapped
through the homography stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from ..bundles import AnnotationBundle
from ..errors import LayoutError
from ..geometry import Homography, transform_box_hull, transform_points
from ..grid import Detection
from ..validation import check_gray_image


@dataclass(frozen=True)
class DistortionParams:
    """Distortion strengths; the camera angle is limited to [0, 45] degrees."""

    camera_angle_deg: float = 0.0
    rotation_deg: float = 0.0
    lighting_direction_deg: float = 0.0
    lighting_magnitude: float = 0.0
    noise_sigma: float = 0.0
    occlusion_count: int = 0
    occlusion_size: tuple[int, int] = (30, 90)
    fold_line: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.camera_angle_deg <= 45.0:
            raise ValueError(f"camera angle must lie in [0, 45], got {self.camera_angle_deg}")
        if self.lighting_magnitude < 0 or self.noise_sigma < 0 or self.occlusion_count < 0:
            raise ValueError("distortion magnitudes must be non-negative")


def _rotation_about_inplane_axis(axis_deg: float, angle_deg: float) -> np.ndarray:
    """3D rotation by ``angle_deg`` about the unit axis (cos a, sin a, 0)."""
    a = math.radians(axis_deg)
    t = math.radians(angle_deg)
    kx, ky, kz = math.cos(a), math.sin(a), 0.0
    k = np.array([[0, -kz, ky], [kz, 0, -kx], [-ky, kx, 0]])
    return np.eye(3) + math.sin(t) * k + (1 - math.cos(t)) * (k @ k)


def synth_homography(
    params: DistortionParams, width: int, height: int, axis_deg: float,
    fit_margin: float = 0.02,
) -> Homography:
    """Forward distortion homography (undistorted -> distorted image coords).

    Retries with the camera pulled back (doubled focal distance) when a
    corner of the frame would fall behind the camera; fails after 5 tries.
    """
    cx, cy = 0.5 * width, 0.5 * height
    corners = np.array(
        [[0, 0], [width, 0], [width, height], [0, height]], dtype=float
    )
    r = _rotation_about_inplane_axis(axis_deg, params.camera_angle_deg)
    f = float(max(width, height))
    for _ in range(5):
        pinhole = np.array(
            [
                [f * r[0, 0], f * r[0, 1], 0.0],
                [f * r[1, 0], f * r[1, 1], 0.0],
                [r[2, 0], r[2, 1], f],
            ]
        )
        phi = math.radians(params.rotation_deg)
        rot2 = np.array(
            [
                [math.cos(phi), -math.sin(phi), 0.0],
                [math.sin(phi), math.cos(phi), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        t_in = np.array([[1, 0, -cx], [0, 1, -cy], [0, 0, 1]], dtype=float)
        t_out = np.array([[1, 0, cx], [0, 1, cy], [0, 0, 1]], dtype=float)
        m = t_out @ rot2 @ pinhole @ t_in
        depths = (np.hstack([corners, np.ones((4, 1))]) @ m.T)[:, 2]
        if np.all(depths > 1e-6):
            h = Homography(m, provenance="ground_truth")
            mapped = transform_points(h, corners)
            span_x = mapped[:, 0].max() - mapped[:, 0].min()
            span_y = mapped[:, 1].max() - mapped[:, 1].min()
            scale = min(
                width * (1 - 2 * fit_margin) / span_x,
                height * (1 - 2 * fit_margin) / span_y,
            )
            mid_x = 0.5 * (mapped[:, 0].max() + mapped[:, 0].min())
            mid_y = 0.5 * (mapped[:, 1].max() + mapped[:, 1].min())
            fit = np.array(
                [
                    [scale, 0, cx - scale * mid_x],
                    [0, scale, cy - scale * mid_y],
                    [0, 0, 1],
                ]
            )
            return Homography(fit @ m, provenance="ground_truth")
        f *= 2.0
    raise LayoutError("could not keep the chart in frame after 5 attempts")


def distort(
    image: np.ndarray, bundle: AnnotationBundle, params: DistortionParams
) -> tuple[np.ndarray, AnnotationBundle]:
    """Warp the image and annotations; then apply photometric distortions."""
    image = check_gray_image(image)
    if bundle.true_homography is None or not np.allclose(
        bundle.true_homography.matrix, np.eye(3)
    ):
        raise ValueError("distort expects an undistorted bundle (identity homography)")
    h_img, w_img = image.shape
    rng = np.random.default_rng(params.seed)
    axis_deg = float(rng.uniform(0.0, 180.0))

    h = synth_homography(params, w_img, h_img, axis_deg)
    out = cv2.warpPerspective(
        image, h.matrix, (w_img, h_img),
        flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_CONSTANT, borderValue=255,
    )

    level2 = transform_box_hull(h, bundle.level2)
    level3 = tuple(
        (float(x), float(y)) for x, y in transform_points(h, np.array(bundle.level3))
    )
    level4 = tuple(
        Detection(d.mark_class, transform_box_hull(h, d.bbox), d.score)
        for d in bundle.level4
    )

    if params.lighting_magnitude > 0:
        d = math.radians(params.lighting_direction_deg)
        yy, xx = np.mgrid[0:h_img, 0:w_img]
        proj = xx * math.cos(d) + yy * math.sin(d)
        lo, hi = proj.min(), proj.max()
        ramp = (proj - lo) / max(hi - lo, 1.0) - 0.5
        out = np.clip(
            out.astype(np.float64) + 255.0 * params.lighting_magnitude * ramp, 0, 255
        ).astype(np.uint8)

    if params.fold_line:
        fx = float(rng.uniform(0.3 * w_img, 0.7 * w_img))
        ang = float(rng.uniform(0, math.pi))
        yy, xx = np.mgrid[0:h_img, 0:w_img]
        dist = np.abs((xx - fx) * math.cos(ang) + (yy - 0.5 * h_img) * math.sin(ang))
        band = dist < 5.0
        shaded = out.astype(np.float64)
        shaded[band] *= 0.75
        out = np.clip(shaded, 0, 255).astype(np.uint8)

    if params.noise_sigma > 0:
        noise = rng.normal(0.0, params.noise_sigma, out.shape)
        out = np.clip(np.rint(out.astype(np.float64) + noise), 0, 255).astype(np.uint8)

    for _ in range(params.occlusion_count):
        ow = int(rng.integers(params.occlusion_size[0], params.occlusion_size[1] + 1))
        oh = int(rng.integers(params.occlusion_size[0], params.occlusion_size[1] + 1))
        x0 = int(rng.integers(0, max(1, w_img - ow)))
        y0 = int(rng.integers(0, max(1, h_img - oh)))
        out[y0 : y0 + oh, x0 : x0 + ow] = 40

    new_bundle = AnnotationBundle(
        level1=bundle.level1,
        level2=level2,
        level3=level3,
        level4=level4,
        true_homography=h,
    )
    return out, new_bundle


def round_polygon_corners(
    polygon, radius: float = 6.0, points_per_corner: int = 5
) -> np.ndarray:
    """Replace each polygon vertex with an inscribed circular arc.

    Mimics the rounded corners of segmentation-mask polygons: the true
    corner is no longer a vertex of the result.
    """
    pts = np.asarray(polygon, dtype=float)
    n = len(pts)
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    out: list[tuple[float, float]] = []
    for i in range(n):
        v = pts[i]
        a = pts[(i - 1) % n]
        b = pts[(i + 1) % n]
        u1 = (a - v) / np.linalg.norm(a - v)
        u2 = (b - v) / np.linalg.norm(b - v)
        cos_full = float(np.clip(np.dot(u1, u2), -1.0, 1.0))
        half = 0.5 * math.acos(cos_full)
        tangent = radius / math.tan(half)
        if tangent > 0.5 * min(np.linalg.norm(a - v), np.linalg.norm(b - v)):
            raise ValueError("corner radius too large for polygon edges")
        bisector = u1 + u2
        bisector /= np.linalg.norm(bisector)
        center = v + bisector * (radius / math.sin(half))
        t1 = v + u1 * tangent
        t2 = v + u2 * tangent
        a1 = math.atan2(t1[1] - center[1], t1[0] - center[0])
        a2 = math.atan2(t2[1] - center[1], t2[0] - center[0])
        sweep = (a2 - a1) % (2 * math.pi)
        if sweep > math.pi:
            sweep -= 2 * math.pi
        for k in range(points_per_corner):
            ang = a1 + sweep * k / (points_per_corner - 1)
            out.append(
                (center[0] + radius * math.cos(ang), center[1] + radius * math.sin(ang))
            )
    return np.array(out)
