"""Per-image ground truth at four levels of detail.

Level 1 is the audiogram's value tuples, level 2 the gram bounding box
(grid plus axis labels), level 3 the chart-region polygon (grid only) and
level 4 the bounding boxes of every mark and tick label.  Synthetic images
additionally carry the exact distortion homography.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Homography
from .grid import Box, Detection, DigitalAudiogram


def _segments_intersect(p1, p2, p3, p4) -> bool:
    """Proper intersection test between open segments p1p2 and p3p4."""

    def orient(a, b, c):
        v = float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        return (v > 0) - (v < 0)

    o1 = orient(p1, p2, p3)
    o2 = orient(p1, p2, p4)
    o3 = orient(p3, p4, p1)
    o4 = orient(p3, p4, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def is_simple_polygon(vertices: np.ndarray) -> bool:
    """True when no two non-adjacent edges of the closed polygon cross."""
    pts = np.asarray(vertices, dtype=float)
    n = len(pts)
    if n < 3:
        return False
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


@dataclass(frozen=True)
class AnnotationBundle:
    """Ground truth for one image; ``true_homography`` maps the undistorted
    render onto this image (identity for undistorted images)."""

    level1: DigitalAudiogram
    level2: Box
    level3: tuple[tuple[float, float], ...]
    level4: tuple[Detection, ...]
    true_homography: Homography | None = None

    def __post_init__(self) -> None:
        x0, y0, x1, y1 = self.level2
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"level2 box is empty: {self.level2}")
        if len(self.level3) < 3:
            raise ValueError("level3 polygon needs at least 3 vertices")
        if not is_simple_polygon(np.array(self.level3)):
            raise ValueError("level3 polygon is self-intersecting")
        gt_ears = sorted(m.ear for m in self.level1.marks)
        det_ears = sorted(
            d.mark_class.ear for d in self.level4 if d.mark_class.is_mark
        )
        if gt_ears != det_ears:
            raise ValueError(
                "level4 mark detections do not match level1 marks "
                f"({det_ears} vs {gt_ears})"
            )

    @property
    def mark_detections(self) -> tuple[Detection, ...]:
        return tuple(d for d in self.level4 if d.mark_class.is_mark)

    @property
    def label_detections(self) -> tuple[Detection, ...]:
        return tuple(d for d in self.level4 if not d.mark_class.is_mark)
