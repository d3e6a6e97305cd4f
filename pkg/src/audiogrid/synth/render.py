"""Render a digital audiogram into a grayscale chart image with ground truth.

The render is fully deterministic: no randomness, integer rasterisation.
Every glyph (mark or tick label) is first drawn onto a scratch layer so its
level-4 bounding box is the exact ink extent.
"""

from __future__ import annotations

import math

import numpy as np

from ..bundles import AnnotationBundle
from ..errors import LayoutError
from ..geometry import Homography
from ..grid import DEFAULT_GRID, Detection, DigitalAudiogram, GridSpec, MarkClass
from .font import render_text
from .raster import draw_hline, draw_segment, draw_vline, mask_bbox, stamp_mask
from .style import RenderStyle, mark_glyph_mask


class ChartGeometry:
    """Maps grid values to pixel coordinates for a given style."""

    def __init__(self, style: RenderStyle, grid: GridSpec = DEFAULT_GRID) -> None:
        self.style = style
        self.grid = grid
        self._logf0 = math.log2(grid.frequencies[0])
        self._logf1 = math.log2(grid.frequencies[-1])
        self._hl0 = grid.hl_ticks[0]
        self._hl1 = grid.hl_ticks[-1]

    def x_of(self, frequency: float) -> float:
        s = self.style
        t = (math.log2(frequency) - self._logf0) / (self._logf1 - self._logf0)
        return s.chart_x0 + t * (s.chart_x1 - s.chart_x0)

    def y_of(self, hl: float) -> float:
        s = self.style
        t = (hl - self._hl0) / (self._hl1 - self._hl0)
        return s.chart_y0 + t * (s.chart_y1 - s.chart_y0)


def render_audiogram(
    audiogram: DigitalAudiogram,
    style: RenderStyle = RenderStyle(),
    grid: GridSpec = DEFAULT_GRID,
) -> tuple[np.ndarray, AnnotationBundle]:
    """Render ``audiogram`` and return the image plus all four ground-truth
    annotation levels (with an identity true homography)."""
    geom = ChartGeometry(style, grid)
    img = np.full((style.height, style.width), style.background, dtype=np.uint8)
    detections: list[Detection] = []

    for f in grid.frequencies:
        draw_vline(img, round(geom.x_of(f)), style.chart_y0, style.chart_y1,
                   style.grid_value, style.grid_width)
    for v in grid.hl_ticks:
        draw_hline(img, round(geom.y_of(v)), style.chart_x0, style.chart_x1,
                   style.grid_value, style.grid_width)
    # chart frame: audiogram grids carry a visible border
    draw_vline(img, style.chart_x0, style.chart_y0, style.chart_y1,
               style.border_value, style.border_width)
    draw_vline(img, style.chart_x1, style.chart_y0, style.chart_y1,
               style.border_value, style.border_width)
    draw_hline(img, style.chart_y0, style.chart_x0, style.chart_x1,
               style.border_value, style.border_width)
    draw_hline(img, style.chart_y1, style.chart_x0, style.chart_x1,
               style.border_value, style.border_width)

    marks = sorted(audiogram.marks, key=lambda m: m.frequency)
    for a, b in zip(marks, marks[1:]):
        draw_segment(img, geom.x_of(a.frequency), geom.y_of(a.hl),
                     geom.x_of(b.frequency), geom.y_of(b.hl),
                     style.line_value, style.line_width)

    def place_glyph(mask: np.ndarray, x0: int, y0: int, value: int, cls: MarkClass) -> None:
        h, w = mask.shape
        if x0 < 0 or y0 < 0 or x0 + w > style.width or y0 + h > style.height:
            raise LayoutError(f"{cls.name} glyph does not fit at ({x0}, {y0})")
        stamp_mask(img, mask, x0, y0, value)
        detections.append(Detection(cls, mask_bbox(mask, x0, y0), 1.0))

    for m in marks:
        mask = mark_glyph_mask(style, m.ear)
        cx, cy = round(geom.x_of(m.frequency)), round(geom.y_of(m.hl))
        cls = MarkClass("mark_left" if m.ear == "left" else "mark_right")
        place_glyph(mask, cx - mask.shape[1] // 2, cy - mask.shape[0] // 2,
                    style.mark_value, cls)

    # Labels are centred on a fixed column so their centroids are collinear
    # regardless of string width.
    hl_masks = {v: render_text(str(v), style.font_scale) for v in grid.hl_ticks}
    field_w = max(m.shape[1] for m in hl_masks.values())
    hl_center_x = style.chart_x0 - style.label_gap - field_w // 2
    for v in grid.hl_ticks:
        mask = hl_masks[v]
        x0 = hl_center_x - mask.shape[1] // 2
        y0 = round(geom.y_of(v)) - mask.shape[0] // 2
        place_glyph(mask, x0, y0, style.label_value, MarkClass("hl_tick", v))

    for f in grid.frequencies:
        mask = render_text(str(f), style.font_scale)
        x0 = round(geom.x_of(f)) - mask.shape[1] // 2
        y0 = style.chart_y0 - style.label_gap - mask.shape[0]
        place_glyph(mask, x0, y0, style.label_value, MarkClass("freq_tick", f))

    boxes = np.array([d.bbox for d in detections]) if detections else np.empty((0, 4))
    pad = 6.0
    gram = (
        max(0.0, min(float(style.chart_x0), *boxes[:, 0]) - pad) if len(boxes) else 0.0,
        max(0.0, min(float(style.chart_y0), *boxes[:, 1]) - pad) if len(boxes) else 0.0,
        min(float(style.width), max(float(style.chart_x1), *boxes[:, 2]) + pad),
        min(float(style.height), max(float(style.chart_y1), *boxes[:, 3]) + pad),
    )

    bundle = AnnotationBundle(
        level1=audiogram,
        level2=gram,
        level3=style.chart_polygon,
        level4=tuple(detections),
        true_homography=Homography(np.eye(3), provenance="ground_truth"),
    )
    return img, bundle
