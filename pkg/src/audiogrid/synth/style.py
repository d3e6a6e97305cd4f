"""Chart appearance parameters and the glyph template set they imply."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..grid import DEFAULT_GRID, GridSpec, MarkClass
from .font import render_text
from .raster import circle_ring_mask, cross_mask


@dataclass(frozen=True)
class RenderStyle:
    """Geometry and ink parameters of a rendered audiogram.

    The chart region (grid only) sits inside the image with margins that
    make room for tick labels: hearing-level labels to the left, frequency
    labels along the top.  Marks are an X for the left ear and a circle for
    the right ear, joined by a thin polyline.
    """

    width: int = 800
    height: int = 600
    margin_left: int = 90
    margin_top: int = 70
    margin_right: int = 45
    margin_bottom: int = 35
    grid_value: int = 110
    grid_width: int = 1
    border_value: int = 40
    border_width: int = 2
    mark_size: int = 15
    mark_stroke: float = 3.0
    mark_value: int = 0
    line_width: float = 1.0
    line_value: int = 0
    font_scale: int = 2
    label_value: int = 0
    label_gap: int = 8
    background: int = 255

    def __post_init__(self) -> None:
        if self.chart_x1 - self.chart_x0 < 8 or self.chart_y1 - self.chart_y0 < 8:
            raise ValueError("margins leave no chart region")
        cell_w = (self.chart_x1 - self.chart_x0) / 7
        cell_h = (self.chart_y1 - self.chart_y0) / 13
        if self.mark_size >= min(cell_w, cell_h):
            raise ValueError("mark size must be smaller than a grid cell")
        if self.font_scale < 1:
            raise ValueError("font_scale must be >= 1")

    @property
    def chart_x0(self) -> int:
        return self.margin_left

    @property
    def chart_y0(self) -> int:
        return self.margin_top

    @property
    def chart_x1(self) -> int:
        return self.width - self.margin_right

    @property
    def chart_y1(self) -> int:
        return self.height - self.margin_bottom

    @property
    def chart_polygon(self) -> tuple[tuple[float, float], ...]:
        x0, y0, x1, y1 = self.chart_x0, self.chart_y0, self.chart_x1, self.chart_y1
        return ((float(x0), float(y0)), (float(x1), float(y0)),
                (float(x1), float(y1)), (float(x0), float(y1)))


def mark_glyph_mask(style: RenderStyle, ear: str) -> np.ndarray:
    """Ink mask of a mark glyph: X for the left ear, circle for the right."""
    half = style.mark_size / 2.0
    if ear == "left":
        return cross_mask(half, style.mark_stroke)
    if ear == "right":
        return circle_ring_mask(half - 0.5 * style.mark_stroke, style.mark_stroke)
    raise ValueError(f"unknown ear {ear!r}")


def glyph_templates(
    style: RenderStyle, grid: GridSpec = DEFAULT_GRID, pad: int = 4
) -> dict[MarkClass, np.ndarray]:
    """Grayscale templates (ink on white) for all 24 detection classes.

    ``pad`` adds a white border so that a template also encodes the empty
    space around a glyph; this keeps short label strings from matching
    inside longer ones.
    """
    templates: dict[MarkClass, np.ndarray] = {}

    def to_image(mask: np.ndarray, value: int) -> np.ndarray:
        canvas = np.full(
            (mask.shape[0] + 2 * pad, mask.shape[1] + 2 * pad), style.background, np.uint8
        )
        canvas[pad : pad + mask.shape[0], pad : pad + mask.shape[1]][mask] = value
        return canvas

    templates[MarkClass("mark_left")] = to_image(mark_glyph_mask(style, "left"), style.mark_value)
    templates[MarkClass("mark_right")] = to_image(mark_glyph_mask(style, "right"), style.mark_value)
    for v in grid.hl_ticks:
        mask = render_text(str(v), style.font_scale)
        templates[MarkClass("hl_tick", v)] = to_image(mask, style.label_value)
    for f in grid.frequencies:
        mask = render_text(str(f), style.font_scale)
        templates[MarkClass("freq_tick", f)] = to_image(mask, style.label_value)
    return templates
