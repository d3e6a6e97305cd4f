"""Debug overlay: detections, fitted axes and snapped values on the image."""

from __future__ import annotations

import numpy as np

from .grid import Detection
from .interpret import Diagnostics
from .synth.font import render_text
from .synth.raster import draw_rect_outline, draw_segment, stamp_mask
from .validation import check_gray_image

MARK_COLOR = (220, 40, 40)
HL_COLOR = (40, 80, 220)
FREQ_COLOR = (30, 150, 60)
AXIS_COLOR = (250, 160, 20)
TEXT_COLOR = (160, 20, 160)


def _axis_endpoints(line, width: int, height: int):
    """Clip an infinite line to the image rectangle; None when outside."""
    a, b, c = line.a, line.b, line.c
    pts = []
    for x in (0.0, float(width - 1)):
        if abs(b) > 1e-12:
            y = -(a * x + c) / b
            if -1 <= y <= height:
                pts.append((x, y))
    for y in (0.0, float(height - 1)):
        if abs(a) > 1e-12:
            x = -(b * y + c) / a
            if -1 <= x <= width:
                pts.append((x, y))
    if len(pts) < 2:
        return None
    pts.sort()
    return pts[0], pts[-1]


def render_overlay(
    img: np.ndarray,
    detections: list[Detection],
    diagnostics: Diagnostics | None = None,
) -> np.ndarray:
    """Draw detection boxes (and, when available, axes plus snapped values).

    Boxes are drawn exactly at their rounded pixel coordinates: marks red,
    HL tick labels blue, frequency labels green.  With diagnostics, the two
    fitted axis lines, the origin and each mark's snapped value are added.
    """
    img = check_gray_image(img)
    canvas = np.stack([img, img, img], axis=-1)

    if diagnostics is not None:
        h, w = img.shape
        for axis in (diagnostics.freq_axis, diagnostics.hl_axis):
            ends = _axis_endpoints(axis.line, w, h)
            if ends is not None:
                (x1, y1), (x2, y2) = ends
                draw_segment(canvas, x1, y1, x2, y2, AXIS_COLOR, width=2.0)
        ox, oy = diagnostics.origin
        draw_segment(canvas, ox - 6, oy, ox + 6, oy, AXIS_COLOR, width=3.0)
        draw_segment(canvas, ox, oy - 6, ox, oy + 6, AXIS_COLOR, width=3.0)

    for d in detections:
        if d.mark_class.is_mark:
            color = MARK_COLOR
        elif d.mark_class.kind == "hl_tick":
            color = HL_COLOR
        else:
            color = FREQ_COLOR
        draw_rect_outline(canvas, d.bbox, color)

    if diagnostics is not None:
        for est in diagnostics.estimates:
            if not 0 <= est.detection_index < len(detections):
                continue
            det = detections[est.detection_index]
            text = render_text(str(est.mark.hl), scale=1)
            x0 = int(round(det.bbox[2])) + 3
            y0 = int(round(det.bbox[1]))
            stamp_mask(canvas, text, x0, y0, TEXT_COLOR)
    return canvas
