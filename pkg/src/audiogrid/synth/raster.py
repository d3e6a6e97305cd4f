"""Deterministic pixel-level drawing primitives.

Everything here mutates uint8 arrays in place using integer or exact float
comparisons, never anti-aliasing, so renders are bit-identical across runs
and platforms.  Canvases may be 2D grayscale or (H, W, 3) color arrays; the
``value`` is then a scalar or a color triple.
"""

from __future__ import annotations

import numpy as np


def draw_hline(img: np.ndarray, y: int, x0: int, x1: int, value, width: int = 1) -> None:
    h, w = img.shape[:2]
    half = width // 2
    ya, yb = max(0, y - half), min(h, y - half + width)
    xa, xb = max(0, x0), min(w, x1 + 1)
    if ya < yb and xa < xb:
        img[ya:yb, xa:xb] = value


def draw_vline(img: np.ndarray, x: int, y0: int, y1: int, value, width: int = 1) -> None:
    h, w = img.shape[:2]
    half = width // 2
    xa, xb = max(0, x - half), min(w, x - half + width)
    ya, yb = max(0, y0), min(h, y1 + 1)
    if ya < yb and xa < xb:
        img[ya:yb, xa:xb] = value


def draw_segment(
    img: np.ndarray,
    x1: float,
    y1: float,
    x2: float,
    y2: float,
    value,
    width: float = 1.0,
) -> None:
    """Draw a thick segment by distance test inside its bounding patch."""
    h, w = img.shape[:2]
    half = 0.5 * width
    pad = int(np.ceil(half)) + 1
    xa = max(0, int(np.floor(min(x1, x2))) - pad)
    xb = min(w, int(np.ceil(max(x1, x2))) + pad + 1)
    ya = max(0, int(np.floor(min(y1, y2))) - pad)
    yb = min(h, int(np.ceil(max(y1, y2))) + pad + 1)
    if xa >= xb or ya >= yb:
        return
    yy, xx = np.mgrid[ya:yb, xa:xb]
    dx, dy = x2 - x1, y2 - y1
    den = dx * dx + dy * dy
    if den == 0:
        dist = np.hypot(xx - x1, yy - y1)
    else:
        t = np.clip(((xx - x1) * dx + (yy - y1) * dy) / den, 0.0, 1.0)
        dist = np.hypot(xx - (x1 + t * dx), yy - (y1 + t * dy))
    img[ya:yb, xa:xb][dist <= half] = value


def circle_ring_mask(radius: float, thickness: float) -> np.ndarray:
    """Boolean ink mask of a circle outline on a tight square canvas."""
    r_out = radius + 0.5 * thickness
    size = int(np.ceil(2 * r_out)) | 1
    c = size // 2
    yy, xx = np.mgrid[0:size, 0:size]
    dist = np.hypot(xx - c, yy - c)
    return np.abs(dist - radius) <= 0.5 * thickness


def cross_mask(half_extent: float, thickness: float) -> np.ndarray:
    """Boolean ink mask of an X glyph (two diagonal strokes)."""
    size = int(np.ceil(2 * half_extent)) | 1
    c = size // 2
    yy, xx = np.mgrid[0:size, 0:size]
    u, v = xx - c, yy - c
    half = 0.5 * thickness
    on_diag1 = (np.abs(u - v) <= half * np.sqrt(2)) & (np.abs(u + v) <= 2 * half_extent)
    on_diag2 = (np.abs(u + v) <= half * np.sqrt(2)) & (np.abs(u - v) <= 2 * half_extent)
    return on_diag1 | on_diag2


def stamp_mask(img: np.ndarray, mask: np.ndarray, x0: int, y0: int, value) -> None:
    """Write ``value`` wherever ``mask`` is set, clipped to the image."""
    h, w = img.shape[:2]
    mh, mw = mask.shape
    xa, ya = max(0, x0), max(0, y0)
    xb, yb = min(w, x0 + mw), min(h, y0 + mh)
    if xa >= xb or ya >= yb:
        return
    sub = mask[ya - y0 : yb - y0, xa - x0 : xb - x0]
    img[ya:yb, xa:xb][sub] = value


def mask_bbox(mask: np.ndarray, x0: int = 0, y0: int = 0) -> tuple[float, float, float, float]:
    """Tight bbox of set pixels, offset by (x0, y0), end-exclusive."""
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise ValueError("mask has no ink")
    return (
        float(x0 + xs.min()),
        float(y0 + ys.min()),
        float(x0 + xs.max() + 1),
        float(y0 + ys.max() + 1),
    )


def draw_rect_outline(img: np.ndarray, box, value, width: int = 1) -> None:
    """Outline an axis-aligned box; works for 2D or (H, W, 3) images."""
    x0, y0, x1, y1 = (int(round(v)) for v in box)
    h, w = img.shape[:2]
    for k in range(width):
        xa, ya = x0 + k, y0 + k
        xb, yb = x1 - k, y1 - k
        if xa > xb or ya > yb:
            break
        ya_c, yb_c = max(0, ya), min(h - 1, yb)
        xa_c, xb_c = max(0, xa), min(w - 1, xb)
        if 0 <= ya < h:
            img[ya, xa_c : xb_c + 1] = value
        if 0 <= yb < h:
            img[yb, xa_c : xb_c + 1] = value
        if 0 <= xa < w:
            img[ya_c : yb_c + 1, xa] = value
        if 0 <= xb < w:
            img[ya_c : yb_c + 1, xb] = value
