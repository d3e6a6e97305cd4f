"""Progressive probabilistic Hough transform for line-segment extraction.

Foreground pixels are visited in a seeded random order.  Each visited pixel
votes into a (theta, rho) accumulator; when its best bin crosses the vote
threshold the corresponding line is walked in both directions, collecting
the maximal run of foreground pixels whose gaps stay within ``max_gap``.
Walked pixels are consumed: they are erased from the mask, their votes are
retracted, and they are never sampled again, which also deduplicates output
segments.  Runs at least ``min_length`` long are emitted.

The inner loop is compiled with numba; results are deterministic given the
seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import LineSegment
from .validation import check_binary_image


@dataclass(frozen=True)
class HoughParams:
    """Tuning knobs for the segment extractor.

    ``min_length`` of ``None`` resolves to 0.15 x min(image dims) at call
    time.  All quantities are positive; ``theta_deg`` is the angular bin
    width in degrees.
    """

    rho: float = 1.0
    theta_deg: float = 1.0
    threshold: int = 30
    min_length: float | None = None
    max_gap: float = 4.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rho <= 0 or self.theta_deg <= 0 or self.threshold <= 0 or self.max_gap <= 0:
            raise ValueError("hough parameters must be positive")
        if self.min_length is not None and self.min_length <= 0:
            raise ValueError("min_length must be positive")


@njit(cache=True)
def _walk(live, x0, y0, sx, sy, px_off, py_off, max_gap_steps, h, w):
    """Follow the line from (x0, y0) along (sx, sy); return the last hit step.

    A step "hits" when the rounded pixel or one of its two corridor
    neighbours is foreground.  Walking stops once ``max_gap_steps``
    consecutive steps miss or the ray leaves the image.
    """
    last_k = 0
    last_x, last_y = x0, y0
    gap = 0
    k = 0
    fx, fy = float(x0), float(y0)
    while True:
        k += 1
        fx += sx
        fy += sy
        px = int(round(fx))
        py = int(round(fy))
        if px < 0 or px >= w or py < 0 or py >= h:
            break
        hit = live[py, px]
        if not hit:
            qx, qy = px + px_off, py + py_off
            if 0 <= qx < w and 0 <= qy < h and live[qy, qx]:
                hit = True
            else:
                qx, qy = px - px_off, py - py_off
                if 0 <= qx < w and 0 <= qy < h and live[qy, qx]:
                    hit = True
        if hit:
            last_k = k
            last_x, last_y = px, py
            gap = 0
        else:
            gap += 1
            if gap > max_gap_steps:
                break
    return last_k, last_x, last_y


@njit(cache=True)
def _consume(live, voted, acc, cos_t, sin_t, inv_rho, rho_off,
             x0, y0, sx, sy, px_off, py_off, k_neg, k_pos, h, w):
    """Erase the walked corridor and retract accumulator votes."""
    n_theta = cos_t.shape[0]
    for k in range(-k_neg, k_pos + 1):
        px = int(round(x0 + k * sx))
        py = int(round(y0 + k * sy))
        for s in range(-1, 2):
            qx = px + s * px_off
            qy = py + s * py_off
            if qx < 0 or qx >= w or qy < 0 or qy >= h:
                continue
            if not live[qy, qx]:
                continue
            live[qy, qx] = False
            if voted[qy, qx]:
                voted[qy, qx] = False
                for t in range(n_theta):
                    r = int(round((qx * cos_t[t] + qy * sin_t[t]) * inv_rho)) + rho_off
                    acc[t, r] -= 1


@njit(cache=True)
def _ppht_core(live, xs, ys, order, cos_t, sin_t, inv_rho, rho_off, n_rho,
               threshold, min_length, max_gap_steps, out):
    h, w = live.shape
    n_theta = cos_t.shape[0]
    acc = np.zeros((n_theta, n_rho), dtype=np.int32)
    voted = np.zeros((h, w), dtype=np.bool_)
    n_out = 0
    for oi in range(order.shape[0]):
        idx = order[oi]
        x = xs[idx]
        y = ys[idx]
        if not live[y, x]:
            continue
        best_votes = 0
        best_t = 0
        for t in range(n_theta):
            r = int(round((x * cos_t[t] + y * sin_t[t]) * inv_rho)) + rho_off
            acc[t, r] += 1
            if acc[t, r] > best_votes:
                best_votes = acc[t, r]
                best_t = t
        voted[y, x] = True
        if best_votes < threshold:
            continue
        dirx = -sin_t[best_t]
        diry = cos_t[best_t]
        if abs(dirx) >= abs(diry):
            sx = 1.0 if dirx > 0 else -1.0
            sy = diry / abs(dirx)
            px_off, py_off = 0, 1
        else:
            sx = dirx / abs(diry)
            sy = 1.0 if diry > 0 else -1.0
            px_off, py_off = 1, 0
        k_pos, ex2, ey2 = _walk(live, x, y, sx, sy, px_off, py_off, max_gap_steps, h, w)
        k_neg, ex1, ey1 = _walk(live, x, y, -sx, -sy, px_off, py_off, max_gap_steps, h, w)
        _consume(live, voted, acc, cos_t, sin_t, inv_rho, rho_off,
                 x, y, sx, sy, px_off, py_off, k_neg, k_pos, h, w)
        length = math.hypot(float(ex2 - ex1), float(ey2 - ey1))
        if length >= min_length and n_out < out.shape[0]:
            out[n_out, 0] = ex1
            out[n_out, 1] = ey1
            out[n_out, 2] = ex2
            out[n_out, 3] = ey2
            n_out += 1
    return n_out


def hough_segments(mask: np.ndarray, params: HoughParams = HoughParams()) -> list[LineSegment]:
    """Extract line segments from a binary foreground mask.

    Returns an empty list for a blank mask.  Deterministic given
    ``params.seed``.
    """
    mask = check_binary_image(mask)
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        return []
    min_length = params.min_length if params.min_length is not None else 0.15 * min(h, w)

    thetas = np.deg2rad(np.arange(0.0, 180.0, params.theta_deg))
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    diag = math.hypot(h, w)
    rho_off = int(diag / params.rho) + 2
    n_rho = 2 * rho_off + 1

    rng = np.random.default_rng(params.seed)
    order = rng.permutation(xs.size).astype(np.int64)

    live = mask.astype(bool)
    out = np.zeros((4096, 4), dtype=np.float64)
    n_out = _ppht_core(
        live,
        xs.astype(np.int64),
        ys.astype(np.int64),
        order,
        cos_t,
        sin_t,
        1.0 / params.rho,
        rho_off,
        n_rho,
        params.threshold,
        float(min_length),
        int(params.max_gap),
        out,
    )
    return [LineSegment(*out[i]) for i in range(n_out)]
