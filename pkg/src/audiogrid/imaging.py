"""Classical image-processing primitives feeding the rectifier.

The contract for binarisation is "foreground = dark ink": charts are dark
lines on light paper, and the adaptive threshold marks a pixel as foreground
when it is darker than its local neighbourhood mean by an offset.  The local
mean uses an integral image, so the window cost is O(1) per pixel and a
global luminance shift cancels out of the comparison.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d

from .validation import check_gray_image


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalised 1D Gaussian kernel with radius ceil(3*sigma)."""
    if not math.isfinite(sigma) or sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float = 1.5) -> np.ndarray:
    """Separable Gaussian blur with reflected borders, uint8 in and out."""
    img = check_gray_image(img)
    k = gaussian_kernel(sigma)
    out = img.astype(np.float64)
    out = correlate1d(out, k, axis=0, mode="reflect")
    out = correlate1d(out, k, axis=1, mode="reflect")
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def _window_means(img: np.ndarray, window: int) -> np.ndarray:
    """Mean over a window x window neighbourhood with reflected borders."""
    r = window // 2
    padded = np.pad(img.astype(np.int64), r, mode="symmetric")
    integral = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    integral[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    h, w = img.shape
    s = integral
    total = (
        s[window:, window:]
        - s[:-window, window:]
        - s[window:, :-window]
        + s[:-window, :-window]
    )
    assert total.shape == (h, w)
    return total / float(window * window)


def adaptive_threshold(img: np.ndarray, window: int = 25, c: float = 10.0) -> np.ndarray:
    """Binarise: foreground (255) where a pixel is darker than local mean - c.

    ``window`` must be odd and >= 3.  Output values are exactly 0 and 255.
    """
    img = check_gray_image(img)
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    means = _window_means(img, window)
    mask = img < (means - c)
    return np.where(mask, 255, 0).astype(np.uint8)


def binarize(img: np.ndarray, sigma: float = 1.5, window: int = 25, c: float = 10.0) -> np.ndarray:
    """Default blur-then-threshold chain used ahead of line extraction."""
    return adaptive_threshold(gaussian_blur(img, sigma), window, c)
