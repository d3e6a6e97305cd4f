"""Input validation helpers for image and geometry arguments.

Images are plain numpy arrays throughout the package: a grayscale image is a
2D uint8 array, a binary mask is a 2D uint8 array whose values are exactly
0 (background) and 255 (foreground ink).
"""

from __future__ import annotations

import numpy as np


def check_gray_image(img: np.ndarray, name: str = "img") -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2D grayscale array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if arr.dtype != np.uint8:
        raise ValueError(f"{name} must have dtype uint8, got {arr.dtype}")
    return arr


def check_binary_image(img: np.ndarray, name: str = "mask") -> np.ndarray:
    arr = check_gray_image(img, name)
    bad = ~np.isin(arr, (0, 255))
    if bad.any():
        raise ValueError(f"{name} must contain only 0 and 255")
    return arr


def check_points(pts, min_points: int = 1, name: str = "points") -> np.ndarray:
    """Coerce a point sequence to an (N, 2) float array."""
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must be an (N, 2) array, got shape {arr.shape}")
    if arr.shape[0] < min_points:
        raise ValueError(f"{name} needs at least {min_points} points, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr
