"""Embedded 5x7 bitmap glyphs for digits and the minus sign.

A fixed pixel font keeps rendering byte-identical across platforms and
gives the template matcher exact glyph images to correlate against.
"""

from __future__ import annotations

import numpy as np

_GLYPH_ROWS = {
    "0": (
        ".###.",
        "#...#",
        "#..##",
        "#.#.#",
        "##..#",
        "#...#",
        ".###.",
    ),
    "1": (
        "..#..",
        ".##..",
        "..#..",
        "..#..",
        "..#..",
        "..#..",
        ".###.",
    ),
    "2": (
        ".###.",
        "#...#",
        "....#",
        "...#.",
        "..#..",
        ".#...",
        "#####",
    ),
    "3": (
        "#####",
        "...#.",
        "..#..",
        "...#.",
        "....#",
        "#...#",
        ".###.",
    ),
    "4": (
        "...#.",
        "..##.",
        ".#.#.",
        "#..#.",
        "#####",
        "...#.",
        "...#.",
    ),
    "5": (
        "#####",
        "#....",
        "####.",
        "....#",
        "....#",
        "#...#",
        ".###.",
    ),
    "6": (
        "..##.",
        ".#...",
        "#....",
        "####.",
        "#...#",
        "#...#",
        ".###.",
    ),
    "7": (
        "#####",
        "....#",
        "...#.",
        "..#..",
        ".#...",
        ".#...",
        ".#...",
    ),
    "8": (
        ".###.",
        "#...#",
        "#...#",
        ".###.",
        "#...#",
        "#...#",
        ".###.",
    ),
    "9": (
        ".###.",
        "#...#",
        "#...#",
        ".####",
        "....#",
        "...#.",
        ".##..",
    ),
    "-": (
        ".....",
        ".....",
        ".....",
        "#####",
        ".....",
        ".....",
        ".....",
    ),
}

GLYPH_HEIGHT = 7
GLYPH_WIDTH = 5
GLYPH_SPACING = 1

GLYPHS: dict[str, np.ndarray] = {
    ch: np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    for ch, rows in _GLYPH_ROWS.items()
}


def render_text(text: str, scale: int = 2) -> np.ndarray:
    """Rasterise ``text`` into a boolean ink mask at integer ``scale``."""
    if scale < 1:
        raise ValueError("scale must be >= 1")
    if not text:
        raise ValueError("text must be non-empty")
    columns: list[np.ndarray] = []
    for i, ch in enumerate(text):
        if ch not in GLYPHS:
            raise ValueError(f"no glyph for character {ch!r}")
        if i > 0:
            columns.append(np.zeros((GLYPH_HEIGHT, GLYPH_SPACING), dtype=bool))
        columns.append(GLYPHS[ch])
    mask = np.hstack(columns)
    if scale > 1:
        mask = np.kron(mask, np.ones((scale, scale), dtype=bool))
    return mask
