"""Synthetic audiogram rendering with exact ground truth."""

from .dataset import DistortionRanges, generate_dataset, generate_samples, sample_audiogram
from .distort import DistortionParams, distort, round_polygon_corners, synth_homography
from .font import render_text
from .render import ChartGeometry, render_audiogram
from .style import RenderStyle, glyph_templates, mark_glyph_mask

__all__ = [
    "ChartGeometry",
    "DistortionParams",
    "DistortionRanges",
    "RenderStyle",
    "distort",
    "generate_dataset",
    "generate_samples",
    "glyph_templates",
    "mark_glyph_mask",
    "render_audiogram",
    "render_text",
    "round_polygon_corners",
    "sample_audiogram",
    "synth_homography",
]
