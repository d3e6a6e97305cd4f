"""Seeded dataset generation: sampled audiograms, rendering, distortion.

Each image draws its own child generator from the master seed and its
index, so datasets are reproducible and images can be generated in any
order (or in parallel) without changing the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from .. import serialize
from ..bundles import AnnotationBundle
from ..grid import DEFAULT_GRID, DigitalAudiogram, GridSpec, Mark
from .distort import DistortionParams, distort
from .render import RenderStyle, render_audiogram


@dataclass(frozen=True)
class DistortionRanges:
    """Sampling ranges for per-image distortion parameters."""

    angle: tuple[float, float] = (0.0, 45.0)
    rotation: tuple[float, float] = (-10.0, 10.0)
    lighting_magnitude: tuple[float, float] = (0.0, 0.3)
    noise_sigma: tuple[float, float] = (0.0, 4.0)
    occlusion_count: int = 0
    fold_probability: float = 0.0

    def sample(self, rng: np.random.Generator) -> DistortionParams:
        return DistortionParams(
            camera_angle_deg=float(rng.uniform(*self.angle)),
            rotation_deg=float(rng.uniform(*self.rotation)),
            lighting_direction_deg=float(rng.uniform(0.0, 360.0)),
            lighting_magnitude=float(rng.uniform(*self.lighting_magnitude)),
            noise_sigma=float(rng.uniform(*self.noise_sigma)),
            occlusion_count=self.occlusion_count,
            fold_line=bool(rng.random() < self.fold_probability),
            seed=int(rng.integers(0, 2**31 - 1)),
        )


def sample_audiogram(
    rng: np.random.Generator, grid: GridSpec = DEFAULT_GRID, p_mark: float = 0.9
) -> DigitalAudiogram:
    """Draw marks uniformly over the grid; one ear per audiogram."""
    ear = "left" if rng.random() < 0.5 else "right"
    marks = []
    for f in grid.frequencies:
        if rng.random() < p_mark:
            hl = int(rng.choice(grid.hl_mark_values))
            marks.append(Mark(f, hl, ear))
    return DigitalAudiogram.from_marks(marks, grid)


def generate_samples(
    count: int,
    seed: int,
    style: RenderStyle = RenderStyle(),
    grid: GridSpec = DEFAULT_GRID,
    distortion: DistortionRanges | None = None,
    p_mark: float = 0.9,
) -> Iterator[tuple[np.ndarray, AnnotationBundle]]:
    """Yield ``count`` (image, bundle) pairs, deterministic in ``seed``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        audiogram = sample_audiogram(rng, grid, p_mark)
        img, bundle = render_audiogram(audiogram, style, grid)
        if distortion is not None:
            img, bundle = distort(img, bundle, distortion.sample(rng))
        yield img, bundle


def generate_dataset(
    out_dir: str | Path,
    count: int,
    seed: int,
    style: RenderStyle = RenderStyle(),
    grid: GridSpec = DEFAULT_GRID,
    distortion: DistortionRanges | None = None,
    p_mark: float = 0.9,
) -> dict[str, Any]:
    """Write images + annotation bundles + a manifest; return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    samples = generate_samples(count, seed, style, grid, distortion, p_mark)
    for i, (img, bundle) in enumerate(samples):
        image_name = f"img_{i:04d}.png"
        ann_name = f"ann_{i:04d}.json"
        serialize.save_gray_image(out / image_name, img)
        serialize.save_bundle(out / ann_name, bundle)
        entries.append({"image": image_name, "annotation": ann_name})
    manifest = {"count": count, "seed": seed, "entries": entries}
    serialize.save_manifest(out / "manifest.json", manifest)
    return manifest
