"""End-to-end composition: crop, rectify, detect, interpret, evaluate.

Each image draws its stage seeds from the run seed and its index, so whole
runs are reproducible.  Stage failures are recorded per image and fall back
gracefully (identity rectification, empty prediction) instead of aborting
the run.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Literal

import numpy as np

from . import serialize
from .bundles import AnnotationBundle
from .detect import (
    DetectorNoise,
    ZERO_NOISE,
    crop_gram,
    simulate_detections,
    template_detect,
)
from .errors import (
    DegenerateGeometryError,
    InsufficientDataError,
    InterpretationError,
    RectificationError,
)
from .geometry import Homography, transform_box_hull
from .grid import DEFAULT_GRID, Detection, DigitalAudiogram, GridSpec
from .interpret import Diagnostics, InterpretConfig, interpret
from .metrics import EvalReport, compute_metrics
from .rectify import (
    approx_quadrilateral,
    estimate_rectification_from_lines,
    fit_to_canvas,
    rectify_from_quad,
    warp_image,
)
from .synth.distort import round_polygon_corners
from .synth.style import RenderStyle, glyph_templates

RectifyMethod = Literal["lines", "quad", "none"]
DetectMethod = Literal["template", "simulate"]


@dataclass(frozen=True)
class PipelineConfig:
    rectify: RectifyMethod = "lines"
    detect: DetectMethod = "simulate"
    noise: DetectorNoise | None = None
    interpret_config: InterpretConfig = InterpretConfig()
    style: RenderStyle = RenderStyle()
    template_threshold: float = 0.8
    template_scales: tuple[float, ...] = (0.7, 0.85, 1.0, 1.2)
    quad_round_radius: float | None = None
    grid: GridSpec = DEFAULT_GRID
    seed: int = 0

    def echo(self) -> dict[str, Any]:
        return {
            "rectify": self.rectify,
            "detect": self.detect,
            "seed": self.seed,
            "noise": dataclasses.asdict(self.noise) if self.noise else None,
            "projection": self.interpret_config.projection,
        }


@dataclass
class ImageResult:
    index: int
    prediction: DigitalAudiogram
    ground_truth: DigitalAudiogram
    homography: Homography | None
    diagnostics: Diagnostics | None
    detections: list[Detection]
    rectification_failed: bool = False
    interpretation_failed: bool = False
    warnings: tuple[str, ...] = ()


def _estimate_homography(
    crop_img: np.ndarray,
    level3: np.ndarray,
    config: PipelineConfig,
    seed: int,
) -> tuple[Homography, bool, list[str]]:
    size = (crop_img.shape[1], crop_img.shape[0])
    if config.rectify == "none":
        return Homography.identity(), False, []
    try:
        if config.rectify == "lines":
            h = estimate_rectification_from_lines(crop_img, seed=seed)
        elif config.rectify == "quad":
            polygon = level3
            if config.quad_round_radius:
                polygon = round_polygon_corners(polygon, config.quad_round_radius)
            quad = approx_quadrilateral(polygon)
            h = rectify_from_quad(quad)
        else:
            raise ValueError(f"unknown rectify method {config.rectify!r}")
        return fit_to_canvas(h, size), False, []
    except (RectificationError, DegenerateGeometryError) as exc:
        return (
            Homography.identity(),
            True,
            [f"rectification failed, using identity: {exc}"],
        )


def process_image(
    img: np.ndarray,
    bundle: AnnotationBundle,
    config: PipelineConfig,
    index: int = 0,
    templates: dict | None = None,
) -> ImageResult:
    rng = np.random.default_rng([config.seed, index])
    rect_seed, noise_seed, interp_seed = (int(v) for v in rng.integers(0, 2**31 - 1, 3))

    crop = crop_gram(img, bundle.level2)
    level4_crop = crop.shift_detections(list(bundle.level4))
    level3_crop = np.asarray(bundle.level3, dtype=float) - np.asarray(crop.offset)

    h, rect_failed, warnings = _estimate_homography(
        crop.image, level3_crop, config, rect_seed
    )

    if config.detect == "simulate":
        mapped = [
            Detection(d.mark_class, transform_box_hull(h, d.bbox), d.score)
            for d in level4_crop
        ]
        noise = config.noise or ZERO_NOISE
        noise = dataclasses.replace(noise, seed=noise_seed)
        size = (crop.image.shape[1], crop.image.shape[0])
        detections = simulate_detections(mapped, noise, image_size=size, grid=config.grid)
    elif config.detect == "template":
        warped = warp_image(crop.image, h)
        if templates is None:
            templates = glyph_templates(config.style, config.grid)
        detections = template_detect(
            warped, templates, config.template_threshold,
            scales=config.template_scales,
        )
    else:
        raise ValueError(f"unknown detect method {config.detect!r}")

    prediction = DigitalAudiogram()
    diagnostics = None
    interp_failed = False
    try:
        icfg = dataclasses.replace(config.interpret_config, seed=interp_seed)
        prediction, diagnostics = interpret(detections, config.grid, icfg)
        warnings.extend(diagnostics.warnings)
    except (InterpretationError, DegenerateGeometryError, InsufficientDataError) as exc:
        interp_failed = True
        warnings.append(f"interpretation failed: {exc}")

    return ImageResult(
        index=index,
        prediction=prediction,
        ground_truth=bundle.level1,
        homography=h,
        diagnostics=diagnostics,
        detections=detections,
        rectification_failed=rect_failed,
        interpretation_failed=interp_failed,
        warnings=tuple(warnings),
    )


def run_on_pairs(
    pairs: Iterable[tuple[np.ndarray, AnnotationBundle]],
    config: PipelineConfig = PipelineConfig(),
) -> tuple[EvalReport, list[ImageResult]]:
    """Process (image, bundle) pairs and pool their metrics."""
    templates = None
    if config.detect == "template":
        templates = glyph_templates(config.style, config.grid)
    results = [
        process_image(img, bundle, config, i, templates)
        for i, (img, bundle) in enumerate(pairs)
    ]
    report = compute_metrics(
        [(r.prediction, r.ground_truth) for r in results], config.echo()
    )
    return report, results


def run_on_manifest(
    manifest_path: str | Path,
    config: PipelineConfig = PipelineConfig(),
) -> tuple[EvalReport, list[ImageResult], list[str]]:
    """Run the pipeline over a generated dataset manifest.

    Returns the report, per-image results and the annotation file stems
    (useful for writing per-image predictions).
    """
    manifest_path = Path(manifest_path)
    manifest = serialize.load_manifest(manifest_path)
    base = manifest_path.parent

    def load_pairs():
        for entry in manifest["entries"]:
            img = serialize.load_gray_image(base / entry["image"])
            bundle = serialize.load_bundle(base / entry["annotation"])
            yield img, bundle

    report, results = run_on_pairs(load_pairs(), config)
    stems = [Path(e["annotation"]).stem for e in manifest["entries"]]
    return report, results, stems
