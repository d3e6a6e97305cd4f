"""audiogrid: recover hearing-level data from photographed audiogram charts.

The pipeline crops the gram region, removes perspective distortion
(vanishing-point estimation over detected gridlines, or four-point
rectification of a chart-region polygon), detects marks and tick labels,
and interprets the detections into (frequency, hearing level) tuples on
the audiogram grid.  A deterministic synthetic generator provides images
with exact ground truth for benchmarking.
"""

from .bundles import AnnotationBundle
from .detect import (
    DetectionSimulator,
    DetectorNoise,
    TemplateDetector,
    crop_gram,
    simulate_detections,
    template_detect,
)
from .errors import (
    AudiogridError,
    DegenerateGeometryError,
    InsufficientDataError,
    InterpretationError,
    LayoutError,
    QuadApproximationError,
    RectificationError,
    SchemaError,
)
from .geometry import (
    Homography,
    Line,
    LineSegment,
    Point,
    apply_homography,
    homography_from_correspondences,
    transform_points,
)
from .grid import (
    DEFAULT_GRID,
    Detection,
    DigitalAudiogram,
    GridSpec,
    Mark,
    MarkClass,
    all_mark_classes,
    snap_to_grid,
)
from .hough import HoughParams, hough_segments
from .imaging import adaptive_threshold, binarize, gaussian_blur
from .interpret import (
    AudiogramInterpreter,
    AxisFit,
    Calibration,
    InterpretConfig,
    ProjectedMark,
    fit_axis,
    fit_calibration,
    group_labels,
    interpret,
    project_marks,
)
from .metrics import EvalReport, compute_metrics, match_marks
from .overlay import render_overlay
from .pipeline import PipelineConfig, process_image, run_on_manifest, run_on_pairs
from .rectify import (
    LineRectifier,
    Quadrilateral,
    QuadRectifier,
    VanishingPointModel,
    approx_quadrilateral,
    douglas_peucker,
    estimate_rectification_from_lines,
    fit_to_canvas,
    homography_from_vanishing_points,
    ransac_vanishing_point,
    rectify_from_quad,
    vote,
    warp_image,
)
from .synth import (
    DistortionParams,
    DistortionRanges,
    RenderStyle,
    distort,
    generate_dataset,
    generate_samples,
    render_audiogram,
)

__version__ = "0.1.0"
