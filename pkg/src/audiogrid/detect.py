"""Detection sources for the interpreter.

Three producers of classified boxes coexist behind one ``Detection`` type:
external detections JSON (the boundary where trained detectors plug in), a
seeded simulator that perturbs ground truth for robustness tests, and a
built-in normalized-cross-correlation template matcher that works on
rectified synthetic charts.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np
from scipy.ndimage import maximum_filter
from sklearn.base import BaseEstimator, TransformerMixin

from .grid import DEFAULT_GRID, Box, Detection, GridSpec, MarkClass, all_mark_classes
from .synth.style import RenderStyle, glyph_templates
from .validation import check_gray_image

# Re-exported here because this module owns the external-detector boundary.
from .serialize import load_detections, save_detections  # noqa: F401


# -- cropping -----------------------------------------------------------------

@dataclass(frozen=True)
class GramCrop:
    """A cropped gram region plus the offset back into the source image."""

    image: np.ndarray
    offset: tuple[int, int]

    def to_crop_coords(self, box: Box) -> Box:
        ox, oy = self.offset
        return (box[0] - ox, box[1] - oy, box[2] - ox, box[3] - oy)

    def to_source_coords(self, box: Box) -> Box:
        ox, oy = self.offset
        return (box[0] + ox, box[1] + oy, box[2] + ox, box[3] + oy)

    def shift_detections(self, detections: list[Detection]) -> list[Detection]:
        return [
            Detection(d.mark_class, self.to_crop_coords(d.bbox), d.score)
            for d in detections
        ]


def crop_gram(img: np.ndarray, bbox: Box) -> GramCrop:
    """Crop the gram bounding box (expanded to whole pixels) out of ``img``."""
    img = check_gray_image(img)
    h, w = img.shape
    x0, y0 = int(np.floor(bbox[0])), int(np.floor(bbox[1]))
    x1, y1 = int(np.ceil(bbox[2])), int(np.ceil(bbox[3]))
    if x0 < 0 or y0 < 0 or x1 > w or y1 > h:
        raise ValueError(f"bbox {bbox} lies outside the {w}x{h} image")
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"bbox {bbox} is empty")
    return GramCrop(image=img[y0:y1, x0:x1].copy(), offset=(x0, y0))


# -- simulated detector --------------------------------------------------------

@dataclass(frozen=True)
class DetectorNoise:
    """Error model of an imperfect detector.

    Boxes are dropped with ``p_false_negative``; survivors get Gaussian
    centroid jitter (size preserved) and are misclassified with
    ``p_misclass`` (class resampled uniformly over all 24, which may redraw
    the original).  Poisson(``false_positive_rate``) spurious boxes with
    uniform class and position are appended; their scores are drawn in
    [0.5, 1.0) so they survive default score filtering and must be rejected
    by the robust fits downstream.
    """

    jitter_sigma: float = 0.0
    p_misclass: float = 0.0
    p_false_negative: float = 0.0
    false_positive_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_misclass <= 1.0 or not 0.0 <= self.p_false_negative <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        if self.jitter_sigma < 0 or self.false_positive_rate < 0:
            raise ValueError("jitter_sigma and false_positive_rate must be >= 0")


ZERO_NOISE = DetectorNoise()


def simulate_detections(
    ground_truth: list[Detection],
    noise: DetectorNoise = ZERO_NOISE,
    image_size: tuple[int, int] | None = None,
    grid: GridSpec = DEFAULT_GRID,
) -> list[Detection]:
    """Perturb ground-truth boxes per the noise model; deterministic in seed.

    With all-zero noise this is the identity.  ``image_size`` (width,
    height) bounds spurious boxes; without it the ground-truth hull is used.
    """
    rng = np.random.default_rng(noise.seed)
    classes = all_mark_classes(grid)
    out: list[Detection] = []
    for d in ground_truth:
        if rng.random() < noise.p_false_negative:
            continue
        x0, y0, x1, y1 = d.bbox
        if noise.jitter_sigma > 0:
            dx, dy = rng.normal(0.0, noise.jitter_sigma, size=2)
            x0, y0, x1, y1 = x0 + dx, y0 + dy, x1 + dx, y1 + dy
        cls = d.mark_class
        if noise.p_misclass > 0 and rng.random() < noise.p_misclass:
            cls = classes[int(rng.integers(len(classes)))]
        out.append(Detection(cls, (x0, y0, x1, y1), d.score))

    n_spurious = int(rng.poisson(noise.false_positive_rate))
    if n_spurious:
        if image_size is not None:
            bx0, by0, bx1, by1 = 0.0, 0.0, float(image_size[0]), float(image_size[1])
        elif ground_truth:
            boxes = np.array([d.bbox for d in ground_truth])
            bx0, by0 = boxes[:, 0].min(), boxes[:, 1].min()
            bx1, by1 = boxes[:, 2].max(), boxes[:, 3].max()
        else:
            bx0, by0, bx1, by1 = 0.0, 0.0, 100.0, 100.0
        sizes = (
            [(d.width, d.height) for d in ground_truth] if ground_truth else [(12.0, 12.0)]
        )
        for _ in range(n_spurious):
            cls = classes[int(rng.integers(len(classes)))]
            sw, sh = sizes[int(rng.integers(len(sizes)))]
            cx = rng.uniform(bx0 + sw / 2, max(bx1 - sw / 2, bx0 + sw / 2 + 1e-6))
            cy = rng.uniform(by0 + sh / 2, max(by1 - sh / 2, by0 + sh / 2 + 1e-6))
            score = float(rng.uniform(0.5, 1.0))
            out.append(
                Detection(cls, (cx - sw / 2, cy - sh / 2, cx + sw / 2, cy + sh / 2), score)
            )
    return out


# -- template matching ---------------------------------------------------------

def box_iou(a: Box, b: Box) -> float:
    ix0, iy0 = max(a[0], b[0]), max(a[1], b[1])
    ix1, iy1 = min(a[2], b[2]), min(a[3], b[3])
    if ix0 >= ix1 or iy0 >= iy1:
        return 0.0
    inter = (ix1 - ix0) * (iy1 - iy0)
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    return inter / (area_a + area_b - inter)


def _containment(a: Box, b: Box) -> float:
    ix0, iy0 = max(a[0], b[0]), max(a[1], b[1])
    ix1, iy1 = min(a[2], b[2]), min(a[3], b[3])
    if ix0 >= ix1 or iy0 >= iy1:
        return 0.0
    inter = (ix1 - ix0) * (iy1 - iy0)
    smaller = min((a[2] - a[0]) * (a[3] - a[1]), (b[2] - b[0]) * (b[3] - b[1]))
    return inter / smaller


def greedy_nms(
    candidates: list[Detection], iou_threshold: float = 0.3, containment_threshold: float = 0.7
) -> list[Detection]:
    """Keep highest-scoring boxes; drop overlaps and near-contained boxes.

    The containment rule rejects a short label string matching inside a
    longer one (e.g. the "10" of "1000"), which plain IoU at 0.3 does not
    always catch.
    """
    ranked = sorted(enumerate(candidates), key=lambda t: (-t[1].score, t[0]))
    kept: list[Detection] = []
    for _, cand in ranked:
        ok = True
        for k in kept:
            if (
                box_iou(cand.bbox, k.bbox) > iou_threshold
                or _containment(cand.bbox, k.bbox) > containment_threshold
            ):
                ok = False
                break
        if ok:
            kept.append(cand)
    return kept


def _match_one(img: np.ndarray, tmpl: np.ndarray, cls: MarkClass, threshold: float):
    if tmpl.shape[0] >= img.shape[0] or tmpl.shape[1] >= img.shape[1]:
        return []
    res = cv2.matchTemplate(img, tmpl, cv2.TM_CCOEFF_NORMED)
    peaks = (res >= threshold) & (res == maximum_filter(res, size=5))
    ys, xs = np.nonzero(peaks)
    th, tw = tmpl.shape
    return [
        Detection(
            cls,
            (float(x), float(y), float(x + tw), float(y + th)),
            float(min(res[y, x], 1.0)),
        )
        for y, x in zip(ys, xs)
    ]


def template_detect(
    img: np.ndarray,
    templates: dict[MarkClass, np.ndarray],
    threshold: float = 0.8,
    nms_iou: float = 0.3,
    scales: tuple[float, ...] = (1.0,),
) -> list[Detection]:
    """Detect glyphs by normalized cross-correlation against templates.

    Meant for rectified images: correlation is not perspective (or scale)
    invariant, so pass extra ``scales`` when the rectified chart may differ
    in size from the render style.  Peaks above ``threshold`` go through
    greedy non-maximum suppression, marks and labels pooled separately.
    """
    img = check_gray_image(img)
    mark_cands: list[Detection] = []
    label_cands: list[Detection] = []
    for cls, tmpl in templates.items():
        for s in scales:
            if s == 1.0:
                t = tmpl
            else:
                interp = cv2.INTER_AREA if s < 1.0 else cv2.INTER_LINEAR
                t = cv2.resize(tmpl, None, fx=s, fy=s, interpolation=interp)
            found = _match_one(img, t, cls, threshold)
            if cls.is_mark:
                mark_cands.extend(found)
            else:
                label_cands.extend(found)
    return greedy_nms(mark_cands, nms_iou) + greedy_nms(label_cands, nms_iou)


def detection_recall_precision(
    predicted: list[Detection],
    ground_truth: list[Detection],
    iou_threshold: float = 0.5,
    marks_only: bool = False,
) -> tuple[float | None, float | None]:
    """Greedy matching at an IoU threshold with class equality required."""
    if marks_only:
        predicted = [d for d in predicted if d.mark_class.is_mark]
        ground_truth = [d for d in ground_truth if d.mark_class.is_mark]
    unmatched = list(range(len(ground_truth)))
    correct = 0
    for p in sorted(predicted, key=lambda d: -d.score):
        best_j, best_iou = None, iou_threshold
        for j in unmatched:
            g = ground_truth[j]
            if g.mark_class != p.mark_class:
                continue
            v = box_iou(p.bbox, g.bbox)
            if v >= best_iou:
                best_j, best_iou = j, v
        if best_j is not None:
            unmatched.remove(best_j)
            correct += 1
    recall = correct / len(ground_truth) if ground_truth else None
    precision = correct / len(predicted) if predicted else None
    return recall, precision


# -- sklearn-style wrappers ------------------------------------------------------

class TemplateDetector(BaseEstimator):
    """Template-matching detector bound to a render style.

    ``fit`` is stateless (templates derive from the style parameters);
    ``predict`` returns the detections for one rectified grayscale image.
    """

    def __init__(self, style=RenderStyle(), threshold=0.8, nms_iou=0.3,
                 scales=(1.0,), template_pad=4):
        self.style = style
        self.threshold = threshold
        self.nms_iou = nms_iou
        self.scales = scales
        self.template_pad = template_pad

    def fit(self, X=None, y=None):
        self.templates_ = glyph_templates(self.style, pad=self.template_pad)
        return self

    def predict(self, X) -> list[Detection]:
        if not hasattr(self, "templates_"):
            self.fit()
        return template_detect(
            np.asarray(X), self.templates_, self.threshold, self.nms_iou,
            tuple(self.scales),
        )


class DetectionSimulator(BaseEstimator, TransformerMixin):
    """Applies a ``DetectorNoise`` model to ground-truth detections."""

    def __init__(self, jitter_sigma=0.0, p_misclass=0.0, p_false_negative=0.0,
                 false_positive_rate=0.0, seed=0, image_size=None):
        self.jitter_sigma = jitter_sigma
        self.p_misclass = p_misclass
        self.p_false_negative = p_false_negative
        self.false_positive_rate = false_positive_rate
        self.seed = seed
        self.image_size = image_size

    def fit(self, X=None, y=None):
        return self

    def transform(self, X: list[Detection]) -> list[Detection]:
        noise = DetectorNoise(
            jitter_sigma=self.jitter_sigma,
            p_misclass=self.p_misclass,
            p_false_negative=self.p_false_negative,
            false_positive_rate=self.false_positive_rate,
            seed=self.seed,
        )
        return simulate_detections(list(X), noise, self.image_size)
