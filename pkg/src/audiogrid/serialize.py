"""JSON schemas for everything that crosses the process boundary.

Detections JSON is the plug-in surface for external detectors::

    [{"class": "mark_left", "bbox": [x0, y0, x1, y1], "score": 0.9}, ...]

Annotation bundles, audiograms, dataset manifests and evaluation reports
all have fixed shapes validated on load; malformed input raises
``SchemaError`` naming the offending record.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import cv2
import numpy as np

from .bundles import AnnotationBundle
from .errors import SchemaError
from .geometry import Homography
from .grid import Detection, DigitalAudiogram, Mark, MarkClass


# -- detections ---------------------------------------------------------------

def detection_to_dict(d: Detection) -> dict[str, Any]:
    return {"class": d.mark_class.name, "bbox": list(d.bbox), "score": d.score}


def detections_from_obj(data: Any, where: str = "detections") -> list[Detection]:
    if not isinstance(data, list):
        raise SchemaError(f"{where}: expected a JSON array")
    out: list[Detection] = []
    for i, rec in enumerate(data):
        try:
            if not isinstance(rec, dict):
                raise ValueError("record must be an object")
            cls = MarkClass.from_name(rec["class"])
            bbox = rec["bbox"]
            if not (isinstance(bbox, list) and len(bbox) == 4):
                raise ValueError("bbox must be a 4-element array")
            score = float(rec.get("score", 1.0))
            out.append(Detection(cls, tuple(float(v) for v in bbox), score))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"{where}: record {i}: {exc}") from exc
    return out


def save_detections(path: str | Path, detections: list[Detection]) -> None:
    Path(path).write_text(
        json.dumps([detection_to_dict(d) for d in detections], indent=2)
    )


def load_detections(path: str | Path) -> list[Detection]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return detections_from_obj(data, where=str(path))


# -- audiograms ---------------------------------------------------------------

def audiogram_to_dict(g: DigitalAudiogram) -> dict[str, Any]:
    return {
        "marks": [
            {"frequency": m.frequency, "hl": m.hl, "ear": m.ear}
            for m in g.sorted_marks()
        ]
    }


def audiogram_from_obj(data: Any, where: str = "audiogram") -> DigitalAudiogram:
    try:
        if isinstance(data, dict) and "marks" in data:
            records = data["marks"]
        else:
            raise ValueError('expected an object with a "marks" array')
        marks = []
        for i, r in enumerate(records):
            try:
                if isinstance(r, dict):
                    marks.append(Mark(int(r["frequency"]), int(r["hl"]), r.get("ear", "left")))
                else:
                    f, hl, ear = r
                    marks.append(Mark(int(f), int(hl), ear))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"mark {i}: {exc}") from exc
        return DigitalAudiogram.from_marks(marks)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def save_audiogram(path: str | Path, g: DigitalAudiogram) -> None:
    Path(path).write_text(json.dumps(audiogram_to_dict(g), indent=2))


def load_audiogram(path: str | Path) -> DigitalAudiogram:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return audiogram_from_obj(data, where=str(path))


# -- interpretations (audiogram + diagnostics) --------------------------------

def interpretation_to_dict(g: DigitalAudiogram, diagnostics=None) -> dict[str, Any]:
    out = audiogram_to_dict(g)
    if diagnostics is not None:
        out["diagnostics"] = diagnostics.to_dict()
    return out


def interpretation_from_obj(data: Any, where: str = "interpretation"):
    """Parse an interpretation JSON into (audiogram, diagnostics-or-None)."""
    from .interpret import AxisFit, Calibration, Diagnostics, MarkEstimate
    from .geometry import Line

    g = audiogram_from_obj(data, where)
    diag_data = data.get("diagnostics") if isinstance(data, dict) else None
    if diag_data is None:
        return g, None
    try:
        def axis(d):
            return AxisFit(
                line=Line(*(float(v) for v in d["line"])),
                inlier_indices=tuple(int(i) for i in d["inliers"]),
                low_support=bool(d["low_support"]),
            )

        def cal(d):
            return Calibration(
                float(d["slope"]), float(d["intercept"]), d["space"], int(d["inliers"])
            )

        estimates = tuple(
            MarkEstimate(
                int(e["detection"]),
                float(e["raw"][0]),
                float(e["raw"][1]),
                Mark(int(e["snapped"][0]), int(e["snapped"][1]), e["snapped"][2]),
            )
            for e in diag_data["estimates"]
        )
        diag = Diagnostics(
            freq_axis=axis(diag_data["freq_axis"]),
            hl_axis=axis(diag_data["hl_axis"]),
            g_f=cal(diag_data["g_f"]),
            g_l=cal(diag_data["g_l"]),
            origin=(float(diag_data["origin"][0]), float(diag_data["origin"][1])),
            estimates=estimates,
            warnings=tuple(diag_data.get("warnings", ())),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"{where}.diagnostics: {exc}") from exc
    return g, diag


def save_interpretation(path: str | Path, g: DigitalAudiogram, diagnostics=None) -> None:
    Path(path).write_text(json.dumps(interpretation_to_dict(g, diagnostics), indent=2))


def load_interpretation(path: str | Path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return interpretation_from_obj(data, where=str(path))


# -- annotation bundles -------------------------------------------------------

def bundle_to_dict(b: AnnotationBundle) -> dict[str, Any]:
    out: dict[str, Any] = {
        "level1": [[m.frequency, m.hl, m.ear] for m in b.level1.sorted_marks()],
        "level2": list(b.level2),
        "level3": [[x, y] for x, y in b.level3],
        "level4": [detection_to_dict(d) for d in b.level4],
    }
    if b.true_homography is not None:
        out["homography"] = b.true_homography.matrix.tolist()
    return out


def bundle_from_obj(data: Any, where: str = "bundle") -> AnnotationBundle:
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    try:
        level1 = audiogram_from_obj({"marks": data["level1"]}, where=f"{where}.level1")
        level2 = tuple(float(v) for v in data["level2"])
        if len(level2) != 4:
            raise ValueError("level2 must have 4 numbers")
        level3 = tuple((float(x), float(y)) for x, y in data["level3"])
        level4 = tuple(detections_from_obj(data["level4"], where=f"{where}.level4"))
        hom = None
        if data.get("homography") is not None:
            m = np.asarray(data["homography"], dtype=float)
            hom = Homography(m, provenance="ground_truth")
        return AnnotationBundle(level1, level2, level3, level4, hom)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def save_bundle(path: str | Path, b: AnnotationBundle) -> None:
    Path(path).write_text(json.dumps(bundle_to_dict(b), indent=2))


def load_bundle(path: str | Path) -> AnnotationBundle:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return bundle_from_obj(data, where=str(path))


# -- polygons -----------------------------------------------------------------

def load_polygon(path: str | Path) -> np.ndarray:
    """Load a chart-region polygon: a JSON array of [x, y] pairs."""
    try:
        data = json.loads(Path(path).read_text())
        pts = np.asarray(data, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise ValueError("expected an array of at least 3 [x, y] pairs")
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return pts


# -- manifests ----------------------------------------------------------------

def save_manifest(path: str | Path, manifest: dict[str, Any]) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True))


def load_manifest(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict) or "entries" not in data:
            raise ValueError('expected an object with an "entries" array')
        for i, e in enumerate(data["entries"]):
            if "image" not in e or "annotation" not in e:
                raise ValueError(f'entry {i}: needs "image" and "annotation"')
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return data


# -- images -------------------------------------------------------------------

def save_gray_image(path: str | Path, img: np.ndarray) -> None:
    if not cv2.imwrite(str(path), img):
        raise OSError(f"could not write image {path}")


def load_gray_image(path: str | Path) -> np.ndarray:
    img = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if img is None:
        raise OSError(f"could not read image {path}")
    return img
