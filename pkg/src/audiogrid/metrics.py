"""Dataset-level accuracy metrics for predicted audiograms.

Predictions and ground truth are matched by (ear, frequency): audiograms
carry at most one mark per frequency per ear, so the key is unambiguous.
"correct" means the matched pair also agrees exactly in hearing level; the
+/-5 dB variant accepts one half-step of error, the smallest possible since
hearing levels are multiples of 5.  Rates are micro-averaged (pooled counts
over all marks in the dataset); per-image rates ride along in the
breakdown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .grid import DigitalAudiogram, Mark


@dataclass(frozen=True)
class MarkMatching:
    """Pairs matched by (ear, frequency) plus both sides' leftovers."""

    pairs: tuple[tuple[Mark, Mark], ...]  # (predicted, ground truth)
    unmatched_pred: tuple[Mark, ...]
    unmatched_gt: tuple[Mark, ...]


def match_marks(pred: DigitalAudiogram, gt: DigitalAudiogram) -> MarkMatching:
    """Match predictions to ground truth by (ear, frequency) equality."""
    gt_by_key = {(m.ear, m.frequency): m for m in gt.marks}
    pairs = []
    unmatched_pred = []
    used = set()
    for p in pred.sorted_marks():
        key = (p.ear, p.frequency)
        if key in gt_by_key:
            pairs.append((p, gt_by_key[key]))
            used.add(key)
        else:
            unmatched_pred.append(p)
    unmatched_gt = tuple(
        m for m in gt.sorted_marks() if (m.ear, m.frequency) not in used
    )
    return MarkMatching(tuple(pairs), tuple(unmatched_pred), unmatched_gt)


def _rate(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


@dataclass(frozen=True)
class _Counts:
    n_gt: int = 0
    n_pred: int = 0
    n_freq: int = 0  # matched by (ear, frequency)
    n_exact: int = 0  # matched and HL equal
    n_pm5: int = 0  # matched and |HL error| <= 5

    def add(self, matching: MarkMatching) -> "_Counts":
        exact = sum(1 for p, g in matching.pairs if p.hl == g.hl)
        pm5 = sum(1 for p, g in matching.pairs if abs(p.hl - g.hl) <= 5)
        return _Counts(
            self.n_gt + len(matching.pairs) + len(matching.unmatched_gt),
            self.n_pred + len(matching.pairs) + len(matching.unmatched_pred),
            self.n_freq + len(matching.pairs),
            self.n_exact + exact,
            self.n_pm5 + pm5,
        )

    def rates(self) -> dict[str, float | None]:
        return {
            "recall": _rate(self.n_exact, self.n_gt),
            "precision": _rate(self.n_exact, self.n_pred),
            "frequency_recall": _rate(self.n_freq, self.n_gt),
            "frequency_precision": _rate(self.n_freq, self.n_pred),
            "hl_recall": _rate(self.n_exact, self.n_gt),
            "hl_precision": _rate(self.n_exact, self.n_pred),
            "pm5_recall": _rate(self.n_pm5, self.n_gt),
            "pm5_precision": _rate(self.n_pm5, self.n_pred),
        }


@dataclass(frozen=True)
class EvalReport:
    """Micro-averaged rates, pooled counts and a per-image breakdown.

    Undefined rates (empty denominator) are ``None`` rather than zero.
    """

    recall: float | None
    precision: float | None
    frequency_recall: float | None
    frequency_precision: float | None
    hl_recall: float | None
    hl_precision: float | None
    pm5_recall: float | None
    pm5_precision: float | None
    n_images: int
    n_gt: int
    n_pred: int
    per_image: tuple[dict[str, Any], ...] = ()
    config: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "averaging": "micro (pooled counts over all marks)",
            "recall": self.recall,
            "precision": self.precision,
            "frequency_recall": self.frequency_recall,
            "frequency_precision": self.frequency_precision,
            "hl_recall": self.hl_recall,
            "hl_precision": self.hl_precision,
            "pm5_recall": self.pm5_recall,
            "pm5_precision": self.pm5_precision,
            "n_images": self.n_images,
            "n_gt_marks": self.n_gt,
            "n_predicted_marks": self.n_pred,
            "per_image": list(self.per_image),
            "config": self.config,
        }


def compute_metrics(
    pairs: Sequence[tuple[DigitalAudiogram, DigitalAudiogram]],
    config: dict[str, Any] | None = None,
) -> EvalReport:
    """Metrics over (predicted, ground truth) audiogram pairs, one per image."""
    if not pairs:
        raise ValueError("compute_metrics needs at least one image")
    total = _Counts()
    per_image = []
    for i, (pred, gt) in enumerate(pairs):
        matching = match_marks(pred, gt)
        counts = _Counts().add(matching)
        total = total.add(matching)
        per_image.append(
            {
                "index": i,
                "n_gt": counts.n_gt,
                "n_pred": counts.n_pred,
                **counts.rates(),
            }
        )
    rates = total.rates()
    return EvalReport(
        recall=rates["recall"],
        precision=rates["precision"],
        frequency_recall=rates["frequency_recall"],
        frequency_precision=rates["frequency_precision"],
        hl_recall=rates["hl_recall"],
        hl_precision=rates["hl_precision"],
        pm5_recall=rates["pm5_recall"],
        pm5_precision=rates["pm5_precision"],
        n_images=len(pairs),
        n_gt=total.n_gt,
        n_pred=total.n_pred,
        per_image=tuple(per_image),
        config=dict(config or {}),
    )
