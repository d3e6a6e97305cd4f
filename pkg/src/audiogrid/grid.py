"""The audiogram value grid and the domain types built on top of it.

An audiogram carries marks only at a small finite set of coordinates:
octave frequencies on a log-scaled x axis and hearing levels in 5 dB steps
on a linear y axis.  Everything downstream exploits that finiteness, so the
grid definition lives here together with nearest-neighbour snapping and the
detection classes (two mark shapes plus one class per tick label, 24 in
total).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

Ear = Literal["left", "right"]

ClassKind = Literal["mark_left", "mark_right", "hl_tick", "freq_tick"]


@dataclass(frozen=True)
class GridSpec:
    """Sample spaces of an audiogram: frequencies, HL ticks and HL mark values.

    Frequency ticks are octaves from 125 Hz to 16 kHz.  Hearing-level tick
    labels step by 10 dB while marks may sit on 5 dB half-steps, so the mark
    sample space is twice as dense as the label space.  Frequencies and HL
    tick values share no common value; label grouping relies on that.
    """

    frequencies: tuple[int, ...] = (125, 250, 500, 1000, 2000, 4000, 8000, 16000)
    hl_ticks: tuple[int, ...] = tuple(range(-10, 121, 10))
    hl_mark_values: tuple[int, ...] = tuple(range(-10, 121, 5))

    def __post_init__(self) -> None:
        if list(self.frequencies) != sorted(set(self.frequencies)):
            raise ValueError("frequencies must be strictly increasing")
        if list(self.hl_ticks) != sorted(set(self.hl_ticks)):
            raise ValueError("hl_ticks must be strictly increasing")
        if list(self.hl_mark_values) != sorted(set(self.hl_mark_values)):
            raise ValueError("hl_mark_values must be strictly increasing")
        if set(self.frequencies) & set(self.hl_ticks):
            raise ValueError("frequencies and hl_ticks must be disjoint")
        if not set(self.hl_ticks) <= set(self.hl_mark_values):
            raise ValueError("hl_ticks must be a subset of hl_mark_values")

    @property
    def log2_frequencies(self) -> tuple[float, ...]:
        return tuple(math.log2(f) for f in self.frequencies)


DEFAULT_GRID = GridSpec()


def snap_to_grid(
    frequency: float, hl: float, grid: GridSpec = DEFAULT_GRID
) -> tuple[int, int]:
    """Map a real-valued (frequency, hearing level) estimate to the grid.

    Frequency distance is measured in log2 space (the frequency axis is an
    octave scale); hearing level distance is linear.  Ties break toward the
    smaller grid value.

    Raises
    ------
    ValueError
        If ``frequency`` is not a positive finite number or ``hl`` is not
        finite.
    """
    if not math.isfinite(frequency) or frequency <= 0:
        raise ValueError(f"frequency must be positive and finite, got {frequency!r}")
    if not math.isfinite(hl):
        raise ValueError(f"hl must be finite, got {hl!r}")
    logf = math.log2(frequency)
    best_f = min(grid.frequencies, key=lambda f: abs(logf - math.log2(f)))
    best_hl = min(grid.hl_mark_values, key=lambda v: abs(hl - v))
    return best_f, best_hl


@dataclass(frozen=True, order=True)
class Mark:
    """One audiogram mark: a hearing level at a frequency for one ear."""

    frequency: int
    hl: int
    ear: Ear = "left"

    def validate(self, grid: GridSpec = DEFAULT_GRID) -> "Mark":
        if self.frequency not in grid.frequencies:
            raise ValueError(f"frequency {self.frequency} not on grid")
        if self.hl not in grid.hl_mark_values:
            raise ValueError(f"hl {self.hl} not on grid")
        if self.ear not in ("left", "right"):
            raise ValueError(f"ear must be 'left' or 'right', got {self.ear!r}")
        return self


@dataclass(frozen=True)
class DigitalAudiogram:
    """The digital representation of an audiogram: a set of grid marks.

    At most one mark may exist per (frequency, ear) pair; construction
    enforces this and grid membership.
    """

    marks: frozenset[Mark] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        keys = [(m.frequency, m.ear) for m in self.marks]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate (frequency, ear) mark")

    @classmethod
    def from_marks(
        cls, marks: Iterable[Mark], grid: GridSpec = DEFAULT_GRID
    ) -> "DigitalAudiogram":
        validated = frozenset(m.validate(grid) for m in marks)
        return cls(marks=validated)

    def sorted_marks(self) -> list[Mark]:
        return sorted(self.marks)

    def __len__(self) -> int:
        return len(self.marks)


@dataclass(frozen=True)
class MarkClass:
    """One of the 24 detection classes.

    Two mark shapes (one per ear) plus a class for each HL tick label (14)
    and each frequency tick label (8).  Tick classes carry the numeric value
    of their label.
    """

    kind: ClassKind
    value: int | None = None

    def __post_init__(self) -> None:
        if self.kind in ("mark_left", "mark_right"):
            if self.value is not None:
                raise ValueError("mark classes carry no value")
        elif self.kind == "hl_tick":
            if self.value not in DEFAULT_GRID.hl_ticks:
                raise ValueError(f"invalid hl tick value {self.value}")
        elif self.kind == "freq_tick":
            if self.value not in DEFAULT_GRID.frequencies:
                raise ValueError(f"invalid frequency tick value {self.value}")
        else:
            raise ValueError(f"unknown class kind {self.kind!r}")

    @property
    def is_mark(self) -> bool:
        return self.kind in ("mark_left", "mark_right")

    @property
    def ear(self) -> Ear | None:
        if self.kind == "mark_left":
            return "left"
        if self.kind == "mark_right":
            return "right"
        return None

    @property
    def name(self) -> str:
        """Canonical string name, e.g. ``mark_left`` or ``hl_tick_-10``."""
        if self.is_mark:
            return self.kind
        return f"{self.kind}_{self.value}"

    @classmethod
    def from_name(cls, name: str) -> "MarkClass":
        if name in ("mark_left", "mark_right"):
            return cls(kind=name)  # type: ignore[arg-type]
        for prefix in ("hl_tick_", "freq_tick_"):
            if name.startswith(prefix):
                try:
                    value = int(name[len(prefix) :])
                except ValueError:
                    break
                return cls(kind=prefix[:-1], value=value)  # type: ignore[arg-type]
        raise ValueError(f"unknown detection class name {name!r}")


MARK_LEFT = MarkClass("mark_left")
MARK_RIGHT = MarkClass("mark_right")


def all_mark_classes(grid: GridSpec = DEFAULT_GRID) -> tuple[MarkClass, ...]:
    """The full 24-class vocabulary in canonical order."""
    classes: list[MarkClass] = [MARK_LEFT, MARK_RIGHT]
    classes.extend(MarkClass("hl_tick", v) for v in grid.hl_ticks)
    classes.extend(MarkClass("freq_tick", f) for f in grid.frequencies)
    return tuple(classes)


Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class Detection:
    """A classified axis-aligned bounding box with a confidence score."""

    mark_class: MarkClass
    bbox: Box
    score: float = 1.0

    def __post_init__(self) -> None:
        x0, y0, x1, y1 = self.bbox
        if not all(math.isfinite(v) for v in self.bbox):
            raise ValueError(f"bbox must be finite, got {self.bbox}")
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"bbox must satisfy x_min < x_max, y_min < y_max: {self.bbox}")
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must lie in [0, 1], got {self.score}")

    @property
    def centroid(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.bbox
        return (0.5 * (x0 + x1), 0.5 * (y0 + y1))

    @property
    def width(self) -> float:
        return self.bbox[2] - self.bbox[0]

    @property
    def height(self) -> float:
        return self.bbox[3] - self.bbox[1]
