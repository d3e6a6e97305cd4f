"""Exception hierarchy shared across the package.

Plain ``ValueError`` is used for locally detectable bad arguments (negative
sigma, even window, ...).  The classes below mark conditions a pipeline
caller may want to catch and handle (fall back, skip an image, report).
"""


class AudiogridError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(AudiogridError):
    """An external JSON document does not match the expected schema."""


class LayoutError(AudiogridError):
    """A render style leaves no room for some chart element."""


class DegenerateGeometryError(AudiogridError):
    """A geometric construction has no well-defined solution."""


class InsufficientDataError(AudiogridError):
    """Too few samples to fit the requested model."""


class RectificationError(AudiogridError):
    """Perspective rectification could not be estimated."""


class QuadApproximationError(RectificationError):
    """Quadrilateral approximation of a chart polygon failed."""


class InterpretationError(AudiogridError):
    """Detections could not be turned into an audiogram."""
