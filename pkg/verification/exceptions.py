"""Error hierarchy for the verification lab."""


class LabError(Exception):
    """Base class for every error raised by the lab"""


class ParameterError(LabError, ValueError):
    """Parameters outside their valid range"""


class DegenerateParameterError(ParameterError):
    """Parameters that are nominally in range but describe no usable instance"""


class LandmarkLookupError(LabError, LookupError):
    """Registry query naming an index that was never registered"""


class DegenerateTriangleError(LabError, ValueError):
    """Triangle requested below a leaf of the binary tree"""


class PreconditionError(LabError, ValueError):
    """Operation called on inputs that violate its precondition"""


class ThresholdError(PreconditionError):
    """Orientation threshold too small to orient tree edges"""


class SizeCapError(PreconditionError):
    """Exhaustive enumeration refused because it exceeds the configured cap"""


class StructuralError(LabError, ValueError):
    """Object whose shape is wrong (e.g. a decomposition tree with a cycle)"""


class GraphFormatError(LabError, ValueError):
    """Malformed graph, decomposition, model or certificate JSON"""


class ExtractionFailure(LabError):
    """A stage of the K_n extraction pipeline could not establish what the next stage needs"""

    def __init__(self, stage: str, detail: dict | None = None, stages: list | None = None):
        self.stage = stage
        self.detail = detail or {}
        self.stages = stages or []
        super().__init__(f'extraction failed at stage {stage!r}: {self.detail}')
