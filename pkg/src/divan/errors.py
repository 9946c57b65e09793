"""Exception hierarchy shared across the package."""


class DivanError(Exception):
    """Base class for all package-specific errors."""


class DataError(DivanError):
    """Invalid or malformed input data (corpus layout, file formats, vocabularies)."""


class DivergenceError(DivanError):
    """Numeric optimisation produced a non-finite value."""


class PipelineError(DivanError):
    """Failure inside a report pipeline stage; keeps the stage name and cause."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
