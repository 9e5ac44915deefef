"""Exception hierarchy shared by all shapetree modules."""


class ShapeTreeError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(ShapeTreeError, ValueError):
    """A caller-supplied argument violates an operation's precondition."""


class ParseError(ShapeTreeError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateShapeError(ShapeTreeError):
    """Too few points, zero area, repeated points or zero-length vectors."""


class TraceError(ShapeTreeError):
    """The raster does not hold exactly one traceable foreground region."""


class NoDistinctExtremaError(ShapeTreeError):
    """A boundary profile is constant, so it offers no usable seed point."""


class AlignmentError(ShapeTreeError):
    """Two extrema sets differ in size and cannot be put in correspondence."""


class QuadratureAccuracyError(ShapeTreeError):
    def __init__(self, message, interval=None):
        self.interval = interval
        super().__init__(message)


class UnstableFrequencyError(ShapeTreeError):
    def __init__(self, message, suggested_omega=None):
        self.suggested_omega = suggested_omega
        super().__init__(message)
