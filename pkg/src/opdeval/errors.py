"""Exception hierarchy shared across the package."""


class OPDError(ValueError):
    """Base class for every error raised by opdeval."""


class InvalidAxisError(OPDError):
    pass


class InvalidOBBError(OPDError):
    pass


class NonOrthonormalizableError(OPDError):
    pass


class InvalidMotionError(OPDError):
    pass


class RLEError(OPDError):
    pass


class ParseError(OPDError):
    """Input file is not valid JSON. Carries the line/column of the failure."""

    def __init__(self, path, line, column, msg):
        self.path = str(path)
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {msg}")


class SchemaError(OPDError):
    """A value violates the file schema. ``field`` is a dotted/indexed path."""

    def __init__(self, field, msg):
        self.field = field
        super().__init__(f"{field}: {msg}")


class DanglingReferenceError(SchemaError):
    pass


class FrameAlignmentError(OPDError):
    pass


class MissingExtrinsicsError(OPDError):
    pass


class MissingStatsError(OPDError):
    pass
