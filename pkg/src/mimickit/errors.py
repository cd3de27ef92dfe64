"""Exception types shared across the toolkit."""


class MimicError(Exception):
    """Base class for toolkit errors."""

    exit_code = 1


class FormatError(MimicError):
    """Malformed or inconsistent input data (files, documents, schemas)."""

    exit_code = 2


class NumericalError(MimicError):
    """Degenerate or numerically unusable input (e.g. zero-power audio)."""

    exit_code = 3


class GeometryError(NumericalError):
    """Degenerate point configurations that leave a transform undefined."""
