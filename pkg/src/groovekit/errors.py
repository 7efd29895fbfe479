"""Exception types shared across the package."""


class GrooveKitError(Exception):
    """Base class for all groovekit errors."""


class ParameterError(GrooveKitError, ValueError):
    """A parameter is outside its valid range or inputs are unusable."""


class FormatError(GrooveKitError, ValueError):
    """An input file has an unsupported or malformed encoding."""


class EditError(GrooveKitError, ValueError):
    """An annotation edit could not be resolved against the onset list."""


class EstimationError(GrooveKitError, RuntimeError):
    """An iterative estimate failed to converge or is undefined."""


class FitError(GrooveKitError, ValueError):
    """A regression has too few or degenerate points to fit."""
