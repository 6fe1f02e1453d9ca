"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: data/IO problems (DataError and
subclasses) exit 2, numeric failures (NumericError) exit 3.
"""


class MixsentError(Exception):
    """Base class for all package errors."""


class DimensionError(MixsentError):
    """Operand shapes do not conform."""


class DataError(MixsentError):
    """Bad input data or files."""


class ParseError(DataError):
    """Malformed line in a data or dictionary file."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class ConfigError(DataError):
    """Invalid configuration file or value."""


class CheckpointError(DataError):
    """Unreadable or incompatible model checkpoint."""


class NumericError(MixsentError):
    """Non-finite loss or gradient during training."""


class AutogradError(MixsentError):
    """Misuse of the reverse-mode tape (e.g. repeated backward)."""
