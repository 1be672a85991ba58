"""
Error hierarchy shared by the engine and the command line.

Every error carries the exit code the CLI returns for it.
"""

from typing import Optional


class TgaError(Exception):
    """Base class for all engine errors"""

    exit_code = 1


class ConfigurationError(TgaError):
    """Bad settings, unmapped columns or unreadable input"""

    exit_code = 2


class ParameterError(TgaError, ValueError):
    """A caller-supplied parameter is out of range"""

    exit_code = 2


class PreconditionError(ParameterError):
    """An operation was invoked on a graph it cannot accept"""


class DataFormatError(TgaError):
    """Input or stored data is not what it claims to be"""

    exit_code = 3


class EmptyGraphError(DataFormatError):
    pass


class GraphIntegrityError(DataFormatError):
    pass


class LoadError(DataFormatError):
    """A stored graph failed verification"""

    def __init__(self, message: str, path: Optional[str] = None, row: Optional[int] = None):
        self.path = path
        self.row = row
        location = ""
        if path:
            location = f"{path}"
            if row is not None:
                location += f", row {row}"
            location += ": "
        super().__init__(f"{location}{message}")


class StorageIOError(TgaError):
    exit_code = 4
