"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AlgebrariumError(Exception):
    """Base class for all package errors."""


class DomainMismatch(AlgebrariumError):
    pass


class EmptyChain(AlgebrariumError):
    pass


class ParseError(AlgebrariumError, ValueError):
    pass


class ConfigError(AlgebrariumError, ValueError):
    pass


class ResampleExhausted(AlgebrariumError):
    pass


class UnsupportedMode(AlgebrariumError):
    pass


class EmptyRecord(AlgebrariumError):
    pass


class ProfileMismatch(AlgebrariumError, KeyError):
    pass


class DomainError(AlgebrariumError, ValueError):
    """Argument outside the mathematical domain of a function (e.g. k > n)."""


class InsufficientData(AlgebrariumError):
    pass


class DegenerateInput(AlgebrariumError, ValueError):
    pass


class IdMismatch(AlgebrariumError):
    pass


class DataFormatError(AlgebrariumError):
    """A malformed input record; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, path=None, lineno: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{lineno}: " if lineno else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.lineno = lineno
