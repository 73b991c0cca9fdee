"""Exception types shared by the library and the CLI."""

from __future__ import annotations


class G2Error(Exception):
    """Base class. ``code`` is the machine-readable tag used in CLI reports."""

    code = "error"

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


class PreconditionError(G2Error, ValueError):
    code = "precondition"


class ShapeError(G2Error, ValueError):
    """An object does not have the structure an operation requires."""

    code = "shape"


class NotInFieldError(G2Error, ValueError):
    """An exact root or value does not exist in Q(i, sqrt3)."""

    code = "not_in_field"


class InputError(G2Error, ValueError):
    code = "input"

    def __init__(self, message: str, path: str = "", line: int | None = None) -> None:
        super().__init__(message)
        self.path = path
        self.line = line
