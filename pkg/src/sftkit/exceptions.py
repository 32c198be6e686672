from typing import List, Optional


class SftError(Exception):
    """Base class for all sftkit errors."""


class InputValidationError(SftError, ValueError):
    """Malformed or inconsistent input data."""

    def __init__(
        self,
        message: str,
        pointer: Optional[str] = None,
        diagnostics: Optional[List[str]] = None,
    ):
        super().__init__(message)
        self.pointer = pointer
        self.diagnostics = list(diagnostics or [])

    def __str__(self) -> str:
        text = super().__str__()
        if self.pointer:
            text = f"{self.pointer}: {text}"
        if self.diagnostics:
            text += " (" + "; ".join(self.diagnostics) + ")"
        return text


class ComputationError(SftError, ValueError):
    """A well-formed input on which the requested operation cannot run."""


class ComputationRefused(ComputationError):
    """The engine declines to produce a result, e.g. when the boundary does not square to zero."""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])
