"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class SdxError(Exception):
    """Base class for all toolkit errors."""


# --- storyboard ---------------------------------------------------------


class EmptyStoryboard(SdxError):
    pass


class UnsupportedFormat(SdxError):
    pass


# --- motion DSL ---------------------------------------------------------


class ProgramSyntaxError(SdxError):
    """Raised when program text is not well-formed JSON."""


class ValidationError(SdxError):
    """Structural violation; carries a JSON-pointer-style location."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.message = message
        self.location = location


class NonFiniteTime(SdxError):
    pass


class FpsOutOfRange(SdxError):
    pass


# --- model gateway ------------------------------------------------------


class ProviderUnreachable(SdxError):
    pass


class MalformedResponse(SdxError):
    pass


class FixtureMiss(SdxError):
    pass


# --- clarification ------------------------------------------------------


class UnknownCue(SdxError):
    pass


class AnswerTypeMismatch(SdxError):
    pass


class InvalidTransition(SdxError):
    """A session operation was attempted from a state that does not allow it."""


# --- refinement ---------------------------------------------------------


class EmptyRefinement(SdxError):
    pass


class UnknownVersion(SdxError):
    pass


class LocalityViolation(SdxError):
    """Strict refinement rejected; carries the offending report."""

    def __init__(self, report):
        super().__init__(f"locality violated by actions: {sorted(report.offenders)}")
        self.report = report


# --- persistence --------------------------------------------------------


class CorruptStore(SdxError):
    def __init__(self, path, detail: str):
        super().__init__(f"{path}: {detail}")
        self.path = path
        self.detail = detail
