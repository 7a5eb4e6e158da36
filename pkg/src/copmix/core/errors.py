"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import Optional


class CopmixError(Exception):
    """Base class for every error raised by copmix."""

    kind = "error"


class ValidationError(CopmixError, ValueError):
    """Invalid input, configuration or parameter."""

    kind = "validation"


class DomainError(ValidationError):
    """A point or parameter lies outside the admissible domain."""

    kind = "domain"


class DimensionError(ValidationError):
    """Dimensions of two inputs do not agree."""

    kind = "dimension"


class NumericalError(CopmixError, ArithmeticError):
    """A numerical procedure failed (factorization, divergence, degeneracy)."""

    kind = "numerical"


class UsageError(ValidationError):
    """Malformed command line."""

    kind = "usage"


class StageError(CopmixError):
    """Failure inside one stage of a batch command, tagged with the stage name."""

    kind = "stage"

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def error_kind(exc: BaseException) -> str:
    if isinstance(exc, StageError):
        return error_kind(exc.cause)
    if isinstance(exc, CopmixError):
        return exc.kind
    if isinstance(exc, (ValueError, OSError)):
        return "validation"
    return "internal"


def error_stage(exc: BaseException) -> Optional[str]:
    return exc.stage if isinstance(exc, StageError) else None
