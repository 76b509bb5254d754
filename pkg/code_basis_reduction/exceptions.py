from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from code_basis_reduction.linalg import CodeBasis


class CodeReductionError(Exception):
    """
    Base class of every error raised on purpose by this package
    """


class UsageError(CodeReductionError, ValueError):
    """
    A precondition of the called operation does not hold (bad indices, mismatched
    fields or lengths, improper input where a proper basis is required, ...)
    """


class DomainError(CodeReductionError, ArithmeticError):
    """
    The request is well formed but mathematically impossible (inverse of zero,
    singular restriction, rank deficiency, non-primitive word, ...)
    """


class SelectionFailure(DomainError):
    """
    Selective backward reduction found its information set outside the first k + beta
    columns. Drawing a fresh random code and trying again is the expected reaction.
    """

    retryable = True


class IterationCapExceeded(CodeReductionError, RuntimeError):
    def __init__(self, message: str, basis: CodeBasis, counters: Any) -> None:
        super().__init__(message)
        self.basis = basis
        self.counters = counters
