"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ExponentiaError(Exception):
    """Base class for library errors."""


class DomainError(ExponentiaError, ValueError):
    """An argument lies outside the range where the computation is defined."""


class ValidationError(ExponentiaError, ValueError):
    """Malformed input data (probabilities, points, grids, configs)."""


class UnsupportedInputError(ExponentiaError, ValueError):
    """Input is valid but outside what the implementation handles."""


class ConvergenceError(ExponentiaError, ArithmeticError):
    """An iterative optimizer failed to meet its tolerance."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        if bracket is not None:
            message = f"{message} (bracket [{bracket[0]!r}, {bracket[1]!r}])"
        super().__init__(message)
        self.bracket = bracket


class IntegrationError(ExponentiaError, ArithmeticError):
    """A quadrature integrand produced a non-finite value."""

    def __init__(self, node, value):
        super().__init__(f"non-finite integrand value {value!r} at node {node!r}")
        self.node = node
        self.value = value
