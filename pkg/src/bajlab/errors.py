"""Exception types shared across the package."""

from __future__ import annotations


class BajlabError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(BajlabError):
    """Malformed expression source; carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int, source: str):
        self.position = position
        self.source = source
        super().__init__(f"{message} (at position {position} in {source!r})")


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier that is not `x`, a named constant, or a known function."""


class DomainError(BajlabError):
    """Evaluation left the real domain (log of nonpositive, 0-division, ...).

    `subexpression` is the pretty-printed offending node.
    """

    def __init__(self, message: str, subexpression: str, at: float | None = None):
        self.subexpression = subexpression
        self.at = at
        where = f" at x={at!r}" if at is not None else ""
        super().__init__(f"{message} in {subexpression!r}{where}")


class RangeError(BajlabError):
    """Target value lies outside the attained range of a monotone function."""


class ValidationError(BajlabError):
    """A generator pair failed the positivity / nonvanishing-Wronskian checks."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class QuadratureError(BajlabError):
    """Adaptive quadrature failed to converge; carries the worst subinterval."""

    def __init__(self, message: str, worst_interval: tuple[float, float]):
        self.worst_interval = worst_interval
        super().__init__(f"{message} (worst subinterval {worst_interval})")


class NearDegenerateError(BajlabError):
    """A denominator fell below its safety floor (probe too close to the base point)."""
