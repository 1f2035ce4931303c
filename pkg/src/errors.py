"""Exception types shared by the toolkit.

The CLI maps these onto exit codes: `DomainError` and `ConfigError` -> 2,
`NumericalError` -> 3.
"""
from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(ValueError):
    """A scenario document or run configuration is invalid."""


class NumericalError(ArithmeticError):
    """A numerical routine did not reach its requested accuracy.

    Attributes:
      achieved_tolerance: Error estimate reported by the routine.
      requested_tolerance: Tolerance that was asked for.
    """

    def __init__(self, message: str, achieved_tolerance: float, requested_tolerance: float) -> None:
        super().__init__(
            f"{message} (achieved {achieved_tolerance:.3g}, requested {requested_tolerance:.3g})"
        )
        self.achieved_tolerance = achieved_tolerance
        self.requested_tolerance = requested_tolerance
