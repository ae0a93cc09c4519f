"""Exception hierarchy for the verification engine."""

from __future__ import annotations


class ZeroLedgerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ZeroLedgerError, ValueError):
    """An argument lies outside the mathematical domain of a bound function."""


class InfeasibleParametersError(ZeroLedgerError):
    """A parameter combination violates a validity constraint of a bound."""


class NoFeasiblePointError(ZeroLedgerError):
    """An optimization search space contains no feasible point."""
