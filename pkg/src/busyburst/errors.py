"""Exception types shared across the package."""

from __future__ import annotations


class BusyBurstError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(BusyBurstError, ValueError):
    """Invalid increment-model parameters."""


class NonNegativeDrift(ModelError):
    """Mean increment is zero or positive; the walk would not be stable."""


class InvalidProbability(ModelError):
    """A probability parameter is outside its valid range or does not sum to one."""


class ReducibleChain(ModelError):
    """The transition matrix is not irreducible."""


class DuplicateStateValue(ModelError):
    """Two Markov states carry the same increment value."""


class NonConvergence(BusyBurstError):
    """An iterative numeric routine failed to converge within its budget."""


class NoPositiveRoot(BusyBurstError):
    """The scaled CGF has no positive zero below the overflow cap."""


class OutOfSupport(BusyBurstError, ValueError):
    """Requested mean lies outside the range the tilted family can reach."""


class ExcessiveTruncation(BusyBurstError):
    """Too many simulated cycles hit the step cap for the tail to be trusted."""


class EmptyTable(BusyBurstError):
    """Tail table has no positive-count rows to report."""


class InsufficientData(BusyBurstError):
    """Not enough usable observations for the requested fit."""


class SingleState(BusyBurstError):
    """A Markov-kind sample visits only one distinct value."""


class NonNegativeSampleDrift(BusyBurstError):
    """Sample mean is zero or positive; tail exponents are undefined."""
