"""Exception types raised by the library.

Each class carries an optional ``witness`` so callers (and the CLI) can
report the concrete object that broke a contract.
"""


class DsetsError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GroupTableError(DsetsError):
    """A multiplication table violates the group axioms."""


class GroupTooLarge(DsetsError):
    """A group closure or automorphism search exceeded its cap."""


class NotNormal(DsetsError):
    """A subgroup used as a kernel is not normal."""


class ParameterError(DsetsError):
    """Parameters are inconsistent with the object they describe."""


class OrbitTooLarge(DsetsError):
    """Minimal-image search exceeded its construction budget."""


class SearchError(DsetsError):
    """Internal invariant of the lifting search was violated."""


class NotApplicable(DsetsError):
    """Preconditions of a construction do not hold."""


class CatalogError(DsetsError):
    """A catalog or library file is malformed."""

    exit_code = 3


class UnknownGroup(DsetsError):
    """A group label is not present in the loaded library."""

    exit_code = 2


class CheckpointError(DsetsError):
    """A checkpoint does not match the current run."""

    exit_code = 5
