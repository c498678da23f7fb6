"""Shared exception types."""


class RacLibError(Exception):
    """Base class for errors raised by this package."""


class NotFoundError(RacLibError):
    """A looked-up member does not exist. Distinct from I/O failure."""


class DuplicateKeyError(RacLibError):
    """An index already carries an entry for this (name, key) pair."""
