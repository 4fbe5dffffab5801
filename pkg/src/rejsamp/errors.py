class RejsampError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(RejsampError, ValueError):
    """An exact computation was requested beyond its enumeration cap."""


class EmptyGraphError(RejsampError, ValueError):
    """The operation needs at least one edge."""


class DegenerateGroupError(RejsampError, ValueError):
    """A simulated query group has no fixed coordinates to sample from."""
