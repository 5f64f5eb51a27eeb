"""Exception hierarchy shared by all modules."""


class PCheegerError(Exception):
    """Base class for library errors."""


class InputError(PCheegerError, ValueError):
    """Malformed or inconsistent input data."""


class EmptyDomain(InputError):
    pass


class UnknownVertex(InputError, KeyError):
    def __str__(self):  # KeyError quotes its argument otherwise
        return Exception.__str__(self)


class DimensionMismatch(InputError):
    pass


class InvalidP(InputError):
    pass


class ZeroFunction(InputError):
    pass


class InvalidBipartition(InputError):
    pass


class InvalidPartition(InputError):
    pass


class InvalidSpec(InputError):
    pass


class DisconnectedDomain(PCheegerError):
    pass


class NotBipartite(PCheegerError):
    pass


class NotNormalized(PCheegerError):
    pass


class NotEquitable(PCheegerError):
    pass


class TooLarge(PCheegerError):
    pass


class HorizonExceeded(PCheegerError, IndexError):
    pass


class NoConvergence(PCheegerError):
    """Iterative solver ran out of iterations above the residual tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
