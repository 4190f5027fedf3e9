"""Exception types shared across the package."""


class BiconnError(Exception):
    """Base class for all package errors."""


class BadParams(BiconnError, ValueError):
    pass


class InvalidNode(BiconnError, ValueError):
    pass


class InvalidPair(BiconnError, ValueError):
    pass


class DegeneratePath(InvalidPair):
    pass


class NotConnected(BiconnError):
    pass


class NotATree(BiconnError, ValueError):
    pass


class NotSpanning(BiconnError, ValueError):
    pass


class EmptyTree(BiconnError, ValueError):
    pass


class WrongKind(BiconnError, ValueError):
    pass


class Infeasible(BiconnError):
    pass


class CapExceeded(BiconnError):
    pass


class EmptySolution(BiconnError, ValueError):
    pass


class Unsupported(BiconnError):
    pass


class NotACactus(BiconnError, ValueError):
    pass


class InvariantViolation(BiconnError, AssertionError):
    """An internal invariant that the theory guarantees did not hold."""


class SchemaError(BiconnError, ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


class VersionMismatch(BiconnError, ValueError):
    pass


class FilteredInput(UserWarning):
    """Emitted when candidate edges duplicating tree edges are dropped."""
