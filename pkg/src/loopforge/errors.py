"""Exception types shared across the package."""


class LoopforgeError(Exception):
    """Base class for package errors."""


class StructuralError(LoopforgeError, ValueError):
    """Operands live in incompatible index universes or shapes."""


class DomainError(LoopforgeError, ValueError):
    """An argument lies outside the domain of an operation."""


class WindowError(LoopforgeError):
    """A result would leave the truncation window."""

    def __init__(self, degrees, window):
        self.degrees = sorted(set(degrees))
        self.window = window
        super().__init__(f"degrees {self.degrees} outside window |k| <= {window}")


class SingularFormError(LoopforgeError, ArithmeticError):
    """The Gram matrix of a bilinear form is degenerate."""


class MarginError(LoopforgeError, ValueError):
    """Interior margin too small for the requested operator degree."""


class ParseError(LoopforgeError, ValueError):
    """Malformed serialized input."""
