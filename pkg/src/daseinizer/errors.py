"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`DaseinizerError`,
which the CLI maps to exit code 1.
"""


class DaseinizerError(Exception):
    pass


class InvariantError(DaseinizerError, ValueError):
    """A value failed one of its construction invariants."""


class DimensionMismatch(DaseinizerError, ValueError):
    pass


class NotHermitianError(InvariantError):
    pass


class EigenSolverError(DaseinizerError):
    pass


class NonCommutingError(DaseinizerError, ValueError):
    def __init__(self, first, second, norm):
        self.pair = (first, second)
        self.norm = norm
        super().__init__(
            f"operators {first!r} and {second!r} do not commute "
            f"(commutator max-norm {norm:.3e})"
        )


class CapExceeded(DaseinizerError):
    """An enumeration would exceed a configured size cap."""

    def __init__(self, message, bound=None):
        self.bound = bound
        super().__init__(message)


class PosetMismatch(DaseinizerError, ValueError):
    pass


class NotInAlgebra(DaseinizerError, ValueError):
    """A projector was expected to lie in P(V) but does not."""


class ParseError(DaseinizerError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            pointer = " " * position + "^"
            message = f"{message} at position {position}\n  {text}\n  {pointer}"
        super().__init__(message)


class UnknownName(DaseinizerError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ModelError(DaseinizerError, ValueError):
    pass
