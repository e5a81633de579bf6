"""Exception types shared across the package.

The CLI maps these onto exit codes: parse/validation problems exit with 2,
numeric-domain problems (singular points, insufficient jet order, refused
inputs) exit with 3.
"""


class GjmsLabError(Exception):
    """Base class for all package errors."""


class ParseError(GjmsLabError, ValueError):
    """Syntax error in an expression or metric file; carries a byte offset."""

    def __init__(self, message, pos=None, source=None):
        self.pos = pos
        self.source = source
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class ValidationError(GjmsLabError, ValueError):
    """Well-formed input that refers to unknown names or bad shapes."""


class SingularPointError(GjmsLabError, ArithmeticError):
    """A function was evaluated outside its domain at the base point."""


class InsufficientOrderError(GjmsLabError):
    """A derivative was requested beyond the truncation order of a jet."""


class DimensionError(GjmsLabError, ValueError):
    """The dimension is not admissible for the requested quantity."""


class UnsupportedRewriteError(GjmsLabError):
    """The Fefferman-Graham rewrite table has no entry for a primitive."""


class WeightRangeError(GjmsLabError, ValueError):
    """The requested weight lies outside the implemented heat invariants."""


class NotEinsteinError(GjmsLabError):
    """An Einstein-only construction was given a non-Einstein metric."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
