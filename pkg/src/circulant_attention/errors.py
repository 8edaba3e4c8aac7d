"""Exception types shared across the package."""


class ShapeMismatch(ValueError):
    """Array dimensions disagree with each other or with a grid shape."""


class MissingReweight(ValueError):
    """A reweighting mode was requested without a reweighting tensor."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain an operation accepts."""


class ImaginaryResidueError(ArithmeticError):
    """An inverse transform left an imaginary part larger than roundoff allows.

    This signals a bug in the transform path, never a user error.
    """


class TooLarge(ValueError):
    """Dense materialization was refused by the memory guard."""


class FormatError(ValueError):
    """A CSV, PGM or sequence file could not be parsed."""
