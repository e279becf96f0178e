"""Exception types raised by loccsum."""


class LoccError(ValueError):
    """Base class for invalid input to any loccsum routine."""


class InvalidMatrix(LoccError):
    pass


class ShapeMismatch(LoccError):
    pass


class NotPositive(LoccError):
    pass


class InvalidInput(LoccError):
    pass


class ParseError(LoccError):
    pass


class NotOrthogonal(LoccError):
    def __init__(self, i, j, overlap):
        self.pair = (i, j)
        self.overlap = overlap
        super().__init__(f"states {i} and {j} are not orthogonal (|<i|j>| = {overlap:.3g})")


class NotNormalized(LoccError):
    pass


class UnknownCatalogEntry(LoccError):
    pass


class InvalidParams(LoccError):
    pass


class TooManyStates(LoccError):
    pass


class InvalidCut(LoccError):
    pass


class NotMultipartite(LoccError):
    pass


class NotComplete(LoccError):
    pass


class InvalidIndication(LoccError):
    pass


class UnsupportedShape(LoccError):
    pass


class NumericalError(ArithmeticError):
    """An internal computation produced non-finite or inconsistent numbers."""
