"""Exception hierarchy shared by all alres modules."""


class AlresError(Exception):
    """Base class for every error raised by the package."""


class ZeroDivide(AlresError, ZeroDivisionError):
    pass


class SingularMatrix(AlresError):
    pass


class PoleAtOrigin(AlresError):
    pass


class NearSingularEvaluation(AlresError):
    def __init__(self, value, threshold):
        super().__init__(
            f"denominator {value!r} below threshold {threshold:.3e}")
        self.value = value
        self.threshold = threshold


class UnsupportedDenominator(AlresError):
    pass


class ExponentGuard(AlresError):
    pass


class EmptyInterval(AlresError):
    pass


class InvalidRange(AlresError):
    pass


class BoundarySurface(AlresError):
    pass


class SingularTransition(AlresError):
    pass


class InvalidResidueIndex(AlresError):
    pass


class WindowTooSmall(AlresError):
    pass


class NotABoundaryPair(AlresError):
    pass


class ParseError(AlresError):
    pass
