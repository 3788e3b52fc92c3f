"""Exception hierarchy shared by every module."""


class CatPathsError(Exception):
    pass


class InvalidJumpSet(CatPathsError, ValueError):
    pass


class EmptySupport(CatPathsError, ValueError):
    pass


class InvalidPath(CatPathsError, ValueError):
    """A step sequence breaks the path rules; ``index`` is the first bad step."""

    def __init__(self, index, message):
        super().__init__(f"step {index}: {message}")
        self.index = index


class NegativeAltitude(InvalidPath):
    def __init__(self, index, altitude):
        super().__init__(index, f"altitude would become {altitude}")
        self.altitude = altitude


class IllegalCatastrophe(InvalidPath):
    def __init__(self, index, altitude, reason="catastrophe not permitted here"):
        super().__init__(index, f"{reason} (altitude {altitude})")
        self.altitude = altitude


class UnknownJump(InvalidPath):
    def __init__(self, index, jump):
        super().__init__(index, f"jump {jump} is not in the support")
        self.jump = jump


class UnknownParam(CatPathsError, ValueError):
    pass


class BoundExceeded(CatPathsError, ValueError):
    pass


class ClassificationAmbiguous(CatPathsError, ArithmeticError):
    pass


class RootFindFailure(CatPathsError, ArithmeticError):
    pass


class PoleAtZ(CatPathsError, ArithmeticError):
    pass


class PeriodicUnsupported(CatPathsError, NotImplementedError):
    pass


class ExtrapolationUnstable(CatPathsError, ArithmeticError):
    pass


class RegimeUnavailable(CatPathsError, ArithmeticError):
    pass


class DerivativeUnstable(CatPathsError, ArithmeticError):
    pass


class DegenerateVariance(CatPathsError, ArithmeticError):
    pass


class TailBoundExceeded(CatPathsError, ArithmeticError):
    pass


class NotAnExcursion(CatPathsError, ValueError):
    pass


class UnsupportedJumpSet(CatPathsError, ValueError):
    pass


class InvalidHPath(CatPathsError, ValueError):
    pass
