"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class QuadratureError(RuntimeError):
    """The subdivision budget ran out before the requested tolerance was met.

    Attributes
    ----------
    achieved : float
        Error estimate actually reached.
    tolerance : float
        Tolerance that was requested.
    """

    def __init__(self, message, achieved=float("nan"), tolerance=float("nan")):
        super().__init__(message)
        self.achieved = achieved
        self.tolerance = tolerance


class InfiniteClutterMeanError(DomainError):
    """The clutter mean power is infinite (shape alpha <= 1)."""
