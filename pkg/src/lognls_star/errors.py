"""Exception hierarchy shared by all modules."""


class StarGraphError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(StarGraphError, ValueError):
    pass


class GraphMismatch(StarGraphError, ValueError):
    pass


class NotEquivariant(StarGraphError, ValueError):
    pass


class GroupInhomogeneous(StarGraphError, ValueError):
    pass


class NoConvergence(StarGraphError, RuntimeError):
    pass


class Inconclusive(StarGraphError, RuntimeError):
    """An eigenvalue sits too close to zero to be classified at this resolution."""


class MorseBoundViolated(StarGraphError, RuntimeError):
    pass


class HypothesisFailed(StarGraphError, RuntimeError):
    pass


class TrackingLost(StarGraphError, RuntimeError):
    pass


class CountChanged(StarGraphError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BlowupDetected(StarGraphError, RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NoGrowthWindow(StarGraphError, RuntimeError):
    pass
