"""Exception hierarchy shared by every module."""


class PoincareLabError(Exception):
    pass


class NumericOverflowError(PoincareLabError, ArithmeticError):
    pass


class DomainError(PoincareLabError, ValueError):
    pass


class InvalidSpecError(PoincareLabError, ValueError):
    pass


class ConsistencyError(PoincareLabError, RuntimeError):
    """An internal self-check failed (a bug or a bad constant, never bad input)."""


class DivergenceError(PoincareLabError, ValueError):
    pass


class NotIntegrableError(DivergenceError):
    pass


class UncertifiedTailError(PoincareLabError, ValueError):
    pass


class ResolutionError(PoincareLabError, ValueError):
    pass


class WordTooLongError(PoincareLabError, ValueError):
    pass


class InsufficientSamplesError(PoincareLabError, ValueError):
    pass


class CapacityError(PoincareLabError, RuntimeError):
    def __init__(self, message, candidates=None, cap=None):
        super().__init__(message)
        self.candidates = candidates
        self.cap = cap


class WidenRadiusError(PoincareLabError, ValueError):
    def __init__(self, message, suggested_radius):
        super().__init__(message)
        self.suggested_radius = suggested_radius
