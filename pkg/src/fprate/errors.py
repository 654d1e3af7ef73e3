"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class GameError(ValueError):
    pass


class DimensionMismatch(GameError):
    pass


class InvalidCounts(GameError):
    pass


class OutOfPolytope(GameError):
    pass


class InvalidSimplex(GameError):
    pass


class IndexOutOfRange(GameError):
    pass


class NotPotentialGame(GameError):
    def __init__(self, message: str, max_violation: float):
        super().__init__(message)
        self.max_violation = max_violation


class NonPotentialInput(GameError):
    pass


class NotAnEquilibrium(GameError):
    pass


class NotStrictPure(GameError):
    pass


class TooLarge(GameError):
    pass


class DegenerateSegment(GameError):
    pass


class NotConverged(GameError):
    pass


class EmptyEquilibriumList(GameError):
    pass
