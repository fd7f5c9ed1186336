"""Exception hierarchy shared by every module."""


class RankCommError(Exception):
    """Base class for all library errors."""


class DivisionByZero(RankCommError, ZeroDivisionError):
    pass


class MixedFields(RankCommError, TypeError):
    pass


class IndexOutOfRange(RankCommError, IndexError):
    pass


class DimensionMismatch(RankCommError, ValueError):
    pass


class InvalidRank(RankCommError, ValueError):
    pass


class BudgetExceeded(RankCommError):
    """Raised when exhaustive enumeration would exceed the configured budget."""

    def __init__(self, needed, budget):
        super().__init__(f"enumeration needs {needed} items, budget is {budget}")
        self.needed = needed
        self.budget = budget


class GuardFailed(RankCommError):
    """A characteristic or field-size hypothesis does not hold."""


class UnsupportedDimension(RankCommError, ValueError):
    pass


class UnsupportedK(RankCommError, ValueError):
    pass


class RationalsNotSampled(RankCommError, ValueError):
    pass


class NonConvergence(RankCommError):
    pass


class Infeasible(RankCommError):
    """Bounded completion search found nothing. Not a proof of nonexistence."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


CompletionInfeasible = Infeasible
