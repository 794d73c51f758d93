"""Exception types shared across substlab."""


class SubstLabError(Exception):
    """Base class for every error raised by substlab."""


class CoprimalityViolation(SubstLabError, ValueError):
    pass


class ShapeMismatch(SubstLabError, ValueError):
    pass


class Singular(SubstLabError, ArithmeticError):
    pass


class NotUnimodular(SubstLabError, ArithmeticError):
    pass


class NotUnimodularEquivalent(SubstLabError, ArithmeticError):
    pass


class PivotError(SubstLabError, ArithmeticError):
    """Raised by forward elimination; ``step`` is 1-based."""

    def __init__(self, step, pivot):
        self.step = step
        self.pivot = pivot
        super().__init__(f"step {step}: pivot {pivot}")


class NonUnitPivot(PivotError):
    pass


class DegeneratePivot(PivotError):
    pass


class IncompleteTrace(SubstLabError, ValueError):
    pass


class DuplicateY1(SubstLabError, ValueError):
    pass


class BudgetExceeded(SubstLabError, RuntimeError):
    def __init__(self, size, budget):
        self.size = size
        self.budget = budget
        super().__init__(f"enumeration size {size} exceeds budget {budget}")


class NoSteps(SubstLabError, ValueError):
    pass


class AccountingViolation(SubstLabError, ValueError):
    pass


class PremiseIncompatible(SubstLabError, ValueError):
    pass


class EmptyDomain(UserWarning):
    """Warned (not raised) when a 0/1 domain has no vectors of the requested weight."""
