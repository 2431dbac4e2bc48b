"""Exception hierarchy shared by all engine modules."""


class EngineError(Exception):
    """Base class for all convsum errors."""


class ExprParseError(EngineError):
    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected or []
        detail = f"{message} at position {position}"
        if self.expected:
            detail += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(detail)


class UnknownIdentifierError(ExprParseError):
    pass


class DomainError(EngineError):
    """Evaluation hit a singular point (log of nonpositive value, zero divide)."""


class UnsupportedFormError(EngineError):
    """Expression falls outside the exp-log-factorial fragment."""


class NotEventuallyPositiveError(EngineError):
    pass


class NotBoundedAwayFromZeroError(EngineError):
    pass


class NotMonotonicError(EngineError):
    pass


class ConstantSequenceError(EngineError):
    pass


class NotComparableEqualError(EngineError):
    pass


class NotIndeterminateError(EngineError):
    pass


class GuardTriggeredError(EngineError):
    """Ratio matches the known counterexample family for derivative reduction."""


class AmbiguousSignError(EngineError):
    """A numeric coefficient is too close to zero to call its sign."""


class PreconditionError(EngineError):
    pass
