EDGE_CONVENTION = "[from, to] denotes parameter a_{to,from}"


class IdentifiabilityError(Exception):
    """Base class for everything this package raises on purpose."""


class ModelValidationError(IdentifiabilityError, ValueError):
    """The user handed us a model (or an expression) we can't accept.

    Commands exit with status 1 on these.
    """

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"{type(self).__name__}: {reason} ({EDGE_CONVENTION})")


class DuplicateEdge(ModelValidationError):
    pass


class SelfLoop(ModelValidationError):
    pass


class IndexOutOfRange(ModelValidationError):
    pass


class EmptyInputs(ModelValidationError):
    pass


class EmptyOutputs(ModelValidationError):
    pass


class ModelFileError(ModelValidationError):
    pass


class ExpressionError(ModelValidationError):
    pass


class UnknownParameter(ModelValidationError):
    pass


class PreconditionError(IdentifiabilityError):
    """A valid model that the requested analysis does not apply to.

    Commands exit with status 2 on these.
    """

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"{type(self).__name__}: {reason}")


class NoInputs(PreconditionError):
    pass


class NotSISO(PreconditionError):
    pass


class NotObservable(PreconditionError):
    pass


class SpecTooLarge(PreconditionError):
    pass


class DenominatorVanishes(PreconditionError):
    pass


class VariableCountMismatch(ValueError):
    pass


class NonSquareMatrix(ValueError):
    pass


class InexactDivision(ValueError):
    pass


class EnumerationCapExceeded(IdentifiabilityError):
    pass


class InternalRuleConflict(RuntimeError):
    """Two graph rules with disjoint hypotheses fired on the same model."""
