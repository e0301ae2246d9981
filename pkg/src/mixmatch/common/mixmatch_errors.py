class MixMatchError(Exception):
    pass


class InvalidMixtureError(MixMatchError, ValueError):
    pass


class InvalidCellError(MixMatchError, ValueError):
    pass


class DimensionMismatchError(MixMatchError, ValueError):
    pass


class SuiteConfigError(MixMatchError, ValueError):
    pass


class UntrainedModelError(MixMatchError, RuntimeError):
    pass


class SgdDivergenceError(MixMatchError, RuntimeError):

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"Non-finite gradient at SGD step {step}")


class BudgetError(MixMatchError, ValueError):
    pass


class NodeExpansionError(MixMatchError, RuntimeError):
    pass


class OracleUnavailableError(MixMatchError, RuntimeError):
    pass


class IngestError(MixMatchError, ValueError):
    pass


class AcceptanceViolation(MixMatchError, RuntimeError):
    pass
