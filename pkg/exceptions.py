# exceptions.py


class MuSatError(Exception):
    """Base class for every error raised by the decision procedures."""


class FormulaSyntaxError(MuSatError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnboundVariableError(MuSatError):
    pass


class NegationError(MuSatError):
    pass


class UnguardedFormulaError(MuSatError):
    pass


class AlphabetCapError(MuSatError):
    pass


class UnsupportedFragmentError(MuSatError):
    pass


class ConstructionError(MuSatError):
    """An automaton handed to a construction violates its precondition."""


class PriorityCompletionError(MuSatError):
    pass


class KripkeValidationError(MuSatError, ValueError):
    # also a ValueError so pydantic validators can raise it directly
    pass


class WitnessVerificationError(MuSatError):
    pass


class BoundViolationError(MuSatError):
    pass
