"""Exception hierarchy shared by every tba-models component."""

from typing import Optional, Tuple


class TBAError(Exception):
    """Base class for all errors raised by the library."""


class UnboundLetterError(TBAError, KeyError):
    def __init__(self, letter):
        self.letter = letter
        super().__init__(f"No value bound for letter '{letter}'.")

    def __str__(self):
        return self.args[0]


class ChunkSizeError(TBAError, ValueError):
    pass


class CapExceededError(TBAError, ValueError):
    """Raised when a term has more free letters than the engine accepts."""

    def __init__(self, cap: int, actual: int, context: str = ""):
        self.cap = cap
        self.actual = actual
        message = f"{actual} free variables exceed the feasibility cap of {cap}"
        if context:
            message = f"{message} ({context})"
        super().__init__(message + ".")


class MaterializationError(TBAError, ValueError):
    pass


class IndependenceInputError(TBAError, ValueError):
    pass


class TranslationError(TBAError, ValueError):
    pass


class FreeVariableError(TranslationError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"Free variable '{variable}' encountered in a sentence.")


class ArityError(TranslationError):
    def __init__(self, symbol: str, expected: int, actual: int):
        self.symbol = symbol
        super().__init__(
            f"Symbol '{symbol}' expects {expected} arguments, got {actual}."
        )


class FunctionalityError(TBAError, ValueError):
    """A valuation does not induce a total function table."""

    def __init__(self, symbol: str, args: Tuple[int, ...], values: Tuple[int, ...]):
        self.symbol = symbol
        self.arguments = tuple(args)
        self.values = tuple(values)
        if values:
            reason = f"several values {list(values)}"
        else:
            reason = "no value"
        super().__init__(f"Function '{symbol}' has {reason} at {self.arguments}.")


class SearchGuardError(TBAError, ValueError):
    pass


class SignatureShapeError(TBAError, ValueError):
    pass


class ScriptError(TBAError, ValueError):
    """Semantic error in a script or theory file."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScriptSyntaxError(ScriptError):
    def __init__(self, message: str, line: int, column: int):
        self.column = column
        super().__init__(f"column {column}: {message}", line=line)


class ExpansionError(ScriptError):
    pass
