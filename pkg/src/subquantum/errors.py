"""Exception hierarchy. Every error carries a short machine-readable kind."""


class SubquantumError(Exception):
    kind = "Error"

    def __init__(self, message="", line=None, where=None):
        super().__init__(message)
        self.line = line
        # (table, index, key) of the offending input, e.g. ("slit", 0, "sigma0")
        self.where = where

    def machine_line(self):
        loc = f" line={self.line}" if self.line is not None else ""
        return f"ERROR {self.kind}{loc}: {self}"


class ScenarioError(SubquantumError, ValueError):
    kind = "ScenarioError"


class NonPositiveSigma(ScenarioError):
    kind = "NonPositiveSigma"


class EmptySlits(ScenarioError):
    kind = "EmptySlits"


class DomainTooSmall(ScenarioError):
    kind = "DomainTooSmall"


class BadGrid(ScenarioError):
    kind = "BadGrid"


class BadWeight(ScenarioError):
    kind = "BadWeight"


class NonPositiveInput(ScenarioError):
    kind = "NonPositiveInput"


class NegativeTime(SubquantumError, ValueError):
    kind = "NegativeTime"


class MismatchedParams(SubquantumError, ValueError):
    kind = "MismatchedParams"


class EmptyChannels(SubquantumError, ValueError):
    kind = "EmptyChannels"


class VanishingDensity(SubquantumError, ArithmeticError):
    kind = "VanishingDensity"


class StabilityViolation(SubquantumError, ArithmeticError):
    kind = "StabilityViolation"

    def __init__(self, message="", step=None, max_dt=None):
        super().__init__(message)
        self.step = step
        self.max_dt = max_dt


class NotAGrating(SubquantumError, ValueError):
    kind = "NotAGrating"


class PaletteMismatch(SubquantumError, ValueError):
    kind = "PaletteMismatch"


class ConfigSyntaxError(SubquantumError, ValueError):
    kind = "SyntaxError"

    def __init__(self, message="", line=None, column=None):
        super().__init__(message, line=line)
        self.column = column

    def machine_line(self):
        loc = ""
        if self.line is not None:
            loc = f" line={self.line}"
            if self.column is not None:
                loc += f" column={self.column}"
        return f"ERROR {self.kind}{loc}: {self}"


class UnknownKey(SubquantumError, ValueError):
    kind = "UnknownKey"


class IoError(SubquantumError, OSError):
    kind = "IoError"
