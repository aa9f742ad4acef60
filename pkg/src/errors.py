"""Error hierarchy. Every error carries a stable code used in CLI output."""


class DilaflowError(Exception):
    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


# scalar
class ScalarKindError(DilaflowError):
    code = "kind-mismatch"


class ScalarParseError(DilaflowError):
    code = "parse-error"

    def __init__(self, message: str, text: str = "", column: int = 0):
        super().__init__(f"{message} at column {column}: {text!r}")
        self.text = text
        self.column = column

    def to_dict(self) -> dict:
        return {**super().to_dict(), "column": self.column}


class InvalidIntervalError(DilaflowError):
    code = "invalid-interval"


class OverlapError(DilaflowError):
    code = "overlap-detected"


# aiet
class MapError(DilaflowError):
    code = "invalid-map"


class CriticalPointError(MapError):
    code = "critical-point"


class OutOfDomainError(MapError):
    code = "out-of-domain"


class NotInjectiveError(MapError):
    code = "not-injective"


class EmptyDomainError(MapError):
    code = "empty-domain"


class NotBijectiveError(MapError):
    code = "not-bijective"


# rauzy
class InductionError(DilaflowError):
    code = "invalid-step"


class DegenerateMapError(InductionError):
    code = "degenerate"


class NotTerminatedError(InductionError):
    code = "not-terminated"


class NotExpandingError(InductionError):
    code = "not-expanding"


class NotContractingError(InductionError):
    code = "not-contracting"


class SurjectiveMapError(InductionError):
    code = "surjective-input"


# paramspace, limitset
class DepthCapExceededError(DilaflowError):
    code = "depth-cap-exceeded"


class WrongTailKindError(DilaflowError):
    code = "wrong-tail-kind"


# torus
class TorusError(DilaflowError):
    code = "torus-error"


class ModelError(TorusError):
    """Invalid polygon model; the code names the failed check."""

    code = "invalid-model"

    def __init__(self, message: str, code: str | None = None, line: int | None = None, column: int | None = None):
        super().__init__(message, code)
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        data = super().to_dict()
        if self.line is not None:
            data["line"] = self.line
            data["column"] = self.column
        return data


class TraceError(TorusError):
    code = "hit-boundary"


class SectorBoundaryError(TorusError):
    code = "sector-boundary-direction"


class TracingBudgetError(TorusError):
    code = "tracing-budget-exceeded"


class FirstReturnError(TorusError):
    code = "unsupported-return-map"
