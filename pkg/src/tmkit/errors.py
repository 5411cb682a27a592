"""Exception types shared across the toolkit."""

from __future__ import annotations


class TmkError(Exception):
    """Base class for all toolkit errors."""

    code = "TMK_ERROR"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}


class ParseError(TmkError):
    """Input text could not be parsed.

    Raised both for malformed JSON documents and for malformed condition
    expressions. `line`/`column` are 1-based where known; `token` is the
    offending piece of input.
    """

    code = "PARSE_ERROR"

    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        token: str | None = None,
        source: str | None = None,
    ):
        super().__init__(message)
        self.line = line
        self.column = column
        self.token = token
        self.source = source

    def to_dict(self) -> dict:
        out = super().to_dict()
        for key in ("line", "column", "token", "source"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


class MissingComponent(ParseError):
    """A document parsed as JSON but its root is not the expected shape."""

    code = "MISSING_COMPONENT"


class EvalError(TmkError):
    """Condition evaluation failed."""

    code = "EVAL_ERROR"


class UnknownPredicate(EvalError):
    """A predicate had no assignment in a strict environment."""

    code = "UNKNOWN_PREDICATE"


class UnknownMethod(TmkError):
    code = "UNKNOWN_METHOD"


class GuardParseError(TmkError):
    """A transition guard could not be parsed; carries the transition path."""

    code = "GUARD_PARSE_ERROR"

    def __init__(self, message: str, path: str):
        super().__init__(message)
        self.path = path

    def to_dict(self) -> dict:
        return {**super().to_dict(), "path": self.path}


class TooManyPredicates(TmkError):
    code = "TOO_MANY_PREDICATES"


class KindMismatch(TmkError):
    code = "KIND_MISMATCH"


class SkillMismatch(TmkError):
    code = "SKILL_MISMATCH"


class EmptyTranscript(TmkError):
    code = "EMPTY_TRANSCRIPT"


class GenerationFailed(TmkError):
    """All generation attempts were exhausted; carries the attempt log."""

    code = "GENERATION_FAILED"

    def __init__(self, message: str, log=None):
        super().__init__(message)
        self.log = log


class TransportError(TmkError):
    """A client call failed at the transport level; carries the attempt index."""

    code = "TRANSPORT_ERROR"

    def __init__(self, message: str, attempt: int):
        super().__init__(message)
        self.attempt = attempt

    def to_dict(self) -> dict:
        return {**super().to_dict(), "attempt": self.attempt}


class InvalidJudgeResponse(TmkError):
    code = "INVALID_JUDGE_RESPONSE"


class NonPositiveBaseline(TmkError):
    code = "NON_POSITIVE_BASELINE"
