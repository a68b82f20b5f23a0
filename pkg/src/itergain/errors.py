"""Engine error types.

Every error carries a stable ``code`` (its class name) that the CLI and the
HTTP API surface verbatim, so callers can branch on codes rather than
messages.
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class InvalidProbability(EngineError):
    """A raw probability outside its required domain."""


class InvalidAssessment(EngineError):
    """A probability assessment outside the strict (0.5, 1) bounds."""


class KindMismatch(EngineError):
    """Comparison or combination of incompatible scalar kinds."""


class EmptySpace(EngineError):
    """A set expression that normalizes to the empty set."""


class ParseError(EngineError):
    """Malformed set-notation text or set expression."""


class InvalidExpectedSet(EngineError):
    """An expected set that is not a nonempty strict subset of its space."""


class ModelViolation(EngineError):
    """An observed output outside the declared complete outcome set."""


class ParamError(EngineError):
    """Bad tool parameters: unknown tool, missing column, wrong kind."""


class ToolDomainError(EngineError):
    """A statistic undefined for the given data (e.g. zero variance)."""


class ToolContractError(EngineError):
    """A tool produced output outside its own declared outcome set."""


class GenError(EngineError):
    """A hypothesis generator could not be built or failed to sample."""


class IngestError(EngineError):
    """A CSV file that could not be ingested; message names the row."""


class ReplayError(EngineError):
    """A session log line that is malformed or violates an invariant."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class IntegrityError(EngineError):
    """A persisted value that does not match its recomputation."""


class EmptyCandidates(EngineError):
    """A ranking request with no candidate triples."""


class SessionNotFound(EngineError):
    """A session id with no log in the store."""


class SpaceMismatch(EngineError):
    """Two declarations that do not share one complete outcome set."""
