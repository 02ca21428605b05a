"""Exception types shared across the package."""


class SeqmeasError(Exception):
    """Base class for all seqmeas errors."""


class ScenarioParseError(SeqmeasError):
    """A scenario document is structurally malformed (bad JSON, missing or
    mistyped keys). Reported with the offending key path."""


class InvariantError(SeqmeasError):
    """A constructed value violates one of its numeric invariants
    (normalization, orthonormality, eigenvalue separation, ...)."""


class DimensionError(InvariantError):
    """Operands live in spaces of different dimension."""


class NotCompleteError(InvariantError):
    """A local observable is degenerate where a complete (non-degenerate)
    spectrum is required."""


class FunctionDomainError(InvariantError):
    """The outcome function is undefined (or not finite) on some joint
    eigenvalue pair."""


class ModelMismatchError(InvariantError):
    """Observed outcomes are impossible under both hypotheses; the scenario
    encodings being compared do not describe the same experiment."""


class IndistinguishableError(SeqmeasError):
    """The two hypotheses predict identical outcome distributions; no number
    of samples can separate them."""
