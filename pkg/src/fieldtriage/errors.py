"""Exception types shared across the triage suite."""


class TriageError(Exception):
    """Base class for all domain errors raised by this package."""


class DataError(TriageError):
    """Malformed or unusable input: bad file, bad schema, bad row, bad config."""


class ZeroVarianceError(DataError):
    """A feature required to vary is constant."""

    def __init__(self, feature):
        super().__init__(f"zero variance in feature {feature!r}")
        self.feature = feature


class OutOfRangeError(TriageError):
    """Vitals fall outside the plausibility bounds (bad input or sensor fault)."""


class InsufficientDataError(TriageError):
    """Too few usable observations to compute the requested statistic."""


class NotFoundError(TriageError):
    """The referenced entity does not exist."""


class ConflictError(TriageError):
    """The requested change is illegal from the current state."""
