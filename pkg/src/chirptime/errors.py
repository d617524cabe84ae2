"""Exception hierarchy shared by every chirptime module."""


class ChirpTimeError(Exception):
    """Base class for all errors raised by chirptime."""


class DomainError(ChirpTimeError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NoSignalError(DomainError):
    """A correlation profile carries no energy, so no peak can be chosen."""


class AmbiguityError(DomainError):
    """A timing offset is too large to be resolved without cyclic wrap."""


class StateError(ChirpTimeError, RuntimeError):
    """A protocol operation was invoked in the wrong stage."""


class ConfigError(ChirpTimeError, ValueError):
    """A scenario configuration is malformed or refers to unknown keys."""


class RunError(ChirpTimeError, RuntimeError):
    """A Monte Carlo run aborted; carries the index of the failing chirp."""

    def __init__(self, chirp_idx, cause):
        self.chirp_idx = chirp_idx
        self.cause = cause
        super().__init__(f"run aborted at chirp {chirp_idx}: {cause}")
