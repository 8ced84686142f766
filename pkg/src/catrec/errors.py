"""Exception hierarchy shared across the pipeline."""


class CatrecError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CatrecError):
    """Invalid configuration or invalid input data."""


class MissingArtifactError(CatrecError):
    """A required upstream stage artifact does not exist."""


class DivergenceError(CatrecError):
    """Training produced a non-finite objective value."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
