class DomainError(ValueError):
    """Physical parameter outside its valid domain (e.g. non-positive distance)."""


class ContractError(ValueError):
    """Caller broke an input contract: wrong shape, infeasible start point, ..."""


class DegenerateChannelError(ValueError):
    """A channel normalization hit a zero denominator."""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""


class SolverError(RuntimeError):
    """An iterative solver produced non-finite values and was aborted."""

    def __init__(self, message, stage=None):
        self.stage = stage
        if stage is not None:
            message = f"[{stage}] {message}"
        super().__init__(message)
