"""Shared exception types for the pipeline."""


class ConfigError(Exception):
    """Pipeline configuration is invalid (missing paths, bad values)."""


class MissingArtifactError(Exception):
    """A stage was run before its prerequisite artifacts exist."""

    def __init__(self, artifact: str):
        super().__init__(f"missing prerequisite artifact: {artifact}")
        self.artifact = artifact


class ConvergenceError(RuntimeError):
    """Fixed-point iteration hit the iteration cap before converging."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"label spreading did not converge after {iterations} iterations "
            f"(last residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations
