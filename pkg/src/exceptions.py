from typing import Optional


class DadError(Exception):
    """Base exception for solver-toolkit errors."""
    pass


class ConfigurationError(DadError):
    """Exception for invalid settings or an unknown solver backend."""
    pass


class InstanceValidationError(DadError):
    """Exception raised when an instance or scenario breaks a relational invariant."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class FileFormatError(DadError):
    """Exception for malformed instance, scenario, or network files."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class ModelBuildError(DadError):
    """Exception for violated preconditions while building an optimization model."""
    pass


class SolverError(DadError):
    """Exception for solver failures (non-optimal status, numerical trouble)."""

    def __init__(self, message: str, status: Optional[str] = None):
        super().__init__(message if status is None else f"{message} (status={status})")
        self.status = status


class SolverUnavailableError(SolverError):
    """Exception for a backend that cannot be loaded or licensed."""
    pass


class GenerationError(DadError):
    """Exception for synthetic network generation failures."""

    def __init__(self, message: str, seed: Optional[int] = None):
        super().__init__(message if seed is None else f"{message} (seed={seed})")
        self.seed = seed


class OracleLimitError(DadError):
    """Exception raised when brute-force enumeration would exceed the configured cap."""
    pass
