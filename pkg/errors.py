"""
NashOverlap - Error types
Every library failure is raised as a NashOverlapError subclass; the CLI maps
them to exit statuses.
"""

from typing import Optional


class NashOverlapError(Exception):
    """Base class for all NashOverlap errors"""


class ParseError(NashOverlapError):
    """Malformed edge-list, cover or closeness input"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ConfigError(NashOverlapError):
    """Invalid parameter value"""


class CoverError(NashOverlapError):
    """Cover does not satisfy the precondition of an operation"""


class InfeasibleParamsError(NashOverlapError):
    """Planted-benchmark parameters cannot be realized"""


class ConvergenceError(NashOverlapError):
    """A game hit its max_rounds cap before reaching equilibrium"""
