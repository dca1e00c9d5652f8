from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.models import SolverTrace


class SpcaTvError(Exception):
    pass


class DataError(SpcaTvError, ValueError):
    pass


class UsageError(SpcaTvError):
    pass


class DegenerateLoadingError(SpcaTvError):
    pass


class ConvergenceError(SpcaTvError):
    def __init__(self, message: str, trace: SolverTrace | None = None):
        super().__init__(message)
        self.trace: SolverTrace | None = trace


class DivergenceError(ConvergenceError):
    pass
