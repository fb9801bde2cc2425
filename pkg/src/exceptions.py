"""
Exception hierarchy shared by every subpackage.

Library code raises these; only the command line layer catches them and maps
them to exit codes.
"""

from typing import Any, List, Optional


class KGZError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(KGZError, ValueError):
    """Inadmissible soliton or system parameters."""


class GridError(KGZError, ValueError):
    """Invalid grid or fields living on different grids."""


class ConfigurationError(KGZError, ValueError):
    """Run configuration rejected; carries per-field diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])

    def __str__(self) -> str:
        if not self.diagnostics:
            return super().__str__()
        lines = [super().__str__()] + [f"  - {d}" for d in self.diagnostics]
        return "\n".join(lines)


class IntegrationBlowupError(KGZError, ArithmeticError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, t_reached: float, message: Optional[str] = None):
        super().__init__(message or f"integration blew up; last finite time t={t_reached:.6g}")
        self.t_reached = t_reached


class EvolutionAborted(KGZError):
    """An observer stopped the run or raised while observing it."""

    def __init__(self, message: str, state: Any = None, t_reached: Optional[float] = None):
        super().__init__(message)
        self.state = state
        self.t_reached = t_reached


class ConvergenceError(KGZError, ArithmeticError):
    """Newton or eigensolver failed to converge."""

    def __init__(self, message: str, residuals: Any = None):
        super().__init__(message)
        self.residuals = residuals


class SnapshotError(KGZError, ValueError):
    """Snapshot file is truncated, has a wrong magic or an unknown version."""
