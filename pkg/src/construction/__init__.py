"""
Construction package - backward multi-soliton construction and its diagnostics.
"""

from ..observables import x_norm
from .constants import envelopes, omega_star, theorem_constants
from .harness import (
    BootstrapVerdict,
    ConstructionConfig,
    ConstructionReport,
    ConstructionRun,
    bootstrap_probe,
    cauchy_table,
    forward_consistency,
    run_construction,
    self_check,
)

__all__ = [
    'x_norm',
    'envelopes',
    'omega_star',
    'theorem_constants',
    'BootstrapVerdict',
    'ConstructionConfig',
    'ConstructionReport',
    'ConstructionRun',
    'bootstrap_probe',
    'cauchy_table',
    'forward_consistency',
    'run_construction',
    'self_check',
]
