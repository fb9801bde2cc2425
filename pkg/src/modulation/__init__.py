"""
Modulation package - orthogonality fits and their time tracking.
"""

from .fitter import (
    ModulationFit,
    exact_parameters,
    modulated_soliton,
    modulated_state,
    orthogonality_residuals,
    jacobian,
    fit_modulation,
)
from .tracker import ModulationTracker, TrackingResult, modulation_rates, track_modulation

__all__ = [
    'ModulationFit',
    'exact_parameters',
    'modulated_soliton',
    'modulated_state',
    'orthogonality_residuals',
    'jacobian',
    'fit_modulation',
    'ModulationTracker',
    'TrackingResult',
    'modulation_rates',
    'track_modulation',
]
