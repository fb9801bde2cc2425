"""
Solitons package - closed-form soliton profiles and field states.
"""

from .factory import (
    SystemParams,
    SolitonSpec,
    FieldState,
    check_admissible,
    check_distinct_speeds,
    phi_profile,
    phi_derivative,
    secondary_profiles,
    soliton_phase,
    soliton_state,
    multisoliton_state,
    profile_equation_residual,
    stationary_residual,
    decay_profile,
    soliton_table,
)

__all__ = [
    'SystemParams',
    'SolitonSpec',
    'FieldState',
    'check_admissible',
    'check_distinct_speeds',
    'phi_profile',
    'phi_derivative',
    'secondary_profiles',
    'soliton_phase',
    'soliton_state',
    'multisoliton_state',
    'profile_equation_residual',
    'stationary_residual',
    'decay_profile',
    'soliton_table',
]
