"""
Observables package - conserved and localized functionals.
"""

from .conserved import (
    ConservedSnapshot,
    energy_density,
    momentum1_density,
    momentum2_density,
    energy,
    momentum1,
    momentum2,
    gradient_E,
    gradient_Q1,
    gradient_Q2,
    gradient_S,
    apply_J,
    x_norm,
    x_norm_sq,
    conserved_snapshot,
    relative_drift,
)
from .localized import (
    CutoffFamily,
    LocalizedValues,
    smoothstep,
    cutoffs,
    localized_functionals,
    action_S,
    interaction_integral,
    pairwise_interaction,
)

__all__ = [
    'ConservedSnapshot',
    'energy_density',
    'momentum1_density',
    'momentum2_density',
    'energy',
    'momentum1',
    'momentum2',
    'gradient_E',
    'gradient_Q1',
    'gradient_Q2',
    'gradient_S',
    'apply_J',
    'x_norm',
    'x_norm_sq',
    'conserved_snapshot',
    'relative_drift',
    'CutoffFamily',
    'LocalizedValues',
    'smoothstep',
    'cutoffs',
    'localized_functionals',
    'action_S',
    'interaction_integral',
    'pairwise_interaction',
]
