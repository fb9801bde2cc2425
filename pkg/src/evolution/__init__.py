"""
Evolution package - linear propagator and time integrators.
"""

from .propagator import LinearPropagator, make_propagator, apply_linear
from .integrator import Scheme, Stepper, rhs, step, evolve, trajectory

__all__ = [
    'LinearPropagator',
    'make_propagator',
    'apply_linear',
    'Scheme',
    'Stepper',
    'rhs',
    'step',
    'evolve',
    'trajectory',
]
