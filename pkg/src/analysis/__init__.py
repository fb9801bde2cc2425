"""
Analysis package - linearized operators, Hessian forms and coercivity sampling.
"""

from .linearized import (
    SchroedingerOperator,
    EigenPair,
    Perturbation,
    Form2Terms,
    assemble_L1,
    assemble_L2,
    eigs_lowest,
    correlation,
    apply_H,
    quadratic_form_H,
    quadratic_form_decomposed,
    ground_profile,
    kernel_directions,
    negative_direction,
    negative_value,
    hessian_loc_form,
    expansion_defect,
)
from .coercivity import (
    CoercivityReport,
    SolitonCoercivity,
    random_profile,
    random_perturbation,
    gram_schmidt_project,
    constraint_directions,
    soliton_coercivity,
    localized_coercivity,
    coercivity_report,
)

__all__ = [
    'SchroedingerOperator',
    'EigenPair',
    'Perturbation',
    'Form2Terms',
    'assemble_L1',
    'assemble_L2',
    'eigs_lowest',
    'correlation',
    'apply_H',
    'quadratic_form_H',
    'quadratic_form_decomposed',
    'ground_profile',
    'kernel_directions',
    'negative_direction',
    'negative_value',
    'hessian_loc_form',
    'expansion_defect',
    'CoercivityReport',
    'SolitonCoercivity',
    'random_profile',
    'random_perturbation',
    'gram_schmidt_project',
    'constraint_directions',
    'soliton_coercivity',
    'localized_coercivity',
    'coercivity_report',
]
