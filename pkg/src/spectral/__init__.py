"""
Spectral package - periodic grid, Fourier differentiation and quadrature.
"""

from .grid import (
    Grid,
    make_grid,
    spectral_derivative,
    inner_product_l2,
    integrate,
    dealias,
    dealias_mask,
    translate,
)

__all__ = [
    'Grid',
    'make_grid',
    'spectral_derivative',
    'inner_product_l2',
    'integrate',
    'dealias',
    'dealias_mask',
    'translate',
]
