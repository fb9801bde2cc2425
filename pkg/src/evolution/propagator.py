"""
Exact flow of the linear part of the system, applied mode by mode in Fourier space.

(u, rho) follow the Klein-Gordon group G1 with w = sqrt(1 + xi^2); (v, n)
follow the transport group G2. Both blocks have unit determinant per mode.
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..exceptions import GridError
from ..solitons import FieldState
from ..spectral import Grid

logger = logging.getLogger(__name__)

Block = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class LinearPropagator:
    """Multipliers of G1(dt) and G2(dt), stored as (a11, a12, a21, a22)."""

    dt: float
    grid: Grid = field(repr=False)
    g1: Block = field(repr=False)
    g2: Block = field(repr=False)

    @classmethod
    def build(cls, grid: Grid, dt: float) -> "LinearPropagator":
        w = np.sqrt(1.0 + grid.xi ** 2)
        if np.any(w == 0):
            raise GridError("singular Klein-Gordon multiplier")
        cos_w, sin_w = np.cos(dt * w), np.sin(dt * w)
        g1 = (cos_w, -sin_w / w, w * sin_w, cos_w)

        xi = grid.xi_odd
        cos_x, sin_x = np.cos(dt * xi), np.sin(dt * xi)
        g2 = (cos_x.astype(complex), 1j * sin_x, 1j * sin_x, cos_x.astype(complex))
        return cls(dt=float(dt), grid=grid, g1=g1, g2=g2)

    def determinants(self) -> Tuple[np.ndarray, np.ndarray]:
        a, b, c, d = self.g1
        p, q, r, s = self.g2
        return a * d - b * c, p * s - q * r

    def apply_hat(self, u_hat, rho_hat, v_hat, n_hat):
        """Apply both blocks to Fourier coefficients."""
        a, b, c, d = self.g1
        p, q, r, s = self.g2
        return (a * u_hat + b * rho_hat, c * u_hat + d * rho_hat,
                p * v_hat + q * n_hat, r * v_hat + s * n_hat)

    def apply_fields(self, fields):
        u, rho, v, n = fields
        fft = np.fft.fft
        out = self.apply_hat(fft(u), fft(rho), fft(v), fft(n))
        ifft = np.fft.ifft
        return ifft(out[0]), ifft(out[1]), ifft(out[2]).real, ifft(out[3]).real


def make_propagator(grid: Grid, dt: float) -> LinearPropagator:
    return LinearPropagator.build(grid, dt)


def apply_linear(state: FieldState, prop: LinearPropagator) -> FieldState:
    """Advance (u, rho) by G1(dt) and (v, n) by G2(dt); time moves by dt."""
    if not state.grid.same_as(prop.grid):
        raise GridError("propagator was built on a different grid")
    return FieldState.from_fields(prop.apply_fields(state.fields()), state.grid, state.t + prop.dt)
