"""
Conserved functionals E, Q1, Q2, their gradients and the Hamiltonian structure.

Gradients are taken with respect to the real pairing Re int f conj(g) dx, so
that the system reads state_t = J E'(state).
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from ..exceptions import ParameterError
from ..solitons import FieldState, SystemParams
from ..spectral import Grid, integrate, spectral_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConservedSnapshot:
    t: float
    energy: float
    momentum1: float
    momentum2: float
    x_norm_sq: Optional[float] = None

    def to_row(self) -> Dict[str, float]:
        return asdict(self)


def _mod2(u: np.ndarray) -> np.ndarray:
    return (u * np.conj(u)).real


def energy_density(state: FieldState, params: SystemParams) -> np.ndarray:
    u, rho, v, n = state.fields()
    ux = spectral_derivative(u, state.grid, 1)
    mod2 = _mod2(u)
    return (mod2 + _mod2(rho) + _mod2(ux) + params.alpha * mod2 * v
            + 0.5 * params.beta * mod2 ** 2 + 0.5 * params.alpha * (v ** 2 + n ** 2))


def momentum1_density(state: FieldState, params: SystemParams) -> np.ndarray:
    ux = spectral_derivative(state.u, state.grid, 1)
    return 2.0 * np.real(ux * np.conj(state.rho)) - params.alpha * state.n * state.v


def momentum2_density(state: FieldState) -> np.ndarray:
    return 2.0 * np.imag(np.conj(state.u) * state.rho)


def energy(state: FieldState, params: SystemParams) -> float:
    return integrate(energy_density(state, params), state.grid)


def momentum1(state: FieldState, params: SystemParams) -> float:
    return integrate(momentum1_density(state, params), state.grid)


def momentum2(state: FieldState) -> float:
    return integrate(momentum2_density(state), state.grid)


def gradient_E(state: FieldState, params: SystemParams) -> FieldState:
    """E' = (-2u_xx + 2u + 2alpha u v + 2beta |u|^2 u, 2rho, alpha |u|^2 + alpha v, alpha n)."""
    u, rho, v, n = state.fields()
    a, b = params.alpha, params.beta
    mod2 = _mod2(u)
    uxx = spectral_derivative(u, state.grid, 2)
    return FieldState(
        u=-2 * uxx + 2 * u + 2 * a * u * v + 2 * b * mod2 * u,
        rho=2 * rho,
        v=a * mod2 + a * v,
        n=a * n,
        grid=state.grid,
        t=state.t,
    )


def gradient_Q1(state: FieldState, params: SystemParams) -> FieldState:
    """Q1' = (-2 rho_x, 2 u_x, -alpha n, -alpha v)."""
    grid = state.grid
    return FieldState(
        u=-2 * spectral_derivative(state.rho, grid, 1),
        rho=2 * spectral_derivative(state.u, grid, 1),
        v=-params.alpha * state.n,
        n=-params.alpha * state.v,
        grid=grid,
        t=state.t,
    )


def gradient_Q2(state: FieldState) -> FieldState:
    """Q2' = (-2i rho, 2i u, 0, 0)."""
    zero = np.zeros(state.grid.n_points)
    return FieldState(u=-2j * state.rho, rho=2j * state.u, v=zero, n=zero.copy(),
                      grid=state.grid, t=state.t)


def gradient_S(state: FieldState, params: SystemParams, omega: float, c: float) -> FieldState:
    """S' = E' - omega Q2' - c Q1'; vanishes at the soliton with parameters (omega, c)."""
    return gradient_E(state, params) - gradient_Q2(state).scaled(omega) - gradient_Q1(state, params).scaled(c)


def apply_J(cotangent: FieldState, params: SystemParams) -> FieldState:
    """J = [[0, -1/2, 0, 0], [1/2, 0, 0, 0], [0, 0, 0, d/dx / alpha], [0, 0, d/dx / alpha, 0]]."""
    if params.alpha == 0:
        raise ParameterError("the Hamiltonian form needs alpha != 0")
    grid = cotangent.grid
    return FieldState(
        u=-0.5 * cotangent.rho,
        rho=0.5 * cotangent.u,
        v=spectral_derivative(cotangent.n, grid, 1) / params.alpha,
        n=spectral_derivative(cotangent.v, grid, 1) / params.alpha,
        grid=grid,
        t=cotangent.t,
    )


def x_norm_sq(diff: FieldState) -> float:
    """||du||_H1^2 + ||drho||^2 + ||dv||^2 + ||dn||^2."""
    du, drho, dv, dn = diff.fields()
    dux = spectral_derivative(du, diff.grid, 1)
    density = _mod2(du) + _mod2(dux) + _mod2(drho) + dv ** 2 + dn ** 2
    return integrate(density, diff.grid)


def x_norm(diff: FieldState) -> float:
    """Energy-space norm of a difference field."""
    return float(np.sqrt(x_norm_sq(diff)))


def conserved_snapshot(state: FieldState, params: SystemParams,
                       reference: Optional[FieldState] = None) -> ConservedSnapshot:
    xn = x_norm_sq(state - reference) if reference is not None else None
    return ConservedSnapshot(
        t=state.t,
        energy=energy(state, params),
        momentum1=momentum1(state, params),
        momentum2=momentum2(state),
        x_norm_sq=xn,
    )


def relative_drift(value: float, initial: float) -> float:
    """Drift of a conserved quantity, |value - initial| / max(|initial|, 1).

    Relative for |initial| >= 1 and absolute below that; the momenta of a
    standing pair start at zero.
    """
    return abs(value - initial) / max(abs(initial), 1.0)
