"""
Modulation: fit (omega_j, x_j, gamma_j) so that eps = u - R~ is orthogonal,
on its first component, to i R~_j, d_x R~_j and Psi~_j for every soliton j.

The modulated soliton keeps theta_j at its reference frequency:

    R~_j^(1) = exp(i (theta_j x + gamma_j)) Phi_{omega_j}(x - x_j)

and Psi~_j uses the reference profile width.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..analysis import ground_profile
from ..exceptions import ConvergenceError, ParameterError
from ..observables import x_norm
from ..solitons import (
    FieldState,
    SolitonSpec,
    SystemParams,
    check_admissible,
    phi_derivative,
    phi_profile,
    secondary_profiles,
)
from ..spectral import Grid, integrate

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8


def exact_parameters(specs: Sequence[SolitonSpec], t: float = 0.0) -> np.ndarray:
    """Parameters (omega, x, gamma) per soliton that reproduce the exact solitons at time t."""
    values = []
    for spec in specs:
        values.extend([spec.omega, spec.center(t), spec.gamma0 - spec.theta * spec.x0 - spec.s * t])
    return np.array(values, dtype=float)


def _split(p: np.ndarray, count: int) -> List[Tuple[float, float, float]]:
    p = np.asarray(p, dtype=float)
    if p.shape != (3 * count,):
        raise ParameterError(f"expected {3 * count} modulation parameters, got shape {p.shape}")
    return [tuple(p[3 * j:3 * j + 3]) for j in range(count)]


def _modulated_spec(reference: SolitonSpec, omega_t: float) -> SolitonSpec:
    return SolitonSpec(omega=omega_t, c=reference.c)


def modulated_soliton(reference: SolitonSpec, params: SystemParams, grid: Grid,
                      omega_t: float, x_t: float, gamma_t: float, t: float = 0.0) -> FieldState:
    """R~_j with theta frozen at the reference frequency."""
    spec_t = _modulated_spec(reference, omega_t)
    check_admissible(spec_t, params)
    phi = phi_profile(spec_t, params, grid, center=x_t)
    psi, varphi, rho_profile = secondary_profiles(spec_t, params, grid, center=x_t)
    phase = np.exp(1j * (reference.theta * grid.x + gamma_t))
    return FieldState(u=phase * phi, rho=phase * rho_profile, v=psi, n=varphi, grid=grid, t=t)


def modulated_state(specs: Sequence[SolitonSpec], params: SystemParams, grid: Grid,
                    p: np.ndarray, t: float = 0.0) -> FieldState:
    pieces = [modulated_soliton(spec, params, grid, *q, t=t) for spec, q in zip(specs, _split(p, len(specs)))]
    total = pieces[0]
    for piece in pieces[1:]:
        total = total + piece
    return total


def _directions(spec: SolitonSpec, params: SystemParams, grid: Grid,
                omega_t: float, x_t: float, gamma_t: float):
    spec_t = _modulated_spec(spec, omega_t)
    phase = np.exp(1j * (spec.theta * grid.x + gamma_t))
    phi = phi_profile(spec_t, params, grid, center=x_t)
    dphi = phi_derivative(spec_t, params, grid, center=x_t)
    r1 = phase * phi
    dr1 = phase * (1j * spec.theta * phi + dphi)
    big_psi = phase * ground_profile(spec, grid, center=x_t)
    return r1, dr1, big_psi


def orthogonality_residuals(state: FieldState, params: SystemParams, specs: Sequence[SolitonSpec],
                            p: np.ndarray) -> np.ndarray:
    """(<eps1, i R~_j>, <eps1, d_x R~_j>, <eps1, Psi~_j>) for j = 1..N in the real L2 pairing."""
    grid = state.grid
    directions = [_directions(spec, params, grid, *q) for spec, q in zip(specs, _split(p, len(specs)))]
    eps1 = state.u - sum(d[0] for d in directions)

    residuals = []
    for r1, dr1, big_psi in directions:
        for target in (1j * r1, dr1, big_psi):
            residuals.append(integrate(np.real(eps1 * np.conj(target)), grid))
    return np.array(residuals)


def jacobian(state: FieldState, params: SystemParams, specs: Sequence[SolitonSpec],
             p: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Centered finite-difference Jacobian of the residuals in p."""
    p = np.asarray(p, dtype=float)
    columns = []
    for i in range(p.size):
        h = rel_step * max(1.0, abs(p[i]))
        forward, backward = p.copy(), p.copy()
        forward[i] += h
        backward[i] -= h
        columns.append((orthogonality_residuals(state, params, specs, forward)
                        - orthogonality_residuals(state, params, specs, backward)) / (2 * h))
    return np.column_stack(columns)


@dataclass(frozen=True, eq=False)
class ModulationFit:
    """Fitted parameters per soliton, residuals and the remainder eps = u - R~."""

    omega_t: Tuple[float, ...]
    x_t: Tuple[float, ...]
    gamma_t: Tuple[float, ...]
    residual_norm: float
    iterations: int
    epsilon: FieldState = field(repr=False)
    residuals: np.ndarray = field(repr=False, default=None)
    condition: float = 1.0
    t: float = 0.0

    @property
    def parameters(self) -> np.ndarray:
        return np.array([v for triple in zip(self.omega_t, self.x_t, self.gamma_t) for v in triple])

    @property
    def eps_xnorm(self) -> float:
        return x_norm(self.epsilon)

    def to_rows(self) -> List[dict]:
        eps_xnorm = self.eps_xnorm
        return [{
            't': self.t,
            'j': j,
            'omega_t': self.omega_t[j],
            'x_t': self.x_t[j],
            'gamma_t': self.gamma_t[j],
            'residual_norm': self.residual_norm,
            'eps_xnorm': eps_xnorm,
        } for j in range(len(self.omega_t))]


def _check_fittable(specs: Sequence[SolitonSpec]) -> None:
    for j, spec in enumerate(specs):
        if spec.omega == 0.0:
            raise ParameterError(
                f"soliton {j}: the modulation fit is degenerate at omega=0 "
                "(the profile depends on omega^2, so the frequency direction vanishes)"
            )


def fit_modulation(state: FieldState, params: SystemParams, specs: Sequence[SolitonSpec],
                   initial_guess: Optional[np.ndarray] = None, tol: float = 1e-10,
                   max_iter: int = 30) -> ModulationFit:
    """Newton iteration on the 3N orthogonality residuals.

    Steps are least-squares (minimum norm). The result always has
    residual_norm < tol; anything else raises ConvergenceError.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _check_fittable(specs)
    p = exact_parameters(specs, state.t) if initial_guess is None else np.array(initial_guess, dtype=float)
    _split(p, len(specs))

    condition = 1.0
    residuals = orthogonality_residuals(state, params, specs, p)
    iterations = 0
    while np.max(np.abs(residuals)) >= tol:
        if iterations >= max_iter:
            raise ConvergenceError(
                f"modulation fit did not converge in {max_iter} iterations at t={state.t:.6g} "
                f"(residual {np.max(np.abs(residuals)):.3e})",
                residuals=residuals,
            )
        jac = jacobian(state, params, specs, p)
        condition = float(np.linalg.cond(jac))
        if condition > CONDITION_LIMIT:
            logger.warning("modulation Jacobian ill-conditioned at t=%.6g: cond=%.3e", state.t, condition)

        delta, _, rank, _ = np.linalg.lstsq(jac, -residuals, rcond=1e-10)
        p = p + delta
        iterations += 1
        residuals = orthogonality_residuals(state, params, specs, p)

        if np.max(np.abs(residuals)) >= tol and rank < p.size and np.max(np.abs(delta)) < 1e-14:
            raise ConvergenceError(
                f"modulation fit stalled on a rank-{rank} Jacobian at t={state.t:.6g} "
                f"(residual {np.max(np.abs(residuals)):.3e})",
                residuals=residuals,
            )

    triples = _split(p, len(specs))
    epsilon = state - modulated_state(specs, params, state.grid, p, state.t)
    fit = ModulationFit(
        omega_t=tuple(q[0] for q in triples),
        x_t=tuple(q[1] for q in triples),
        gamma_t=tuple(q[2] for q in triples),
        residual_norm=float(np.max(np.abs(residuals))),
        iterations=iterations,
        epsilon=epsilon,
        residuals=residuals,
        condition=condition,
        t=state.t,
    )
    logger.debug("modulation fit at t=%.6g: %d iterations, residual %.3e",
                 state.t, iterations, fit.residual_norm)
    return fit
