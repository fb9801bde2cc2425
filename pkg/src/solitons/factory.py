"""
Exact soliton profiles, traveling soliton states and multi-soliton sums.

The system is written in first-order form for the fields (u, rho, v, n):

    u_t   = -rho
    rho_t = -u_xx + u + alpha u v + beta |u|^2 u
    v_t   = n_x
    n_t   = v_x + (|u|^2)_x

A soliton with frequency omega and speed c is

    u   = exp(i lambda) phi(x - x0 - c t)
    rho = exp(i lambda) (i s phi + c phi')(x - x0 - c t)
    v   = psi(x - x0 - c t) = -phi^2 / (1 - c^2)
    n   = c phi^2 / (1 - c^2)

with lambda = theta (x - x0) - s t + gamma0, theta = omega c / (1 - c^2),
s = omega / (1 - c^2) and phi = amplitude * sech(k (x - x0)).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import GridError, ParameterError
from ..spectral import Grid, spectral_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SystemParams:
    """Coupling constants of the KGZ system."""

    alpha: float = 1.0
    beta: float = 0.0


@dataclass(frozen=True)
class SolitonSpec:
    """One soliton: internal frequency, speed, initial center and phase."""

    omega: float
    c: float
    x0: float = 0.0
    gamma0: float = 0.0

    @property
    def gap(self) -> float:
        """1 - c^2 - omega^2, positive for admissible solitons."""
        return 1.0 - self.c ** 2 - self.omega ** 2

    @property
    def theta(self) -> float:
        return self.omega * self.c / (1.0 - self.c ** 2)

    @property
    def s(self) -> float:
        return self.omega / (1.0 - self.c ** 2)

    @property
    def big_i(self) -> float:
        return self.gap / (1.0 - self.c ** 2) ** 2

    @property
    def k(self) -> float:
        self._check_kinematics()
        return math.sqrt(self.big_i)

    def amplitude(self, params: SystemParams) -> float:
        check_admissible(self, params)
        return math.sqrt(2.0 * self.gap / (params.alpha - params.beta * (1.0 - self.c ** 2)))

    def center(self, t: float) -> float:
        return self.x0 + self.c * t

    def _check_kinematics(self) -> None:
        if not abs(self.c) < 1.0:
            raise ParameterError(f"speed must satisfy |c| < 1, got c={self.c}")
        if not self.gap > 0.0:
            raise ParameterError(
                f"need 1 - c^2 - omega^2 > 0, got {self.gap:.6g} for (omega={self.omega}, c={self.c})"
            )


def check_admissible(spec: SolitonSpec, params: SystemParams) -> None:
    """Raise ParameterError naming the first violated admissibility inequality."""
    spec._check_kinematics()
    coupling = params.alpha - params.beta * (1.0 - spec.c ** 2)
    if not coupling > 0.0:
        raise ParameterError(
            f"need alpha - beta (1 - c^2) > 0, got {coupling:.6g} "
            f"for (alpha={params.alpha}, beta={params.beta}, c={spec.c})"
        )


@dataclass(frozen=True, eq=False)
class FieldState:
    """The four fields sampled on a grid at time t."""

    u: np.ndarray
    rho: np.ndarray
    v: np.ndarray
    n: np.ndarray
    grid: Grid = field(repr=False)
    t: float = 0.0

    def __post_init__(self):
        for name in ("u", "rho", "v", "n"):
            self.grid.check_field(getattr(self, name), name)

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> "FieldState":
        z = np.zeros(grid.n_points)
        return cls(u=z.astype(complex), rho=z.astype(complex), v=z.copy(), n=z.copy(), grid=grid, t=t)

    @classmethod
    def from_fields(cls, fields: Sequence[np.ndarray], grid: Grid, t: float = 0.0) -> "FieldState":
        u, rho, v, n = fields
        return cls(u=u, rho=rho, v=np.real(v), n=np.real(n), grid=grid, t=t)

    def fields(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.u, self.rho, self.v, self.n

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f)) for f in self.fields())

    def _check_grid(self, other: "FieldState") -> None:
        if not self.grid.same_as(other.grid):
            raise GridError("states live on different grids")

    def __add__(self, other: "FieldState") -> "FieldState":
        self._check_grid(other)
        return FieldState.from_fields([a + b for a, b in zip(self.fields(), other.fields())], self.grid, self.t)

    def __sub__(self, other: "FieldState") -> "FieldState":
        self._check_grid(other)
        return FieldState.from_fields([a - b for a, b in zip(self.fields(), other.fields())], self.grid, self.t)

    def scaled(self, factor: float) -> "FieldState":
        return FieldState.from_fields([factor * f for f in self.fields()], self.grid, self.t)


def _sech(z: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def phi_profile(spec: SolitonSpec, params: SystemParams, grid: Grid,
                center: Optional[float] = None) -> np.ndarray:
    """phi(x) = amplitude sech(k (x - x0)), no phase."""
    x0 = spec.x0 if center is None else center
    return spec.amplitude(params) * _sech(spec.k * (grid.x - x0))


def phi_derivative(spec: SolitonSpec, params: SystemParams, grid: Grid,
                   center: Optional[float] = None) -> np.ndarray:
    """Closed-form phi'(x) = -k phi tanh(k (x - x0))."""
    x0 = spec.x0 if center is None else center
    z = spec.k * (grid.x - x0)
    return -spec.k * spec.amplitude(params) * _sech(z) * np.tanh(z)


def secondary_profiles(spec: SolitonSpec, params: SystemParams, grid: Grid,
                       center: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (psi, varphi, rho_profile) centered at x0."""
    phi = phi_profile(spec, params, grid, center)
    dphi = phi_derivative(spec, params, grid, center)
    one_minus_c2 = 1.0 - spec.c ** 2

    psi = -phi ** 2 / one_minus_c2
    varphi = spec.c * phi ** 2 / one_minus_c2
    rho_profile = 1j * spec.s * phi + spec.c * dphi
    return psi, varphi, rho_profile


def soliton_phase(spec: SolitonSpec, grid: Grid, t: float) -> np.ndarray:
    """lambda(x, t) = theta (x - x0) - s t + gamma0."""
    return spec.theta * (grid.x - spec.x0) - spec.s * t + spec.gamma0


def soliton_state(spec: SolitonSpec, params: SystemParams, grid: Grid, t: float = 0.0) -> FieldState:
    """Exact traveling soliton at time t."""
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    check_admissible(spec, params)

    center = spec.center(t)
    phi = phi_profile(spec, params, grid, center)
    psi, varphi, rho_profile = secondary_profiles(spec, params, grid, center)
    phase = np.exp(1j * soliton_phase(spec, grid, t))

    return FieldState(u=phase * phi, rho=phase * rho_profile, v=psi, n=varphi, grid=grid, t=t)


def check_distinct_speeds(specs: Iterable[SolitonSpec]) -> None:
    speeds = [spec.c for spec in specs]
    if len(set(speeds)) != len(speeds):
        raise ParameterError(f"soliton speeds must be pairwise distinct, got {speeds}")


def multisoliton_state(specs: Sequence[SolitonSpec], params: SystemParams, grid: Grid,
                       t: float = 0.0) -> FieldState:
    """Component-wise sum of the individual soliton states."""
    if not specs:
        raise ParameterError("at least one soliton is required")
    check_distinct_speeds(specs)

    state = soliton_state(specs[0], params, grid, t)
    for spec in specs[1:]:
        state = state + soliton_state(spec, params, grid, t)
    return state


def profile_equation_residual(phi: np.ndarray, spec: SolitonSpec, params: SystemParams,
                              grid: Grid) -> float:
    """Max norm of phi'' - I phi + (alpha - beta (1 - c^2)) / (1 - c^2)^2 phi^3."""
    one_minus_c2 = 1.0 - spec.c ** 2
    cubic = (params.alpha - params.beta * one_minus_c2) / one_minus_c2 ** 2
    residual = spectral_derivative(phi, grid, 2) - spec.big_i * phi + cubic * phi ** 3
    return float(np.max(np.abs(residual)))


def stationary_residual(spec: SolitonSpec, params: SystemParams, grid: Grid) -> float:
    """Residual of the profile equation at the closed-form phi."""
    return profile_equation_residual(phi_profile(spec, params, grid), spec, params, grid)


def decay_profile(spec: SolitonSpec, params: SystemParams, grid: Grid,
                  margin: float = 5.0) -> float:
    """Fitted exponential decay rate of |phi| + |phi'| away from the center."""
    phi = phi_profile(spec, params, grid)
    dphi = phi_derivative(spec, params, grid)
    distance = np.abs(grid.x - spec.x0)
    envelope = np.abs(phi) + np.abs(dphi)

    window = (distance > 2.0 / spec.k) & (distance <= grid.length / 2 - margin) & (envelope > 1e-250)
    if np.count_nonzero(window) < 4:
        raise GridError("grid too small to measure the soliton decay")
    slope = np.polyfit(distance[window], np.log(envelope[window]), 1)[0]
    return float(-slope)


def soliton_table(specs: Sequence[SolitonSpec], params: SystemParams) -> List[dict]:
    """Derived quantities per soliton, for reports."""
    rows = []
    for j, spec in enumerate(specs):
        rows.append({
            'j': j,
            'omega': spec.omega,
            'c': spec.c,
            'x0': spec.x0,
            'gamma0': spec.gamma0,
            'theta': spec.theta,
            's': spec.s,
            'big_i': spec.big_i,
            'k': spec.k,
            'amplitude': spec.amplitude(params),
        })
    return rows
