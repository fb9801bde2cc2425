"""
Cutoff partition of unity and the localized functionals built on it.

psi_1 = 1, psi_j(x, t) = psi((x - m_j t) / sqrt(t)) with m_j = (c_{j-1} + c_j) / 2,
phi_j = psi_j - psi_{j+1}, phi_N = psi_N.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import ParameterError
from ..solitons import FieldState, SolitonSpec, SystemParams, soliton_state
from ..spectral import Grid, integrate, spectral_derivative
from .conserved import energy_density, momentum1_density, momentum2_density

logger = logging.getLogger(__name__)


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def smoothstep(s: np.ndarray) -> np.ndarray:
    """C-infinity transition: 0 for s <= -1, 1 for s >= 1, 1/2 at 0."""
    s = np.asarray(s, dtype=float)
    left, right = _bump(s + 1.0), _bump(1.0 - s)
    return left / (left + right)


@dataclass(frozen=True)
class CutoffFamily:
    """Speeds sorted ascending and the midpoints separating them."""

    speeds: Tuple[float, ...]
    m: Tuple[float, ...] = field(init=False)

    def __post_init__(self):
        speeds = tuple(float(c) for c in self.speeds)
        if not speeds:
            raise ParameterError("cutoff family needs at least one speed")
        if list(speeds) != sorted(speeds) or len(set(speeds)) != len(speeds):
            raise ParameterError(f"speeds must be strictly increasing, got {speeds}")
        object.__setattr__(self, 'speeds', speeds)
        midpoints = tuple((speeds[j - 1] + speeds[j]) / 2 for j in range(1, len(speeds)))
        object.__setattr__(self, 'm', midpoints)

    @classmethod
    def from_specs(cls, specs: Sequence[SolitonSpec]) -> "CutoffFamily":
        return cls(tuple(sorted(spec.c for spec in specs)))

    @property
    def size(self) -> int:
        return len(self.speeds)

    def index_of(self, c: float) -> int:
        try:
            return self.speeds.index(float(c))
        except ValueError:
            raise ParameterError(f"speed {c} is not part of the cutoff family {self.speeds}")

    def order(self, speeds: Sequence[float]) -> List[int]:
        """Positions in `speeds` listed in family order.

        `speeds` may come in any order but must be the family speeds; entry j
        of the result is the caller index of the soliton under cutoff phi_j.
        """
        speeds = [float(c) for c in speeds]
        if len(speeds) != self.size:
            raise ParameterError(f"expected {self.size} speeds, got {len(speeds)}")
        order = [int(i) for i in np.argsort(speeds)]
        if not np.allclose([speeds[i] for i in order], self.speeds, rtol=0.0, atol=1e-12):
            raise ParameterError(f"speeds {speeds} do not match the cutoff family {self.speeds}")
        return order


def cutoffs(family: CutoffFamily, grid: Grid, t: float) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Return ([psi_1..psi_N], [phi_1..phi_N]) sampled on the grid at time t."""
    if not t > 0:
        raise ValueError(f"cutoffs need t > 0, got {t}")
    root_t = np.sqrt(t)
    psis = [np.ones(grid.n_points)]
    for mj in family.m:
        psis.append(smoothstep((grid.x - mj * t) / root_t))

    phis = [psis[j] - psis[j + 1] for j in range(family.size - 1)]
    phis.append(psis[-1])
    return psis, phis


@dataclass(frozen=True)
class LocalizedValues:
    j: int
    energy: float
    momentum1: float
    momentum2: float


def localized_functionals(state: FieldState, params: SystemParams, family: CutoffFamily,
                          t: float) -> List[LocalizedValues]:
    """E_j, Q1_j, Q2_j: the conserved densities weighted by phi_j(x, t)."""
    _, phis = cutoffs(family, state.grid, t)
    e_density = energy_density(state, params)
    q1_density = momentum1_density(state, params)
    q2_density = momentum2_density(state)

    values = []
    for j, weight in enumerate(phis):
        values.append(LocalizedValues(
            j=j,
            energy=integrate(weight * e_density, state.grid),
            momentum1=integrate(weight * q1_density, state.grid),
            momentum2=integrate(weight * q2_density, state.grid),
        ))
    return values


def action_S(state: FieldState, params: SystemParams, family: CutoffFamily, t: float,
             omegas: Sequence[float], speeds: Sequence[float]) -> float:
    """S = sum_j (E_j - c_j Q1_j - omega_j Q2_j).

    omegas and speeds share one order (any order); each pair is matched to
    the cutoff of its speed.
    """
    if len(omegas) != family.size or len(speeds) != family.size:
        raise ParameterError(
            f"expected {family.size} frequencies and speeds, got {len(omegas)} and {len(speeds)}"
        )
    total = 0.0
    for local, i in zip(localized_functionals(state, params, family, t), family.order(speeds)):
        total += local.energy - speeds[i] * local.momentum1 - omegas[i] * local.momentum2
    return total


def _distinct(spec_j: SolitonSpec, spec_k: SolitonSpec) -> None:
    if spec_j == spec_k or spec_j.c == spec_k.c:
        raise ParameterError("interaction integrals need two different solitons")


def interaction_integral(spec_j: SolitonSpec, spec_k: SolitonSpec, params: SystemParams,
                         grid: Grid, t: float, family: CutoffFamily) -> float:
    """int (|R_k^(1)| + |d_x R_k^(1)|) phi_j dx: soliton k seen through cutoff j."""
    _distinct(spec_j, spec_k)
    _, phis = cutoffs(family, grid, t)
    weight = phis[family.index_of(spec_j.c)]

    u_k = soliton_state(spec_k, params, grid, t).u
    du_k = spectral_derivative(u_k, grid, 1)
    return integrate((np.abs(u_k) + np.abs(du_k)) * weight, grid)


def pairwise_interaction(spec_j: SolitonSpec, spec_k: SolitonSpec, params: SystemParams,
                         grid: Grid, t: float) -> float:
    """int |R_j^(1)| |R_k^(1)| dx."""
    _distinct(spec_j, spec_k)
    u_j = soliton_state(spec_j, params, grid, t).u
    u_k = soliton_state(spec_k, params, grid, t).u
    return integrate(np.abs(u_j) * np.abs(u_k), grid)
