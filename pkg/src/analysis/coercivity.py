"""
Sampled coercivity of the Hessian form under the modulation orthogonality conditions.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..observables import CutoffFamily
from ..solitons import (
    SolitonSpec,
    SystemParams,
    check_distinct_speeds,
    phi_derivative,
    phi_profile,
    soliton_phase,
    soliton_state,
)
from ..spectral import Grid, integrate, spectral_derivative
from .linearized import (
    Perturbation,
    assemble_L1,
    assemble_L2,
    ground_profile,
    hessian_loc_form,
    negative_direction,
    quadratic_form_H,
)

logger = logging.getLogger(__name__)


def random_profile(grid: Grid, rng: np.random.Generator, centers: Sequence[float],
                   bumps: int = 4, complex_valued: bool = True) -> np.ndarray:
    """Sum of modulated Gaussians; depends on the rng stream only, not on the grid."""
    out = np.zeros(grid.n_points, dtype=complex if complex_valued else float)
    for center in centers:
        for _ in range(bumps):
            amp = rng.normal()
            if complex_valued:
                amp = amp + 1j * rng.normal()
            width = rng.uniform(0.5, 2.0)
            offset = rng.uniform(-3.0, 3.0)
            wave = rng.uniform(-2.0, 2.0)
            x = grid.x - center - offset
            carrier = np.exp(1j * wave * x) if complex_valued else np.cos(wave * x)
            out = out + amp * np.exp(-x ** 2 / (2 * width ** 2)) * carrier
    return out


def random_perturbation(grid: Grid, rng: np.random.Generator,
                        centers: Sequence[float] = (0.0,), bumps: int = 4) -> Perturbation:
    return Perturbation(
        eta1=random_profile(grid, rng, centers, bumps),
        eta2=random_profile(grid, rng, centers, bumps),
        eta3=random_profile(grid, rng, centers, bumps, complex_valued=False),
        eta4=random_profile(grid, rng, centers, bumps, complex_valued=False),
        grid=grid,
    )


def gram_schmidt_project(f: np.ndarray, directions: Sequence[np.ndarray], grid: Grid) -> np.ndarray:
    """Remove from f its component along span(directions) in the real L2 pairing."""
    basis: List[np.ndarray] = []
    for d in directions:
        w = np.array(d, dtype=complex if np.iscomplexobj(f) or np.iscomplexobj(d) else float)
        for e in basis:
            w = w - integrate(np.real(w * np.conj(e)), grid) * e
        norm = np.sqrt(integrate(np.abs(w) ** 2, grid))
        if norm > 1e-12:
            basis.append(w / norm)
    out = np.array(f, copy=True)
    for e in basis:
        out = out - integrate(np.real(out * np.conj(e)), grid) * e
    return out


def constraint_directions(spec: SolitonSpec, params: SystemParams, grid: Grid,
                          t: float = 0.0) -> List[np.ndarray]:
    """i R1, d_x R1 and exp(i lambda) Psi for the soliton at time t."""
    soliton = soliton_state(spec, params, grid, t)
    phase = np.exp(1j * soliton_phase(spec, grid, t))
    big_psi = ground_profile(spec, grid, spec.center(t))
    return [1j * soliton.u, spectral_derivative(soliton.u, grid, 1), phase * big_psi]


@dataclass(frozen=True)
class SolitonCoercivity:
    j: int
    delta: float
    delta_l1: float
    delta_l2: float
    negative_quotient: float


@dataclass(frozen=True)
class CoercivityReport:
    samples: int
    solitons: List[SolitonCoercivity] = field(default_factory=list)
    localized_k: Optional[float] = None

    def to_rows(self) -> List[dict]:
        rows = []
        for entry in self.solitons:
            rows.append({
                'j': entry.j,
                'delta': entry.delta,
                'delta_l1': entry.delta_l1,
                'delta_l2': entry.delta_l2,
                'negative_quotient': entry.negative_quotient,
                'localized_k': self.localized_k,
                'samples': self.samples,
            })
        return rows


def soliton_coercivity(spec: SolitonSpec, params: SystemParams, grid: Grid, samples: int,
                       rng: np.random.Generator, j: int = 0) -> SolitonCoercivity:
    """Minimum Rayleigh quotients for one soliton, sampled over projected perturbations."""
    directions = constraint_directions(spec, params, grid)
    l1 = assemble_L1(spec, params, grid)
    l2 = assemble_L2(spec, params, grid)
    phi = phi_profile(spec, params, grid)
    dphi = phi_derivative(spec, params, grid)
    big_psi = ground_profile(spec, grid)

    delta = delta_l1 = delta_l2 = np.inf
    for _ in range(samples):
        eta = random_perturbation(grid, rng, centers=(spec.x0,))
        eta = Perturbation(gram_schmidt_project(eta.eta1, directions, grid),
                           eta.eta2, eta.eta3, eta.eta4, grid=grid)
        delta = min(delta, quadratic_form_H(spec, params, eta) / eta.x_norm_sq())

        y1 = gram_schmidt_project(random_profile(grid, rng, (spec.x0,), complex_valued=False),
                                  [big_psi, dphi], grid)
        delta_l1 = min(delta_l1, l1.form(y1) / integrate(y1 ** 2, grid))

        y2 = gram_schmidt_project(random_profile(grid, rng, (spec.x0,), complex_valued=False),
                                  [phi], grid)
        delta_l2 = min(delta_l2, l2.form(y2) / integrate(y2 ** 2, grid))

    upsilon = negative_direction(spec, params, grid)
    noise = random_perturbation(grid, rng, centers=(spec.x0,)).scaled(1e-2)
    mixed = upsilon + noise
    negative_quotient = quadratic_form_H(spec, params, mixed) / mixed.x_norm_sq()

    logger.info("soliton %d: delta=%.4g delta_l1=%.4g delta_l2=%.4g negative=%.4g",
                j, delta, delta_l1, delta_l2, negative_quotient)
    return SolitonCoercivity(j=j, delta=float(delta), delta_l1=float(delta_l1),
                             delta_l2=float(delta_l2), negative_quotient=float(negative_quotient))


def localized_coercivity(specs: Sequence[SolitonSpec], params: SystemParams, grid: Grid,
                         samples: int, rng: np.random.Generator, t: float) -> float:
    """Minimum of H_loc(eps) / ||eps||_X^2 with eps orthogonal to all 3N directions."""
    ordered = sorted(specs, key=lambda spec: spec.c)
    family = CutoffFamily.from_specs(ordered)
    tilde = [soliton_state(spec, params, grid, t) for spec in ordered]
    directions = [d for spec in ordered for d in constraint_directions(spec, params, grid, t)]
    centers = [spec.center(t) for spec in ordered]
    omegas = [spec.omega for spec in ordered]
    speeds = [spec.c for spec in ordered]

    k_min = np.inf
    for _ in range(samples):
        eps = random_perturbation(grid, rng, centers=centers)
        eps = Perturbation(gram_schmidt_project(eps.eta1, directions, grid),
                           eps.eta2, eps.eta3, eps.eta4, grid=grid)
        value = hessian_loc_form(eps, tilde, params, family, t, omegas, speeds, include_quartic=False)
        k_min = min(k_min, value / eps.x_norm_sq())
    return float(k_min)


def coercivity_report(specs: Sequence[SolitonSpec], params: SystemParams, grid: Grid,
                      samples: int = 100, seed: int = 0, t: float = 20.0) -> CoercivityReport:
    """Per-soliton delta and the localized constant K, measured by sampling."""
    if samples < 10:
        raise ValueError(f"need at least 10 samples, got {samples}")
    check_distinct_speeds(specs)
    rng = np.random.default_rng(seed)

    entries = [soliton_coercivity(spec, params, grid, samples, rng, j) for j, spec in enumerate(specs)]
    localized_k = localized_coercivity(specs, params, grid, samples, rng, t)
    return CoercivityReport(samples=samples, solitons=entries, localized_k=localized_k)
