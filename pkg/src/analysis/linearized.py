"""
Linearization around a soliton: the scalar operators L1, L2, the Hessian H of
S = E - omega Q2 - c Q1, its quadratic form and the localized form H_loc.

With A = (1 - c^2 - omega^2) / (1 - c^2) and the profile width k,

    L1 = -(1 - c^2) d_xx + A - 6A sech^2(k x)
    L2 = -(1 - c^2) d_xx + A - 2A sech^2(k x)

are Poschl-Teller operators: L1 has the simple eigenvalue -3A with
eigenfunction sech^2(k x) and the kernel phi'; L2 has the kernel phi.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..exceptions import ConvergenceError, GridError, ParameterError
from ..observables import CutoffFamily, cutoffs, localized_functionals, x_norm_sq
from ..observables.localized import action_S
from ..solitons import (
    FieldState,
    SolitonSpec,
    SystemParams,
    check_admissible,
    phi_profile,
    soliton_phase,
    soliton_state,
)
from ..spectral import Grid, integrate, spectral_derivative

logger = logging.getLogger(__name__)

DENSE_LIMIT = 4096


def _sech(z: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True, eq=False)
class SchroedingerOperator:
    """L f = -a f'' + (b - d sech^2(k (x - center))) f on a periodic grid."""

    a: float
    b: float
    d: float
    k: float
    grid: Grid = field(repr=False)
    center: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"kinetic coefficient must be positive, got {self.a}")

    @property
    def potential(self) -> np.ndarray:
        return self.b - self.d * _sech(self.k * (self.grid.x - self.center)) ** 2

    def apply(self, f: np.ndarray) -> np.ndarray:
        return -self.a * spectral_derivative(f, self.grid, 2) + self.potential * f

    def form(self, f: np.ndarray) -> float:
        """<L f, f> in the real L2 pairing."""
        return integrate(np.real(self.apply(f) * np.conj(f)), self.grid)

    def dense_matrix(self) -> np.ndarray:
        n = self.grid.n_points
        identity = np.eye(n)
        d2 = np.fft.ifft(-(self.grid.xi ** 2)[:, None] * np.fft.fft(identity, axis=0), axis=0).real
        matrix = -self.a * d2 + np.diag(self.potential)
        return 0.5 * (matrix + matrix.T)


def _operator(spec: SolitonSpec, params: SystemParams, grid: Grid, depth: float) -> SchroedingerOperator:
    check_admissible(spec, params)
    one_minus_c2 = 1.0 - spec.c ** 2
    big_a = spec.gap / one_minus_c2
    return SchroedingerOperator(a=one_minus_c2, b=big_a, d=depth * big_a, k=spec.k,
                                grid=grid, center=spec.x0)


def assemble_L1(spec: SolitonSpec, params: SystemParams, grid: Grid) -> SchroedingerOperator:
    return _operator(spec, params, grid, 6.0)


def assemble_L2(spec: SolitonSpec, params: SystemParams, grid: Grid) -> SchroedingerOperator:
    return _operator(spec, params, grid, 2.0)


@dataclass(frozen=True, eq=False)
class EigenPair:
    index: int
    value: float
    vector: np.ndarray = field(repr=False)
    residual: float = 0.0


def eigs_lowest(op: SchroedingerOperator, count: int = 4,
                residual_tol: float = 1e-8) -> List[EigenPair]:
    """Lowest eigenpairs, ascending, eigenvectors normalized in L2."""
    if not 1 <= count <= 10:
        raise ValueError(f"count must be between 1 and 10, got {count}")
    grid = op.grid

    if grid.n_points <= DENSE_LIMIT:
        values, vectors = linalg.eigh(op.dense_matrix(), subset_by_index=[0, count - 1])
    else:
        logger.info("matrix-free eigensolve for n=%d", grid.n_points)
        applier = LinearOperator((grid.n_points, grid.n_points), matvec=op.apply, dtype=float)
        try:
            values, vectors = eigsh(applier, k=count, which='SA', tol=1e-12, maxiter=50 * grid.n_points)
        except ArpackNoConvergence as e:
            raise ConvergenceError(f"eigsh did not converge: {e}",
                                   residuals=getattr(e, 'eigenvalues', None)) from e
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]

    pairs = []
    for i in range(count):
        v = vectors[:, i] / np.sqrt(grid.dx)
        v = v * np.sign(v[np.argmax(np.abs(v))])
        r = op.apply(v) - values[i] * v
        residual = float(np.sqrt(integrate(r ** 2, grid)))
        if residual > residual_tol:
            logger.warning("eigenpair %d residual %.3e above %.1e", i, residual, residual_tol)
        pairs.append(EigenPair(index=i, value=float(values[i]), vector=v, residual=residual))
    return pairs


def correlation(f: np.ndarray, g: np.ndarray, grid: Grid) -> float:
    """|<f, g>| / (||f|| ||g||)."""
    fg = integrate(np.real(f * np.conj(g)), grid)
    ff = integrate(np.abs(f) ** 2, grid)
    gg = integrate(np.abs(g) ** 2, grid)
    return abs(fg) / np.sqrt(ff * gg)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """eta = (eta1, eta2, eta3, eta4) in the energy space."""

    eta1: np.ndarray
    eta2: np.ndarray
    eta3: np.ndarray
    eta4: np.ndarray
    grid: Grid = field(repr=False)

    def __post_init__(self):
        for name in ("eta1", "eta2", "eta3", "eta4"):
            self.grid.check_field(getattr(self, name), name)

    @classmethod
    def from_state(cls, state: FieldState) -> "Perturbation":
        return cls(eta1=np.asarray(state.u, dtype=complex), eta2=np.asarray(state.rho, dtype=complex),
                   eta3=np.real(state.v), eta4=np.real(state.n), grid=state.grid)

    def to_state(self, t: float = 0.0) -> FieldState:
        return FieldState(u=self.eta1, rho=self.eta2, v=self.eta3, n=self.eta4, grid=self.grid, t=t)

    def components(self):
        return self.eta1, self.eta2, self.eta3, self.eta4

    def __add__(self, other: "Perturbation") -> "Perturbation":
        return Perturbation(*[a + b for a, b in zip(self.components(), other.components())], grid=self.grid)

    def scaled(self, factor: float) -> "Perturbation":
        return Perturbation(*[factor * a for a in self.components()], grid=self.grid)

    def pairing(self, other: "Perturbation") -> float:
        """Sum of the real L2 pairings of the four components."""
        if not self.grid.same_as(other.grid):
            raise GridError("perturbations live on different grids")
        return sum(integrate(np.real(a * np.conj(b)), self.grid)
                   for a, b in zip(self.components(), other.components()))

    def norm(self) -> float:
        return float(np.sqrt(self.pairing(self)))

    def x_norm_sq(self) -> float:
        return x_norm_sq(self.to_state())


def apply_H(spec: SolitonSpec, params: SystemParams, eta: Perturbation, t: float = 0.0) -> Perturbation:
    """Hessian of E - omega Q2 - c Q1 at the soliton R(t), applied to eta."""
    grid = eta.grid
    soliton = soliton_state(spec, params, grid, t)
    r1, r3 = soliton.u, soliton.v
    a, b, c, w = params.alpha, params.beta, spec.c, spec.omega
    e1, e2, e3, e4 = eta.components()

    d_e1 = spectral_derivative(e1, grid, 1)
    d_e2 = spectral_derivative(e2, grid, 1)
    dd_e1 = spectral_derivative(e1, grid, 2)
    overlap = np.real(r1 * np.conj(e1))

    row1 = (2 * (-dd_e1 + e1 + a * r3 * e1 + b * np.abs(r1) ** 2 * e1)
            + 4 * b * r1 * overlap + 2 * a * r1 * e3 + 2 * c * d_e2 + 2j * w * e2)
    row2 = 2 * (e2 - c * d_e1 - 1j * w * e1)
    row3 = 2 * a * overlap + a * e3 + a * c * e4
    row4 = a * e4 + a * c * e3
    return Perturbation(row1, row2, row3, row4, grid=grid)


def quadratic_form_H(spec: SolitonSpec, params: SystemParams, eta: Perturbation, t: float = 0.0) -> float:
    """<H eta, eta> by direct pairing."""
    return apply_H(spec, params, eta, t).pairing(eta)


@dataclass(frozen=True)
class Form2Terms:
    """Pieces of the decomposed quadratic form; total = sum of the four."""

    l1: float
    l2: float
    square: float
    coupling: float

    @property
    def total(self) -> float:
        return self.l1 + self.l2 + self.square + self.coupling


def quadratic_form_decomposed(spec: SolitonSpec, params: SystemParams, eta: Perturbation,
                              t: float = 0.0) -> Form2Terms:
    """<H eta, eta> written as L1/L2 forms plus completed squares.

    With z1 = exp(-i lambda) eta1 = y1 + i y2 and z2 = exp(-i lambda) eta2:
    2<L1 y1, y1> + 2<L2 y2, y2> + 2 int |z2 - i s z1 - c z1'|^2
    + alpha int (c eta3 + eta4)^2 + (2 phi y1 / sqrt(1 - c^2) + sqrt(1 - c^2) eta3)^2.
    """
    grid = eta.grid
    one_minus_c2 = 1.0 - spec.c ** 2
    center = spec.center(t)
    phase = np.exp(-1j * soliton_phase(spec, grid, t))

    z1 = phase * eta.eta1
    z2 = phase * eta.eta2
    y1, y2 = z1.real, z1.imag

    shifted = SolitonSpec(omega=spec.omega, c=spec.c, x0=center, gamma0=spec.gamma0)
    l1 = assemble_L1(shifted, params, grid).form(y1)
    l2 = assemble_L2(shifted, params, grid).form(y2)

    defect = z2 - 1j * spec.s * z1 - spec.c * spectral_derivative(z1, grid, 1)
    square = integrate(np.abs(defect) ** 2, grid)

    phi = phi_profile(spec, params, grid, center)
    sq1 = spec.c * eta.eta3 + eta.eta4
    sq2 = 2 * phi * y1 / np.sqrt(one_minus_c2) + np.sqrt(one_minus_c2) * eta.eta3
    coupling = params.alpha * integrate(sq1 ** 2 + sq2 ** 2, grid)

    return Form2Terms(l1=2 * l1, l2=2 * l2, square=2 * square, coupling=coupling)


def ground_profile(spec: SolitonSpec, grid: Grid, center: Optional[float] = None) -> np.ndarray:
    """Psi = sech^2(k (x - center)), the L1 ground state (unnormalized)."""
    x0 = spec.x0 if center is None else center
    return _sech(spec.k * (grid.x - x0)) ** 2


def kernel_directions(spec: SolitonSpec, params: SystemParams, grid: Grid,
                      t: float = 0.0) -> List[Perturbation]:
    """d_x R and Y = (i R1, i R2, 0, 0)."""
    soliton = soliton_state(spec, params, grid, t)
    dx = [spectral_derivative(f, grid, 1) for f in soliton.fields()]
    zero = np.zeros(grid.n_points)
    return [
        Perturbation(dx[0], dx[1], dx[2], dx[3], grid=grid),
        Perturbation(1j * soliton.u, 1j * soliton.rho, zero, zero.copy(), grid=grid),
    ]


def negative_direction(spec: SolitonSpec, params: SystemParams, grid: Grid,
                       t: float = 0.0) -> Perturbation:
    """Upsilon, built from Psi; theta / c is written as s so c = 0 is regular."""
    check_admissible(spec, params)
    one_minus_c2 = 1.0 - spec.c ** 2
    center = spec.center(t)
    z = spec.k * (grid.x - center)
    big_psi = _sech(z) ** 2
    d_big_psi = -2 * spec.k * big_psi * np.tanh(z)
    phi = phi_profile(spec, params, grid, center)
    phase = np.exp(1j * soliton_phase(spec, grid, t))

    return Perturbation(
        eta1=phase * big_psi,
        eta2=phase * (1j * spec.s * big_psi + spec.c * d_big_psi),
        eta3=-2 * phi * big_psi / one_minus_c2,
        eta4=2 * spec.c * phi * big_psi / one_minus_c2,
        grid=grid,
    )


def negative_value(spec: SolitonSpec) -> float:
    """Closed form <H Upsilon, Upsilon> = -2 (3A) int sech^4(k x) dx = -8A / k."""
    big_a = spec.gap / (1.0 - spec.c ** 2)
    return -2.0 * 3.0 * big_a * (4.0 / 3.0) / spec.k


def hessian_loc_form(eps: Perturbation, tilde: Sequence[FieldState], params: SystemParams,
                     family: CutoffFamily, t: float, omegas: Sequence[float],
                     speeds: Sequence[float], include_quartic: bool = True) -> float:
    """Localized quadratic form H_loc(eps) around the modulated sum of solitons.

    tilde, omegas and speeds share one order; each soliton is matched to the
    cutoff phi_j of its speed, which weights its speed and frequency terms.
    """
    if len(tilde) != family.size or len(omegas) != family.size:
        raise ParameterError(f"expected {family.size} solitons, got {len(tilde)} and {len(omegas)} frequencies")
    order = family.order(speeds)
    grid = eps.grid
    a, b = params.alpha, params.beta
    e1, e2, e3, e4 = eps.components()
    d_e1 = spectral_derivative(e1, grid, 1)
    mod2 = np.abs(e1) ** 2

    density = np.abs(d_e1) ** 2 + mod2 + np.abs(e2) ** 2 + 0.5 * a * (e3 ** 2 + e4 ** 2)
    if include_quartic:
        density = density + 0.5 * b * mod2 ** 2

    _, phis = cutoffs(family, grid, t)
    for weight, i in zip(phis, order):
        r, omega, c = tilde[i], omegas[i], speeds[i]
        overlap = np.real(r.u * np.conj(e1))
        density = density + a * r.v * mod2 + 2 * a * overlap * e3
        density = density + b * np.abs(r.u) ** 2 * mod2 + 2 * b * overlap ** 2
        density = density + weight * (a * c * e3 * e4
                                      - 2 * c * np.real(d_e1 * np.conj(e2))
                                      - 2 * omega * np.imag(np.conj(e1) * e2))
    return integrate(density, grid)


def expansion_defect(state: FieldState, tilde: Sequence[FieldState], params: SystemParams,
                     family: CutoffFamily, t: float, omegas: Sequence[float],
                     speeds: Sequence[float]) -> float:
    """S(u) - sum_j S_j,loc(R_j) - H_loc(eps) with eps = u - sum_j R_j."""
    total = tilde[0]
    for r in tilde[1:]:
        total = total + r
    eps = Perturbation.from_state(state - total)

    pieces = 0.0
    for j, i in enumerate(family.order(speeds)):
        local = localized_functionals(tilde[i], params, family, t)[j]
        pieces += local.energy - speeds[i] * local.momentum1 - omegas[i] * local.momentum2

    s_value = action_S(state, params, family, t, omegas, speeds)
    return s_value - pieces - hessian_loc_form(eps, tilde, params, family, t, omegas, speeds)
