"""
Backward construction of multi-solitons.

For every final time T^n the run starts from the exact soliton sum R(T^n),
integrates backward to T0 and logs the energy-space distance to R(t) next
to the bound exp(-sqrt(omega_star) c_star t). States at T0 for different n
are compared pairwise (the Cauchy table).

Each sample also logs the localized action S(t) and, when every soliton has
omega != 0, the frequency offset max_j |omega~_j - omega_j| from a modulation
fit. After the run dS/dt is differenced and measured against
t^-1/2 exp(-2 sqrt(omega_star) c_star t), and the offset gets a log-linear
rate fit.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from ..evolution import Scheme, evolve
from ..exceptions import ConvergenceError, EvolutionAborted, IntegrationBlowupError, ParameterError
from ..modulation.fitter import fit_modulation
from ..observables import (
    CutoffFamily,
    action_S,
    conserved_snapshot,
    localized_functionals,
    relative_drift,
    x_norm,
)
from ..solitons import (
    FieldState,
    SolitonSpec,
    SystemParams,
    check_admissible,
    check_distinct_speeds,
    multisoliton_state,
    soliton_state,
)
from ..spectral import Grid
from .constants import envelopes, theorem_constants

logger = logging.getLogger(__name__)

DRIFT_LIMIT = 1e-7


@dataclass
class ConstructionConfig:
    specs: List[SolitonSpec]
    params: SystemParams
    grid: Grid
    T0: float = 20.0
    Tn_list: List[float] = field(default_factory=lambda: [40.0, 60.0, 80.0])
    dt: float = 1e-3
    scheme: Scheme = Scheme.LAWSON
    sample_stride: int = 100
    self_check: bool = True
    self_check_tol: float = 1e-6
    dealias: bool = True
    track_modulation: bool = True

    def validate(self) -> None:
        if len(self.specs) < 2:
            raise ParameterError("the construction needs at least two solitons (c_star undefined)")
        for spec in self.specs:
            check_admissible(spec, self.params)
        check_distinct_speeds(self.specs)
        if not self.Tn_list:
            raise ParameterError("Tn_list is empty")
        if list(self.Tn_list) != sorted(set(self.Tn_list)):
            raise ParameterError(f"Tn_list must be strictly increasing, got {self.Tn_list}")
        if not 0 < self.T0 < min(self.Tn_list):
            raise ParameterError(f"need 0 < T0 < min(Tn_list), got T0={self.T0}, Tn={self.Tn_list}")
        if not self.dt or self.sample_stride < 1:
            raise ParameterError("dt must be nonzero and sample_stride positive")

        horizon = max(self.Tn_list)
        decay = max(10.0 / spec.k for spec in self.specs)
        reach = max(abs(spec.x0) + abs(spec.c) * horizon for spec in self.specs)
        needed = 2.0 * (reach + decay)
        if self.grid.length < needed:
            raise ParameterError(
                f"grid length {self.grid.length} too small: solitons reach the wrap seam by "
                f"t={horizon} (need length >= {needed:.1f})"
            )


@dataclass
class ConstructionRun:
    """One backward run from T^n."""

    n: int
    tn: float
    rows: List[Dict[str, float]] = field(default_factory=list)
    state_T0: Optional[FieldState] = None
    failure: Optional[str] = None
    max_drift: float = 0.0
    fitted_rate: float = float('nan')
    envelope_const: float = float('nan')
    action_const: float = float('nan')
    omega_rate: float = float('nan')

    @property
    def valid(self) -> bool:
        return self.failure is None and self.max_drift < DRIFT_LIMIT


@dataclass
class ConstructionReport:
    omega_star: float
    c_star: float
    T0: float
    runs: List[ConstructionRun] = field(default_factory=list)
    cauchy_table: List[Dict[str, float]] = field(default_factory=list)
    self_check_error: Optional[float] = None

    def summary_rows(self, threshold_scale: float = 1.0) -> List[Dict[str, float]]:
        verdicts = {v.n: v for v in bootstrap_probe(self, threshold_scale)}
        return [{
            'n': run.n,
            'Tn': run.tn,
            't_sharp': verdicts[run.n].t_sharp,
            'envelope_const': run.envelope_const,
            'fitted_rate': run.fitted_rate,
            'action_const': run.action_const,
            'omega_rate': run.omega_rate,
            'max_drift': run.max_drift,
            'valid': run.valid,
        } for run in self.runs]


def _fits_modulation(config: ConstructionConfig) -> bool:
    return config.track_modulation and all(spec.omega != 0.0 for spec in config.specs)


def _omega_offset(config: ConstructionConfig, state: FieldState) -> float:
    """max_j |omega~_j(t) - omega_j|, or nan when the fit fails."""
    try:
        fit = fit_modulation(state, config.params, config.specs)
    except ConvergenceError as e:
        logger.warning("modulation fit failed at t=%.6g: %s", state.t, e)
        return float('nan')
    return max(abs(w - spec.omega) for w, spec in zip(fit.omega_t, config.specs))


def _backward_observer(config: ConstructionConfig, run: ConstructionRun, w_star: float, c_star: float):
    family = CutoffFamily.from_specs(config.specs)
    omegas = [spec.omega for spec in config.specs]
    speeds = [spec.c for spec in config.specs]
    with_fits = _fits_modulation(config)
    initial: Dict[str, float] = {}
    initial_local: List[float] = []

    def observe(index: int, t: float, state: FieldState) -> None:
        reference = multisoliton_state(config.specs, config.params, config.grid, t)
        snapshot = conserved_snapshot(state, config.params)
        local_q2 = [v.momentum2 for v in localized_functionals(state, config.params, family, t)]
        if not initial:
            initial.update(E=snapshot.energy, Q1=snapshot.momentum1, Q2=snapshot.momentum2)
            initial_local.extend(local_q2)

        drift = max(relative_drift(snapshot.energy, initial['E']),
                    relative_drift(snapshot.momentum1, initial['Q1']),
                    relative_drift(snapshot.momentum2, initial['Q2']))
        run.max_drift = max(run.max_drift, drift)

        row = {'t': t, 'x_err': x_norm(state - reference)}
        row.update(envelopes(t, w_star, c_star))
        row.update({
            'E': snapshot.energy,
            'Q1': snapshot.momentum1,
            'Q2': snapshot.momentum2,
            'drift': drift,
            'q2_local_drift': max(abs(a - b) for a, b in zip(local_q2, initial_local)),
            'S': action_S(state, config.params, family, t, omegas, speeds),
            'omega_offset': _omega_offset(config, state) if with_fits else float('nan'),
        })
        run.rows.append(row)

    return observe


def _fit_action(run: ConstructionRun, w_star: float, c_star: float) -> None:
    """dS/dt by differences of the sorted rows and C in |dS/dt| <= C t^-1/2 exp(-2 sqrt(w*) c* t)."""
    if len(run.rows) < 3:
        for row in run.rows:
            row['dS_dt'] = float('nan')
        return
    t = np.array([r['t'] for r in run.rows])
    rate = np.gradient(np.array([r['S'] for r in run.rows]), t)
    for row, value in zip(run.rows, rate):
        row['dS_dt'] = float(value)
    scale = np.exp(-2.0 * math.sqrt(w_star) * c_star * t) / np.sqrt(t)
    run.action_const = float(np.max(np.abs(rate) / scale))


def _fit_omega_offset(run: ConstructionRun) -> None:
    """Exponential rate of |omega~ - omega| over the logged times."""
    t = np.array([r['t'] for r in run.rows])
    offset = np.array([r['omega_offset'] for r in run.rows])
    usable = np.isfinite(offset) & (offset > 0)
    if np.count_nonzero(usable) < 3:
        return
    run.omega_rate = float(-stats.linregress(t[usable], np.log(offset[usable])).slope)


def _fit_decay(run: ConstructionRun, T0: float) -> None:
    midpoint = 0.5 * (T0 + run.tn)
    t = np.array([r['t'] for r in run.rows])
    err = np.array([r['x_err'] for r in run.rows])
    window = (t <= midpoint) & (err > 0)
    if np.count_nonzero(window) < 3:
        logger.warning("run n=%d: too few samples to fit a decay rate", run.n)
        return
    fit = stats.linregress(t[window], np.log(err[window]))
    run.fitted_rate = float(-fit.slope)
    usable = err > 0
    run.envelope_const = float(np.max(err[usable] * np.exp(run.fitted_rate * t[usable])))


def self_check(config: ConstructionConfig) -> float:
    """Backward transport of one exact soliton over one time unit; returns the X error."""
    spec = config.specs[0]
    t_start = config.T0 + 1.0
    state = soliton_state(spec, config.params, config.grid, t_start)
    final = evolve(state, config.params, config.T0, -abs(config.dt), config.scheme, dealias=config.dealias)
    error = x_norm(final - soliton_state(spec, config.params, config.grid, config.T0))
    if error > config.self_check_tol:
        raise ConvergenceError(
            f"backward self-check failed: error {error:.3e} exceeds {config.self_check_tol:.1e} at dt={config.dt}"
        )
    logger.info("backward self-check passed: error %.3e", error)
    return error


def run_construction(config: ConstructionConfig) -> ConstructionReport:
    """Integrate backward from every T^n and assemble the report."""
    config.validate()
    w_star, c_star = theorem_constants(config.specs)
    report = ConstructionReport(omega_star=w_star, c_star=c_star, T0=config.T0)
    if config.self_check:
        report.self_check_error = self_check(config)
    if config.track_modulation and not _fits_modulation(config):
        logger.info("modulation offsets not logged: the fit is degenerate for omega=0 solitons")

    for n, tn in enumerate(config.Tn_list):
        run = ConstructionRun(n=n, tn=tn)
        start = multisoliton_state(config.specs, config.params, config.grid, tn)
        observer = _backward_observer(config, run, w_star, c_star)
        logger.info("run n=%d: backward from T=%.6g to T0=%.6g", n, tn, config.T0)
        try:
            run.state_T0 = evolve(start, config.params, config.T0, -abs(config.dt), config.scheme,
                                  observer=observer, every=config.sample_stride, dealias=config.dealias)
        except (IntegrationBlowupError, EvolutionAborted) as e:
            run.failure = str(e)
            logger.error("run n=%d failed: %s", n, e)
        run.rows.sort(key=lambda r: r['t'])
        _fit_decay(run, config.T0)
        _fit_action(run, w_star, c_star)
        _fit_omega_offset(run)
        if run.max_drift >= DRIFT_LIMIT:
            logger.warning("run n=%d: conserved drift %.3e above %.1e, flagged invalid",
                           n, run.max_drift, DRIFT_LIMIT)
        report.runs.append(run)

    report.cauchy_table = cauchy_table(report.runs)
    return report


def cauchy_table(runs: Sequence[ConstructionRun]) -> List[Dict[str, float]]:
    """Pairwise ||u^n(T0) - u^m(T0)||_X over the successful runs."""
    table = []
    done = [run for run in runs if run.state_T0 is not None]
    for i, a in enumerate(done):
        for b in done[i + 1:]:
            table.append({
                'n': a.n,
                'm': b.n,
                'Tn': a.tn,
                'Tm': b.tn,
                'distance': x_norm(a.state_T0 - b.state_T0),
            })
    return table


@dataclass(frozen=True)
class BootstrapVerdict:
    n: int
    tn: float
    t_sharp: float
    passed: bool


def bootstrap_probe(report: ConstructionReport, threshold_scale: float = 1.0) -> List[BootstrapVerdict]:
    """Largest [t_sharp, T^n] on which x_err <= threshold_scale * bound; pass if t_sharp = T0."""
    verdicts = []
    for run in report.runs:
        if threshold_scale <= 0 or not run.rows:
            verdicts.append(BootstrapVerdict(run.n, run.tn, run.tn, False))
            continue
        t_sharp = run.tn
        for row in sorted(run.rows, key=lambda r: r['t'], reverse=True):
            if row['x_err'] > threshold_scale * row['bound']:
                break
            t_sharp = row['t']
        passed = run.failure is None and math.isclose(t_sharp, report.T0, abs_tol=1e-9)
        verdicts.append(BootstrapVerdict(run.n, run.tn, float(t_sharp), passed))
    return verdicts


def forward_consistency(config: ConstructionConfig, run: ConstructionRun) -> float:
    """Evolve u^n(T0) forward to T^n and measure the distance to R(T^n)."""
    if run.state_T0 is None:
        raise ValueError(f"run n={run.n} has no state at T0")
    final = evolve(run.state_T0, config.params, run.tn, abs(config.dt), config.scheme, dealias=config.dealias)
    return x_norm(final - multisoliton_state(config.specs, config.params, config.grid, run.tn))
