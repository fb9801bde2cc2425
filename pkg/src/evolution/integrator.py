"""
Time stepping for the KGZ system, forward and backward.

Three schemes share one nonlinearity
F(u, rho, v, n) = (0, alpha u v + beta |u|^2 u, 0, (|u|^2)_x):

- RK4: classical Runge-Kutta on the full right-hand side.
- Strang: half linear flow, exact nonlinear flow, half linear flow.
- Lawson: Runge-Kutta 4 in the interaction picture of the linear flow.

Backward integration is the same stepper with dt < 0.
"""

import logging
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import EvolutionAborted, IntegrationBlowupError
from ..solitons import FieldState, SystemParams
from ..spectral import Grid, dealias_mask
from .propagator import LinearPropagator

logger = logging.getLogger(__name__)

Fields = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
Observer = Callable[[int, float, FieldState], Optional[bool]]


class Scheme(str, Enum):
    RK4 = "rk4"
    STRANG = "strang"
    LAWSON = "lawson"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, Scheme):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown scheme '{value}', expected one of {[s.value for s in cls]}")

    @property
    def order(self) -> int:
        return 2 if self is Scheme.STRANG else 4


def _axpy(a: float, x: Fields, y: Fields) -> Fields:
    return tuple(a * xi + yi for xi, yi in zip(x, y))


def _scale(a: float, x: Fields) -> Fields:
    return tuple(a * xi for xi in x)


class _Spectral:
    """Derivative and dealiasing kernels bound to one grid.

    With dealiasing on, products are formed on a grid of 2n points and
    truncated back, then the 2/3 mask is applied to the result.
    """

    def __init__(self, grid: Grid, dealias: bool):
        self.grid = grid
        self.ik = 1j * grid.xi_odd
        self.k2 = grid.xi ** 2
        self.mask = dealias_mask(grid) if dealias else None
        self.half = grid.n_points // 2

    @property
    def dealias(self) -> bool:
        return self.mask is not None

    def dx(self, f: np.ndarray) -> np.ndarray:
        return np.fft.ifft(self.ik * np.fft.fft(f)).real

    def dxx_complex(self, f: np.ndarray) -> np.ndarray:
        return np.fft.ifft(-self.k2 * np.fft.fft(f))

    def padded(self, f: np.ndarray) -> np.ndarray:
        """Samples of f on the doubled grid (Nyquist mode dropped)."""
        n, half = self.grid.n_points, self.half
        f_hat = np.fft.fft(f)
        g_hat = np.zeros(2 * n, dtype=complex)
        g_hat[:half] = f_hat[:half]
        g_hat[n + half + 1:] = f_hat[half + 1:]
        out = np.fft.ifft(g_hat) * 2
        return out.real if np.isrealobj(f) else out

    def truncated_hat(self, g: np.ndarray) -> np.ndarray:
        """Masked spectrum on the base grid of a product sampled on the doubled grid."""
        n, half = self.grid.n_points, self.half
        g_hat = np.fft.fft(g)
        f_hat = np.zeros(n, dtype=complex)
        f_hat[:half] = g_hat[:half]
        f_hat[half + 1:] = g_hat[n + half + 1:]
        return f_hat * self.mask / 2


def _nonlinear(fields: Fields, params: SystemParams, ops: _Spectral) -> Fields:
    u, rho, v, n = fields
    zeros_u, zeros_v = np.zeros_like(u), np.zeros_like(v)
    if not ops.dealias:
        mod2 = (u * np.conj(u)).real
        return zeros_u, params.alpha * u * v + params.beta * mod2 * u, zeros_v, ops.dx(mod2)

    up, vp = ops.padded(u), ops.padded(v)
    mod2 = (up * np.conj(up)).real
    coupling = np.fft.ifft(ops.truncated_hat(params.alpha * up * vp + params.beta * mod2 * up))
    flux = np.fft.ifft(ops.ik * ops.truncated_hat(mod2)).real
    return zeros_u, coupling, zeros_v, flux


def _rhs_fields(fields: Fields, params: SystemParams, ops: _Spectral) -> Fields:
    u, rho, v, n = fields
    _, coupling, _, flux = _nonlinear(fields, params, ops)
    return -rho, -ops.dxx_complex(u) + u + coupling, ops.dx(n), ops.dx(v) + flux


def rhs(state: FieldState, params: SystemParams, dealias: bool = False) -> FieldState:
    """Time derivative (u_t, rho_t, v_t, n_t) of the system."""
    ops = _Spectral(state.grid, dealias)
    return FieldState.from_fields(_rhs_fields(state.fields(), params, ops), state.grid, state.t)


class Stepper:
    """Single-step map for a fixed grid, dt and scheme; caches the propagators."""

    def __init__(self, grid: Grid, params: SystemParams, dt: float,
                 scheme: Scheme = Scheme.LAWSON, dealias: bool = True):
        if not dt or not np.isfinite(dt):
            raise ValueError(f"dt must be finite and nonzero, got {dt}")
        self.grid = grid
        self.params = params
        self.dt = float(dt)
        self.scheme = Scheme.parse(scheme)
        self.ops = _Spectral(grid, dealias)
        if self.scheme is not Scheme.RK4:
            self.full = LinearPropagator.build(grid, self.dt)
            self.half = LinearPropagator.build(grid, self.dt / 2)

    def advance(self, fields: Fields) -> Fields:
        if self.scheme is Scheme.RK4:
            return self._rk4(fields)
        if self.scheme is Scheme.STRANG:
            return self._strang(fields)
        return self._lawson(fields)

    def _rk4(self, y: Fields) -> Fields:
        h, f = self.dt, lambda z: _rhs_fields(z, self.params, self.ops)
        k1 = f(y)
        k2 = f(_axpy(h / 2, k1, y))
        k3 = f(_axpy(h / 2, k2, y))
        k4 = f(_axpy(h, k3, y))
        return tuple(yi + h / 6 * (a + 2 * b + 2 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4))

    def _strang(self, y: Fields) -> Fields:
        h = self.dt
        u, rho, v, n = self.half.apply_fields(y)
        # u and v are frozen under the nonlinear flow, so it is exact
        _, coupling, _, flux = _nonlinear((u, rho, v, n), self.params, self.ops)
        return self.half.apply_fields((u, rho + h * coupling, v, n + h * flux))

    def _lawson(self, y: Fields) -> Fields:
        h = self.dt
        full, half = self.full.apply_fields, self.half.apply_fields
        nl = lambda z: _nonlinear(z, self.params, self.ops)

        ey_half = half(y)
        ey_full = full(y)
        n1 = nl(y)
        n2 = nl(_axpy(h / 2, half(n1), ey_half))
        n3 = nl(_axpy(h / 2, n2, ey_half))
        n4 = nl(_axpy(h, half(n3), ey_full))

        e_n1 = full(n1)
        e_mid = half(tuple(a + b for a, b in zip(n2, n3)))
        return tuple(
            ey + h / 6 * (a + 2 * b + c)
            for ey, a, b, c in zip(ey_full, e_n1, e_mid, n4)
        )


def _finite(fields: Fields) -> bool:
    return all(np.all(np.isfinite(f)) for f in fields)


def step(state: FieldState, params: SystemParams, dt: float,
         scheme: Scheme = Scheme.LAWSON, dealias: bool = True) -> FieldState:
    """One time step of size dt (negative dt steps backward)."""
    stepper = Stepper(state.grid, params, dt, scheme, dealias)
    fields = stepper.advance(state.fields())
    if not _finite(fields):
        raise IntegrationBlowupError(state.t)
    return FieldState.from_fields(fields, state.grid, state.t + dt)


def evolve(state: FieldState, params: SystemParams, t_target: float, dt: float,
           scheme: Scheme = Scheme.LAWSON, observer: Optional[Observer] = None,
           every: int = 1, dealias: bool = True) -> FieldState:
    """Integrate from state.t to t_target; the observer sees every `every`-th step.

    The observer is called as observer(step_index, t, state) at step 0, every
    `every` steps and at the final step. Returning False stops the run with
    EvolutionAborted; raising inside the observer aborts the same way. dt is
    rounded to the nearest step that divides the interval, so the run always
    lands on t_target.
    """
    interval = t_target - state.t
    if interval == 0:
        _notify(observer, 0, state)
        return state
    if dt == 0 or np.sign(dt) != np.sign(interval):
        raise ValueError(f"dt={dt} has the wrong sign to reach t={t_target} from t={state.t}")
    if every < 1:
        raise ValueError(f"observer stride must be positive, got {every}")

    n_steps = max(1, int(round(interval / dt)))
    dt_eff = interval / n_steps

    stepper = Stepper(state.grid, params, dt_eff, scheme, dealias)
    logger.info("evolving %d %s steps of dt=%.3e from t=%.6g to t=%.6g",
                n_steps, stepper.scheme.value, dt_eff, state.t, t_target)

    t0 = state.t
    fields = state.fields()
    _notify(observer, 0, state)
    for i in range(1, n_steps + 1):
        new_fields = stepper.advance(fields)
        if not _finite(new_fields):
            t_reached = t0 + (i - 1) * dt_eff
            logger.error("non-finite fields after step %d; last finite time %.6g", i, t_reached)
            raise IntegrationBlowupError(t_reached)
        fields = new_fields
        if observer is not None and (i % every == 0 or i == n_steps):
            t = t_target if i == n_steps else t0 + i * dt_eff
            _notify(observer, i, FieldState.from_fields(fields, state.grid, t))

    return FieldState.from_fields(fields, state.grid, t_target)


def _notify(observer: Optional[Observer], index: int, state: FieldState) -> None:
    if observer is None:
        return
    try:
        verdict = observer(index, state.t, state)
    except Exception as e:
        logger.error("observer failed at step %d (t=%.6g): %s", index, state.t, e)
        raise EvolutionAborted(f"observer raised at t={state.t:.6g}: {e}", state, state.t) from e
    if verdict is False:
        logger.warning("observer requested stop at step %d (t=%.6g)", index, state.t)
        raise EvolutionAborted(f"observer stopped the run at t={state.t:.6g}", state, state.t)


def trajectory(state: FieldState, params: SystemParams, times: Sequence[float], dt: float,
               scheme: Scheme = Scheme.LAWSON, dealias: bool = True):
    """States at the requested times, integrating piecewise between them."""
    states = []
    current = state
    for t in times:
        if t != current.t:
            step_dt = abs(dt) if t > current.t else -abs(dt)
            current = evolve(current, params, t, step_dt, scheme, dealias=dealias)
        states.append(current)
    return states
