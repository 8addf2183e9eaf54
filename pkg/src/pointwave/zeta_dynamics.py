"""Reduced dynamics of the point amplitude: zeta' = 4 pi (lambda(t) - F(zeta)).

Integrated with an adaptive embedded Dormand-Prince 5(4) pair whose step is
capped by 0.1 / (1 + 4 pi L), L the Lipschitz constant of the truncated
force; the one-dimensional equation is then unconditionally stable for the
explicit scheme and no implicit fallback is needed.  Accepted steps store the
exact right-hand side, giving a C1 cubic Hermite dense output for retarded
lookups.  The a priori amplitude bound is monitored: an accepted node outside
[-Lambda, Lambda] aborts the run (it would mean the truncated force differed
from the true one along the trajectory).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .free_wave import lambda_at
from .initial_data import FOUR_PI, InitialState
from .nonlinearity import Nonlinearity, RootSet, TruncatedNonlinearity, find_roots


class IntegrationError(RuntimeError):
    """Adaptive integration failed (step-size underflow or internal failure)."""


class TruncationEnteredError(IntegrationError):
    """An accepted amplitude left [-Lambda, Lambda]; the a priori bound is violated."""


@dataclass(frozen=True)
class ODEConfig:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-13
    max_step: float = math.inf
    t_final: float = 50.0

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0.0 or self.t_final <= 0.0:
            raise ValueError("max_step and t_final must be positive")


def step_cap(trunc: TruncatedNonlinearity) -> float:
    return 0.1 / (1.0 + FOUR_PI * trunc.lipschitz_constant)


@dataclass(eq=False)
class ZetaHistory:
    """Dense trajectory with exact node derivatives and C1 Hermite interpolation."""

    times: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    Lambda_used: float
    truncation_activated: bool = False

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def rhs(trunc: TruncatedNonlinearity, zeta: float, lam: float) -> float:
    """Right-hand side 4 pi (lambda - F~(zeta)) of the reduced equation."""
    return FOUR_PI * (lam - trunc.F(zeta))


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def integrate_source(
    trunc: TruncatedNonlinearity,
    zeta0: float,
    source: Callable[[float], float],
    cfg: ODEConfig,
) -> ZetaHistory:
    """Integrate the reduced equation with an explicit source term lambda(t)."""
    lam_bound = trunc.Lambda
    cap = min(cfg.max_step, step_cap(trunc))
    t_end = cfg.t_final

    def f(t: float, y: float) -> float:
        return FOUR_PI * (source(t) - trunc.F(y))

    ts = [0.0]
    ys = [zeta0]
    touched_truncation = abs(zeta0) > lam_bound

    k1 = f(0.0, zeta0)
    ds = [k1]
    t, y = 0.0, zeta0
    dt = cap / 10.0
    min_step = max(t_end * 1e-15, 1e-300)
    ks = [0.0] * 7

    while t < t_end:
        dt = min(dt, cap, t_end - t)
        if dt < min_step:
            raise IntegrationError(f"step size underflow at t = {t}")
        ks[0] = k1
        for i in range(1, 7):
            yi = y + dt * sum(_A[i][j] * ks[j] for j in range(i))
            if abs(yi) > lam_bound:
                touched_truncation = True
            ks[i] = f(t + _C[i] * dt, yi)
        y_new = y + dt * sum(_A[6][j] * ks[j] for j in range(6))
        err = dt * sum(_E[j] * ks[j] for j in range(7))
        # dense-output (cubic Hermite) error estimate: third divided difference
        # of the stage slopes approximates the fourth derivative of zeta
        d01 = (ks[2] - ks[0]) / 0.3
        d12 = (ks[3] - ks[2]) / 0.5
        d23 = (ks[6] - ks[3]) / 0.2
        d012 = (d12 - d01) / 0.8
        d123 = (d23 - d12) / 0.7
        err_dense = dt * abs(d123 - d012) / 64.0  # dt^4 |zeta''''| / 384, dt-scaled
        scale = cfg.abs_tol + cfg.rel_tol * max(abs(y), abs(y_new))
        ratio = max(abs(err), err_dense) / scale
        if ratio <= 1.0:
            # land exactly on the horizon so retarded lookups at t_end succeed
            t = t_end if dt >= t_end - t else t + dt
            y = y_new
            k1 = ks[6]  # FSAL
            ts.append(t)
            ys.append(y)
            ds.append(k1)
            if abs(y) > lam_bound:
                raise TruncationEnteredError(
                    f"|zeta({t})| = {abs(y)} exceeds Lambda = {lam_bound}; "
                    "inconsistent energy level or integrator fault"
                )
        factor = 0.9 * ratio ** -0.2 if ratio > 0.0 else 5.0
        dt *= min(5.0, max(0.2, factor))

    return ZetaHistory(
        times=np.array(ts),
        values=np.array(ys),
        derivs=np.array(ds),
        Lambda_used=lam_bound,
        truncation_activated=touched_truncation,
    )


def integrate(state: InitialState, trunc: TruncatedNonlinearity, cfg: ODEConfig) -> ZetaHistory:
    """Integrate the point amplitude driven by the origin trace of the state."""
    return integrate_source(trunc, state.zeta0, lambda t: lambda_at(state, t), cfg)


def zeta_at(history: ZetaHistory, s: float) -> tuple[float, float]:
    """Cubic Hermite interpolation of (zeta, zeta') at time s in [0, horizon]."""
    ts = history.times
    if s < 0.0 or s > ts[-1]:
        raise ValueError(f"time {s} outside the history horizon [0, {ts[-1]}]")
    i = int(np.searchsorted(ts, s, side="right")) - 1
    if i >= len(ts) - 1:
        return float(history.values[-1]), float(history.derivs[-1])
    if i < 0:
        i = 0
    h = ts[i + 1] - ts[i]
    x = (s - ts[i]) / h
    y0, y1 = history.values[i], history.values[i + 1]
    d0, d1 = history.derivs[i], history.derivs[i + 1]
    x2 = x * x
    x3 = x2 * x
    z = (
        (2 * x3 - 3 * x2 + 1) * y0
        + (x3 - 2 * x2 + x) * h * d0
        + (-2 * x3 + 3 * x2) * y1
        + (x3 - x2) * h * d1
    )
    zd = (
        (6 * x2 - 6 * x) * y0 / h
        + (3 * x2 - 4 * x + 1) * d0
        + (-6 * x2 + 6 * x) * y1 / h
        + (3 * x2 - 2 * x) * d1
    )
    return float(z), float(zd)


def zeta_at_arr(history: ZetaHistory, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Hermite interpolation; same values as zeta_at pointwise."""
    ts = history.times
    s = np.asarray(s, dtype=float)
    if s.size and (float(np.min(s)) < 0.0 or float(np.max(s)) > ts[-1]):
        raise ValueError("times outside the history horizon")
    i = np.clip(np.searchsorted(ts, s, side="right") - 1, 0, len(ts) - 2)
    h = ts[i + 1] - ts[i]
    x = (s - ts[i]) / h
    y0, y1 = history.values[i], history.values[i + 1]
    d0, d1 = history.derivs[i], history.derivs[i + 1]
    x2 = x * x
    x3 = x2 * x
    z = (
        (2 * x3 - 3 * x2 + 1) * y0
        + (x3 - 2 * x2 + x) * h * d0
        + (-2 * x3 + 3 * x2) * y1
        + (x3 - x2) * h * d1
    )
    zd = (
        (6 * x2 - 6 * x) * y0 / h
        + (3 * x2 - 4 * x + 1) * d0
        + (-6 * x2 + 6 * x) * y1 / h
        + (3 * x2 - 2 * x) * d1
    )
    return z, zd


@dataclass(frozen=True)
class LimitResult:
    q_plus: float
    residual: float
    converged: bool
    oscillating: bool
    window_mean: float
    window_max_deriv: float


def detect_limit(
    history: ZetaHistory,
    nl: Nonlinearity,
    window: float | None = None,
    roots: RootSet | None = None,
    f_tol: float = 1e-8,
    deriv_tol: float = 1e-8,
    zeta_tol: float = 1e-6,
) -> LimitResult:
    """Decide whether the amplitude has settled on a zero of F.

    Converged means: |F(zeta(T))| <= f_tol, |zeta'| <= deriv_tol over the
    trailing window, the final value sits within zeta_tol of the nearest
    root, and no sustained oscillation was seen (derivative sign changes with
    non-decreasing swing amplitudes flag a possible flat stretch of F).
    """
    T = history.horizon
    w = window if window is not None else min(10.0, T / 5.0)
    mask = history.times >= T - w
    zs = history.values[mask]
    dzs = history.derivs[mask]
    ts = history.times[mask]
    window_mean = float(np.trapezoid(zs, ts) / (ts[-1] - ts[0])) if len(ts) > 1 else float(zs[-1])
    max_deriv = float(np.max(np.abs(dzs)))

    # oscillation heuristic: swing amplitudes around the window mean at sign
    # flips of the derivative; sustained (non-decaying) swings mean the
    # trajectory is not settling on an isolated zero of F
    swings: list[float] = []
    for i in range(1, len(dzs)):
        if dzs[i - 1] * dzs[i] < 0.0:
            swings.append(abs(zs[i] - window_mean))
    oscillating = (
        len(swings) >= 3 and swings[-1] >= 0.5 * swings[0] and swings[-1] > zeta_tol
    )

    if roots is None:
        lo = float(np.min(history.values)) - 1.0
        hi = float(np.max(history.values)) + 1.0
        roots = find_roots(nl, lo, hi, tol=1e-12)

    z_final = float(history.values[-1])
    residual = abs(nl.F(z_final))
    if len(roots) == 0:
        return LimitResult(
            q_plus=math.nan,
            residual=residual,
            converged=False,
            oscillating=oscillating,
            window_mean=window_mean,
            window_max_deriv=max_deriv,
        )
    q_plus = roots.nearest(window_mean)
    converged = (
        residual <= f_tol
        and max_deriv <= deriv_tol
        and abs(z_final - q_plus) <= zeta_tol
        and not oscillating
    )
    return LimitResult(
        q_plus=q_plus,
        residual=residual,
        converged=converged,
        oscillating=oscillating,
        window_mean=window_mean,
        window_max_deriv=max_deriv,
    )
