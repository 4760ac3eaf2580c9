"""Fixed-step RK4 propagation of the two-qubit master equation.

The integrator is a classical fourth-order Runge-Kutta scheme with a fixed
step.  After every step the state is re-Hermitized; the trace is
renormalized (and the event logged) whenever it drifts beyond 1e-12.
Undriven configurations are propagated through a precomputed 16x16
generator matrix acting on the row-major vectorized state, which is much
faster than re-assembling the dissipator every stage.

Recorded frames carry the smallest eigenvalue of the state and a flag that
marks whether any jump rate went negative since the previous frame (the
finite-memory corrections can push rates below zero transiently under a
strong drive; that is diagnostic information, not an error).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, IntegrationError, UnsupportedConfigError
from .linalg import hermitian_part
from .model import (
    SystemConfig,
    _apply_generator,
    _td_parts,
    dissipation_rates,
    liouvillian_matrix,
    validate_density,
)

logger = logging.getLogger(__name__)

TRACE_RENORM_TOL = 1e-12
FRAME_TRACE_TOL = 1e-10
DEFAULT_FRAME_SPACING = 5e-3
STEP_SAFETY = 1e-3


@dataclass(frozen=True)
class IntegratorConfig:
    """Stepping and tolerance knobs for the fixed-step propagator.

    ``step=None`` selects the default step from the stiffest scale of the
    configuration; ``record_stride=None`` records roughly every 5e-3 time
    units.  ``t_max`` bounds steady-state searches.
    """

    step: float | None = None
    record_stride: int | None = None
    t_max: float | None = None
    steady_tol: float = 1e-10
    positivity_tol: float = 1e-8

    def __post_init__(self):
        problems = []
        if self.step is not None and not self.step > 0:
            problems.append(f"step must be positive, got {self.step}")
        if self.record_stride is not None and self.record_stride < 1:
            problems.append(f"record_stride must be >= 1, got {self.record_stride}")
        if self.t_max is not None and not self.t_max > 0:
            problems.append(f"t_max must be positive, got {self.t_max}")
        if not self.steady_tol > 0:
            problems.append(f"steady_tol must be positive, got {self.steady_tol}")
        if not self.positivity_tol > 0:
            problems.append(f"positivity_tol must be positive, got {self.positivity_tol}")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass
class Trajectory:
    """Recorded frames of a propagation run."""

    times: np.ndarray                 # (n_frames,)
    states: np.ndarray                # (n_frames, 4, 4) complex
    min_eigenvalues: np.ndarray       # (n_frames,)
    rate_negative: np.ndarray         # (n_frames,) bool, since previous frame
    step: float
    record_stride: int
    final_rhs_norm: float = field(default=math.nan)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def default_step(cfg: SystemConfig) -> float:
    """Step = 1e-3 of the fastest scale (largest gap or largest total rate)."""
    e_max = max(
        math.hypot(q.epsilon, q.drive_amplitude)
        for q in (cfg.qubit1, cfg.qubit2)
    )
    rate_max = _max_rate(cfg)
    scales = [2.0 * e_max]
    if cfg.zeta2 * rate_max > 0:
        scales.append(cfg.zeta2 * rate_max)
    return STEP_SAFETY / max(scales)


def _max_rate(cfg: SystemConfig) -> float:
    if not cfg.is_driven:
        return max(
            abs(g) for i in (1, 2) for g in dissipation_rates(i, 0.0, cfg)
        )
    periods = [
        2.0 * math.pi / q.drive_frequency
        for q in (cfg.qubit1, cfg.qubit2)
        if q.drive_amplitude != 0.0 and q.drive_frequency != 0.0
    ]
    out = 0.0
    for t in np.linspace(0.0, min(periods), 257):
        for i in (1, 2):
            out = max(out, *(abs(g) for g in dissipation_rates(i, float(t), cfg)))
    return out


def _min_rate_static(cfg: SystemConfig) -> float:
    return min(g for i in (1, 2) for g in dissipation_rates(i, 0.0, cfg)[1:])


def rk4_step(rho: np.ndarray, t: float, h: float, rhs,
             positivity_tol: float | None = None) -> np.ndarray:
    """One RK4 step of drho/dt = rhs(rho, t); re-Hermitizes the result.

    With ``positivity_tol`` set, raises IntegrationError if the stepped
    state has an eigenvalue below -positivity_tol.
    """
    k1 = rhs(rho, t)
    return _rk4_finish(rho, t, h, rhs, k1, positivity_tol)


def _rk4_finish(rho, t, h, rhs, k1, positivity_tol=None):
    half = 0.5 * h
    k2 = rhs(rho + half * k1, t + half)
    k3 = rhs(rho + half * k2, t + half)
    k4 = rhs(rho + h * k3, t + h)
    out = rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    out = _normalize(out, t + h)
    if positivity_tol is not None:
        low = float(np.linalg.eigvalsh(out)[0])
        if low < -positivity_tol:
            raise IntegrationError(
                f"state eigenvalue {low:.3e} below -{positivity_tol:.1e}",
                time=t + h,
            )
    return out


def _normalize(rho: np.ndarray, t: float) -> np.ndarray:
    rho = hermitian_part(rho)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_RENORM_TOL:
        logger.debug("renormalizing trace %.16f at t=%.6f", tr, t)
        rho = rho / tr
    return rho


def _plan_steps(t0: float, t1: float, h: float):
    span = t1 - t0
    n_full = int(math.floor(span / h + 1e-9))
    tail = span - n_full * h
    if tail < 1e-12 * max(1.0, abs(t1)):
        tail = 0.0
    return n_full, tail


def integrate(rho0: np.ndarray, t_span, cfg: SystemConfig,
              integrator: IntegratorConfig | None = None) -> Trajectory:
    """Propagate rho0 over t_span = (t0, t1) (or a bare final time).

    Frames are validated as they are recorded: the trace must stay within
    1e-10 of one, and for undriven configurations the smallest eigenvalue
    must stay above -positivity_tol (driven runs only record it, since the
    time-dependent generator is not guaranteed completely positive).
    """
    icfg = integrator or IntegratorConfig()
    validate_density(rho0)
    if np.isscalar(t_span):
        t0, t1 = 0.0, float(t_span)
    else:
        t0, t1 = (float(x) for x in t_span)
    if t1 < t0:
        raise ValueError(f"t_span must be increasing, got ({t0}, {t1})")

    h = icfg.step if icfg.step is not None else default_step(cfg)
    stride = icfg.record_stride
    if stride is None:
        stride = max(1, round(DEFAULT_FRAME_SPACING / h))

    driven = cfg.is_driven
    if not driven:
        liou = liouvillian_matrix(cfg)

    rho = rho0.astype(complex)
    times = [t0]
    states = [rho.copy()]
    min_eigs = [float(np.linalg.eigvalsh(rho)[0])]
    rate_flags = [False]
    _check_frame(rho, t0, min_eigs[0], icfg, driven)

    n_full, tail = _plan_steps(t0, t1, h)
    steps = [h] * n_full + ([tail] if tail else [])
    t = t0
    pending_neg = False
    for k, hk in enumerate(steps):
        if driven:
            rho, neg = _driven_step(rho, t, hk, cfg)
            pending_neg = pending_neg or neg
        else:
            rho = _static_step(rho, t, hk, liou)
        t = t1 if k == len(steps) - 1 else t0 + (k + 1) * h
        if (k + 1) % stride == 0 or k == len(steps) - 1:
            low = float(np.linalg.eigvalsh(rho)[0])
            _check_frame(rho, t, low, icfg, driven)
            times.append(t)
            states.append(rho.copy())
            min_eigs.append(low)
            rate_flags.append(pending_neg)
            pending_neg = False

    if driven:
        final_rhs = _apply_generator(rho, *_td_parts(t1, cfg), cfg.zeta2)  # type: ignore[misc]
    else:
        final_rhs = (liou @ rho.reshape(16)).reshape(4, 4)
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        min_eigenvalues=np.array(min_eigs),
        rate_negative=np.array(rate_flags, dtype=bool),
        step=h,
        record_stride=stride,
        final_rhs_norm=float(np.max(np.abs(final_rhs))),
    )


def _check_frame(rho, t, low, icfg: IntegratorConfig, driven: bool):
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > FRAME_TRACE_TOL:
        raise IntegrationError(f"trace drifted to {tr!r}", time=t)
    if not driven and low < -icfg.positivity_tol:
        raise IntegrationError(
            f"state eigenvalue {low:.3e} below -{icfg.positivity_tol:.1e}",
            time=t,
        )


def _static_step(rho, t, h, liou):
    v = rho.reshape(16)

    def rhs(r, _):
        return (liou @ r.reshape(16)).reshape(4, 4)

    k1 = (liou @ v).reshape(4, 4)
    return _rk4_finish(rho, t, h, rhs, k1)


def _driven_step(rho, t, h, cfg: SystemConfig):
    """One RK4 step of the time-dependent equation, sharing the midpoint
    generator between the two middle stages.  Returns (state, neg_rate_seen)."""
    z = cfg.zeta2
    half = 0.5 * h
    h_lo, terms_lo = _td_parts(t, cfg)
    h_mid, terms_mid = _td_parts(t + half, cfg)
    h_hi, terms_hi = _td_parts(t + h, cfg)
    k1 = _apply_generator(rho, h_lo, terms_lo, z)
    k2 = _apply_generator(rho + half * k1, h_mid, terms_mid, z)
    k3 = _apply_generator(rho + half * k2, h_mid, terms_mid, z)
    k4 = _apply_generator(rho + h * k3, h_hi, terms_hi, z)
    out = _normalize(rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4), t + h)
    neg = any(
        min(term.gz, term.gm, term.gp) < 0.0
        for terms in (terms_lo, terms_mid, terms_hi)
        for term in terms
    )
    return out, neg


def steady_state_by_integration(rho0: np.ndarray, cfg: SystemConfig,
                                integrator: IntegratorConfig | None = None) -> np.ndarray:
    """Propagate an undriven configuration until max|drho/dt| < steady_tol.

    Raises ConvergenceError if the residual has not dropped below the
    tolerance by t_max (default 100 / (ζ² min rate)).
    """
    if cfg.is_driven:
        raise UnsupportedConfigError(
            "steady-state search requires an undriven configuration"
        )
    icfg = integrator or IntegratorConfig()
    validate_density(rho0)
    h = icfg.step if icfg.step is not None else default_step(cfg)
    t_max = icfg.t_max
    if t_max is None:
        t_max = 100.0 / (cfg.zeta2 * _min_rate_static(cfg))
    liou = liouvillian_matrix(cfg)

    def rhs(r, _):
        return (liou @ r.reshape(16)).reshape(4, 4)

    rho = rho0.astype(complex)
    t = 0.0
    check_low_every = max(1, int(round(0.1 / h)))
    k = 0
    while True:
        k1 = (liou @ rho.reshape(16)).reshape(4, 4)
        residual = float(np.max(np.abs(k1)))
        if residual < icfg.steady_tol:
            return rho
        if t >= t_max:
            raise ConvergenceError(
                f"steady-state residual {residual:.3e} above "
                f"{icfg.steady_tol:.1e} at t={t:.3f}",
                residual=residual,
            )
        rho = _rk4_finish(rho, t, h, rhs, k1)
        t += h
        k += 1
        if k % check_low_every == 0:
            low = float(np.linalg.eigvalsh(rho)[0])
            if low < -icfg.positivity_tol:
                raise IntegrationError(
                    f"state eigenvalue {low:.3e} below "
                    f"-{icfg.positivity_tol:.1e}", time=t,
                )
