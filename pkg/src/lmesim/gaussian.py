"""Covariance-matrix fast path for the undriven two-qubit chain.

The undriven master equation closes on the 2x2 covariance matrix
C_ij = ⟨σ_i^+ σ_j^-⟩ (σ_i^- the lowering operator of qubit i, so C_ii is
the excited-state population):

    dC/dt = W C + C W† + D,
    W = [[-ζ²(γ₁⁺+γ₁⁻)/2 + iΔ,  iλ],
         [iλ,  -ζ²(γ₂⁺+γ₂⁻)/2 - iΔ]],      Δ = ε₁ - ε₂,
    D = diag(ζ²γ₁⁺, ζ²γ₂⁺).

This is exact for the undriven generator (the nonlinear terms cancel in
the equations of motion), so it doubles as an independent oracle for the
density-matrix integrator.  The steady state solves the Lyapunov equation
W C + C W† + D = 0, and the steady heat currents are linear in C.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baths import decay_rate
from .errors import StabilityError, UnsupportedConfigError
from .linalg import hermitian_part, lyapunov_solve
from .model import SM, SP, SystemConfig

# C_ij = tr(σ_i^+ σ_j^- ρ); correlator operators in the fixed product basis
_CORR_OPS = np.array([[SP[i] @ SM[j] for j in (0, 1)] for i in (0, 1)])


@dataclass(frozen=True, eq=False)
class DriftDiffusion:
    """Drift W (2x2 complex) and diffusion D (2x2 real diagonal PSD)."""

    drift: np.ndarray
    diffusion: np.ndarray


def drift_diffusion(cfg: SystemConfig) -> DriftDiffusion:
    """Assemble (W, D) from the static rates.  Undriven configurations only."""
    if cfg.is_driven:
        raise UnsupportedConfigError(
            "covariance dynamics require an undriven configuration"
        )
    gp = []
    gtot = []
    for i in (1, 2):
        eps = cfg.qubit(i).epsilon
        b = cfg.bath(i)
        gminus = decay_rate(2.0 * eps, b)
        gplus = decay_rate(-2.0 * eps, b)
        gp.append(gplus)
        gtot.append(gminus + gplus)
    delta = cfg.qubit1.epsilon - cfg.qubit2.epsilon
    z = cfg.zeta2
    lam = cfg.coupling
    drift = np.array([
        [-0.5 * z * gtot[0] + 1j * delta, 1j * lam],
        [1j * lam, -0.5 * z * gtot[1] - 1j * delta],
    ])
    diffusion = np.diag([z * gp[0], z * gp[1]]).astype(complex)
    return DriftDiffusion(drift=drift, diffusion=diffusion)


def covariance_rhs(cov: np.ndarray, dd: DriftDiffusion) -> np.ndarray:
    """dC/dt = W C + C W† + D."""
    w = dd.drift
    return w @ cov + cov @ w.conj().T + dd.diffusion


def steady_covariance(dd: DriftDiffusion) -> np.ndarray:
    """Steady C from the Lyapunov equation; Hermitian with populations in [0,1]."""
    return hermitian_part(lyapunov_solve(dd.drift, dd.diffusion))


def covariance_from_density(rho: np.ndarray) -> np.ndarray:
    """Extract C_ij = Tr(σ_i^+ σ_j^- ρ) from a two-qubit density matrix."""
    return np.einsum("ijkl,lk->ij", _CORR_OPS, rho)


def integrate_covariance(cov0: np.ndarray, dd: DriftDiffusion, t_span,
                         step: float, record_stride: int = 1):
    """Fixed-step RK4 on the covariance equation.

    Mirrors the density-matrix integrator's stepping (same step layout and
    final partial step) so recorded times line up frame for frame.
    Returns (times, covariances).
    """
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if record_stride < 1:
        raise ValueError(f"record_stride must be >= 1, got {record_stride}")
    if np.isscalar(t_span):
        t0, t1 = 0.0, float(t_span)
    else:
        t0, t1 = (float(x) for x in t_span)
    if t1 < t0:
        raise ValueError(f"t_span must be increasing, got ({t0}, {t1})")

    from .dynamics import _plan_steps  # shared step layout

    n_full, tail = _plan_steps(t0, t1, step)
    steps = [step] * n_full + ([tail] if tail else [])
    cov = cov0.astype(complex)
    times = [t0]
    covs = [cov.copy()]
    for k, hk in enumerate(steps):
        k1 = covariance_rhs(cov, dd)
        k2 = covariance_rhs(cov + 0.5 * hk * k1, dd)
        k3 = covariance_rhs(cov + 0.5 * hk * k2, dd)
        k4 = covariance_rhs(cov + hk * k3, dd)
        cov = hermitian_part(cov + (hk / 6.0) * (k1 + 2.0 * (k2 + k3) + k4))
        if (k + 1) % record_stride == 0 or k == len(steps) - 1:
            times.append(t1 if k == len(steps) - 1 else t0 + (k + 1) * step)
            covs.append(cov.copy())
    return np.array(times), np.array(covs)


def relaxation_time(dd: DriftDiffusion) -> float:
    """τ_r = 1/|2 max Re w| over drift eigenvalues w (slowest decay of C)."""
    ws = np.linalg.eigvals(dd.drift)
    top = float(np.max(ws.real))
    if top >= 0.0:
        raise StabilityError(
            f"drift matrix is not Hurwitz (max Re eigenvalue {top:.3e})"
        )
    return 1.0 / abs(2.0 * top)


def steady_heat_currents(cov: np.ndarray, cfg: SystemConfig):
    """Heat currents (J₁, J₂) into the system, linear in the covariance.

    J_i = ζ² { -(γ_i⁺+γ_i⁻)/2 · [4 ε_i C_ii + λ (C₁₂+C₂₁)] + 2 ε_i γ_i⁺ }.
    """
    lam = cfg.coupling
    z = cfg.zeta2
    cross = float((cov[0, 1] + cov[1, 0]).real)
    out = []
    for i in (1, 2):
        eps = cfg.qubit(i).epsilon
        b = cfg.bath(i)
        gminus = decay_rate(2.0 * eps, b)
        gplus = decay_rate(-2.0 * eps, b)
        pop = float(cov[i - 1, i - 1].real)
        out.append(z * (
            -0.5 * (gplus + gminus) * (4.0 * eps * pop + lam * cross)
            + 2.0 * eps * gplus
        ))
    return out[0], out[1]
