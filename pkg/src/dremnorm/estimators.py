"""Scalar gradient estimation loops.

Three variants share the Euler update

    theta_hat_i <- theta_hat_i - dt * gamma * c_k * (theta_hat_i * rho_k - s_{k,i})

with (c, rho, s) = (omega, omega, z) for the plain loop,
(phi, phi, Y) for the excitation-normalized loop, and
(omega/(1+omega^2), omega, z) for the classically normalized loop.

The measurable form above coincides with theta_err' = -gamma * rho^2 *
theta_err exactly when the regression identity holds. Explicit Euler is
stable per component while dt * gamma * rho_eff^2 < 2; run gains are expected
to respect that bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import NumericalError
from .normalizer import NormalizedRegression

PLAIN = "plain"
NORM_EXCITATION = "norm_excitation"
NORM_CLASSICAL = "norm_classical"
VARIANTS = (PLAIN, NORM_EXCITATION, NORM_CLASSICAL)


@dataclass(frozen=True)
class EstimatorState:
    variant: str
    gamma: float
    theta_hat: np.ndarray
    started: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        th = np.asarray(self.theta_hat, dtype=np.float64)
        if not np.isfinite(th).all():
            raise ValueError("theta_hat must be finite")
        object.__setattr__(self, "theta_hat", th)


def make_estimator(variant: str, gamma: float, dim: int) -> EstimatorState:
    """Fresh estimator with theta_hat = 0 (error starts at -theta_true)."""
    return EstimatorState(variant=variant, gamma=gamma, theta_hat=np.zeros(dim))


def start(state: EstimatorState) -> EstimatorState:
    """Mark the estimator live; call at the first valid mixed sample."""
    return replace(state, started=True)


def _checked(state: EstimatorState, updated: np.ndarray, t_label: str) -> EstimatorState:
    bad = ~np.isfinite(updated)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NumericalError(
            f"{state.variant} loop: non-finite update of component {i}{t_label}"
        )
    return replace(state, theta_hat=updated)


def _require_started(state: EstimatorState) -> None:
    if not state.started:
        raise RuntimeError(
            "estimator not started; it stays frozen until the first valid sample"
        )


def step_plain(
    state: EstimatorState, omega: float, z: np.ndarray, dt: float
) -> EstimatorState:
    """One Euler step of the plain gradient loop."""
    _require_started(state)
    with np.errstate(over="ignore", invalid="ignore"):
        upd = state.theta_hat - dt * state.gamma * omega * (state.theta_hat * omega - z)
    return _checked(state, upd, "")


def step_norm_excitation(
    state: EstimatorState, normalized: NormalizedRegression, dt: float
) -> EstimatorState:
    """One Euler step of the excitation-normalized loop on (phi, Y)."""
    _require_started(state)
    phi = normalized.phi
    with np.errstate(over="ignore", invalid="ignore"):
        upd = state.theta_hat - dt * state.gamma * phi * (
            state.theta_hat * phi - normalized.Y
        )
    return _checked(state, upd, f" at t={normalized.t:.6g}")


def step_norm_classical(
    state: EstimatorState, omega: float, z: np.ndarray, dt: float
) -> EstimatorState:
    """One Euler step of the classically normalized loop (gain omega/(1+omega^2))."""
    _require_started(state)
    with np.errstate(over="ignore", invalid="ignore"):
        coeff = omega / (1.0 + omega * omega)
        upd = state.theta_hat - dt * state.gamma * coeff * (state.theta_hat * omega - z)
    return _checked(state, upd, "")


def estimate_series(
    variant: str,
    gamma: float,
    dt: float,
    *,
    omega: np.ndarray | None = None,
    z: np.ndarray | None = None,
    phi: np.ndarray | None = None,
    Y: np.ndarray | None = None,
    valid: np.ndarray | None = None,
    theta0: np.ndarray | None = None,
) -> np.ndarray:
    """Whole-series estimator run.

    Returns the (N+1, d) trajectory of theta_hat; row k is the estimate at
    sample time k (row 0 = theta0, default zeros). Samples with valid False
    leave the estimate frozen.
    """
    if variant == NORM_EXCITATION:
        if phi is None or Y is None:
            raise ValueError("norm_excitation needs phi and Y")
        rho = np.ascontiguousarray(phi, dtype=np.float64)
        coeff = rho
        target = np.ascontiguousarray(Y, dtype=np.float64)
    elif variant in (PLAIN, NORM_CLASSICAL):
        if omega is None or z is None:
            raise ValueError(f"{variant} needs omega and z")
        rho = np.ascontiguousarray(omega, dtype=np.float64)
        target = np.ascontiguousarray(z, dtype=np.float64)
        coeff = rho if variant == PLAIN else rho / (1.0 + rho * rho)
        coeff = np.ascontiguousarray(coeff)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if target.ndim == 1:
        target = target[:, None]
    n = rho.shape[0]
    if valid is None:
        active = np.ones(n, dtype=np.uint8)
    else:
        active = np.ascontiguousarray(np.asarray(valid).astype(np.uint8))
    if theta0 is None:
        theta0 = np.zeros(target.shape[1])
    theta0 = np.ascontiguousarray(theta0, dtype=np.float64)
    traj = _kernels.gradient_series(coeff, rho, target, active, float(gamma), float(dt), theta0)
    bad = ~np.isfinite(traj)
    if bad.any():
        k, i = np.argwhere(bad)[0]
        raise NumericalError(
            f"{variant} loop: non-finite update of component {i} at step {k}"
        )
    return traj
