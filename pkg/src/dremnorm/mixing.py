"""Dynamic regressor extension and mixing.

Delayed copies of the (z_bar, omega_bar) regression are stacked into a
square system which is multiplied by its adjugate, decoupling it into one
scalar regression z_i = omega * theta_i per parameter. The adjugate is
computed by cofactor expansion so it stays defined when the extended matrix
is singular (omega crosses zero).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .svf import RegressionFrame

MAX_MIX_DIM = 8


def delay_steps(delays: list[float], dt: float) -> list[int]:
    """Round delays to the sample grid; warn when rounding moves a value."""
    if not delays:
        raise ValueError("at least one delay is required")
    if len(set(delays)) != len(delays):
        raise ValueError(f"delays must be distinct, got {delays}")
    steps = []
    for d in delays:
        if not d > 0.0:
            raise ValueError(f"delays must be strictly positive, got {d}")
        s = int(round(d / dt))
        if s < 1:
            raise ValueError(f"delay {d} is below the sample step {dt}")
        if abs(s * dt - d) > 1e-9 * max(d, dt):
            warnings.warn(
                f"delay {d} not on the dt={dt} grid; rounded to {s * dt}",
                stacklevel=3,
            )
        steps.append(s)
    if len(set(steps)) != len(steps):
        raise ValueError(f"delays {delays} collapse to identical sample counts {steps}")
    return steps


@dataclass
class DelayBank:
    """Ring buffer of recent regression frames; single-writer.

    Keeps the last max(steps)+1 samples of (z_bar, omega_bar) so every
    configured delay can be read back.
    """

    delays: list[float]
    dt: float
    width: int  # m + n + 1
    steps: list[int] = field(init=False)
    rounded_delays: list[float] = field(init=False)

    def __post_init__(self):
        self.steps = delay_steps(self.delays, self.dt)
        self.rounded_delays = [s * self.dt for s in self.steps]
        depth = max(self.steps) + 1
        self._z = np.zeros(depth)
        self._omega = np.zeros((depth, self.width))
        self._count = 0

    @property
    def max_step(self) -> int:
        return max(self.steps)

    @property
    def fill_time(self) -> float:
        """Delay-fill duration: samples before it are flagged invalid."""
        return self.max_step * self.dt

    def push(self, frame: RegressionFrame) -> None:
        pos = self._count % self._z.shape[0]
        self._z[pos] = frame.z_bar
        self._omega[pos] = frame.omega_bar
        self._count += 1

    def read(self, step: int) -> tuple[float, np.ndarray] | None:
        """Sample delayed by `step`, or None if it predates the series."""
        if self._count <= step:
            return None
        pos = (self._count - 1 - step) % self._z.shape[0]
        return self._z[pos], self._omega[pos]


@dataclass(frozen=True)
class ExtendedFrame:
    """Stacked current-plus-delayed regression at one instant."""

    t: float
    z_f: np.ndarray  # (q,)
    omega_f: np.ndarray  # (q, q)
    valid: bool


@dataclass(frozen=True)
class MixedRegression:
    """Decoupled scalar regressions z_i = omega * theta_i at one instant."""

    t: float
    omega: float
    z: np.ndarray  # (q,)
    valid: bool


def adjugate_det(M: np.ndarray) -> tuple[np.ndarray, float]:
    """Adjugate and determinant by cofactor expansion.

    Satisfies adj(M) @ M = det(M) I within floating tolerance and is defined
    for singular M. Dimensions above 8 are rejected (factorial cost).
    """
    M = np.ascontiguousarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if M.shape[0] > MAX_MIX_DIM:
        raise ValueError(
            f"dimension {M.shape[0]} exceeds the supported maximum {MAX_MIX_DIM}"
        )
    if M.size and not np.isfinite(M).all():
        raise ValueError("matrix entries must be finite")
    return _kernels.adjugate_det(M)


def extend(frame_now: RegressionFrame, bank: DelayBank) -> ExtendedFrame:
    """Push the current frame and assemble the extended regression.

    Row 0 holds the current (z_bar, omega_bar), row i the pair delayed by
    bank.steps[i-1]. Rows whose delayed sample predates the series start are
    zero-filled and the frame is marked invalid.
    """
    bank.push(frame_now)
    q = bank.width
    z_f = np.zeros(len(bank.steps) + 1)
    omega_f = np.zeros((len(bank.steps) + 1, q))
    z_f[0] = frame_now.z_bar
    omega_f[0] = frame_now.omega_bar
    valid = True
    for i, s in enumerate(bank.steps):
        got = bank.read(s)
        if got is None:
            valid = False
            continue
        z_f[i + 1], omega_f[i + 1] = got
    return ExtendedFrame(t=frame_now.t, z_f=z_f, omega_f=omega_f, valid=valid)


def mix(extended: ExtendedFrame) -> MixedRegression:
    """Multiply the extended regression by its adjugate: omega = det, z = adj @ z_f."""
    adj, det = adjugate_det(extended.omega_f)
    return MixedRegression(
        t=extended.t, omega=det, z=adj @ extended.z_f, valid=extended.valid
    )


def mix_series(
    z_bar: np.ndarray, omega_bar: np.ndarray, delays: list[float], dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whole-series counterpart of extend + mix.

    Returns (omega, z, valid) arrays over all samples; valid flips true once
    the largest delay line is filled.
    """
    omega_bar = np.ascontiguousarray(omega_bar, dtype=np.float64)
    q = omega_bar.shape[1]
    steps = delay_steps(delays, dt)
    if len(steps) + 1 != q:
        raise ValueError(
            f"need m+n = {q - 1} delays for a width-{q} regression, got {len(steps)}"
        )
    omega, z, valid = _kernels.drem_mix_series(
        np.ascontiguousarray(z_bar, dtype=np.float64),
        omega_bar,
        np.asarray(steps, dtype=np.int64),
    )
    return omega, z, valid.astype(bool)
