"""State-variable filtering: turn (u, y) into the measurable linear regression
z_bar = theta^T omega_bar without differentiating signals.

Both filter chains realize 1/Psi(p) in companion form; the full state vector
of each chain is the ladder of filtered derivatives [1/Psi, p/Psi, ...]s.
The input chain contributes the first m+1 regressor entries (highest
derivative first), the output chain the remaining n entries with negated
sign, and z_bar = y + psi . omega_bar_2 equals (p^n/Psi) y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lti import companion
from .signals import SampledSignal


@dataclass(frozen=True)
class FilterSpec:
    """Monic stable filter polynomial Psi(p) = p^n + psi . [p^{n-1} .. 1].

    psi is ordered [psi_{n-1} .. psi_0]. Stability (all roots with strictly
    negative real part) is checked at construction.
    """

    psi: tuple[float, ...]

    def __post_init__(self):
        psi = tuple(float(v) for v in self.psi)
        if not psi:
            raise ValueError("psi must be non-empty")
        if not all(np.isfinite(psi)):
            raise ValueError("psi must be finite")
        roots = np.roots([1.0, *psi])
        if not (roots.real < 0.0).all():
            raise ValueError(
                f"filter polynomial is not Hurwitz-stable (roots {roots})"
            )
        object.__setattr__(self, "psi", psi)

    @property
    def n(self) -> int:
        return len(self.psi)


@dataclass(frozen=True)
class RegressionFrame:
    """One sample of the measurable regression: z_bar(t) = theta . omega_bar(t)."""

    t: float
    z_bar: float
    omega_bar: np.ndarray  # length m + n + 1
    omega_bar_2: np.ndarray  # trailing n entries (filtered output derivatives)


class FilterBank:
    """Stateful pair of filter chains over (u, y); single-writer."""

    def __init__(self, spec: FilterSpec, m: int):
        if m < 0:
            raise ValueError("numerator degree m must be non-negative")
        if m >= spec.n:
            raise ValueError(f"need m < n, got m={m}, n={spec.n}")
        self.spec = spec
        self.m = m
        self.A, self.b = companion(spec.psi)
        self.x_u = np.zeros(spec.n)
        self.x_y = np.zeros(spec.n)
        self.t = 0.0

    def reset(self, t_start: float = 0.0) -> None:
        self.x_u[:] = 0.0
        self.x_y[:] = 0.0
        self.t = t_start


def build_filters(spec: FilterSpec, m: int) -> FilterBank:
    """Filter bank producing the m+n+1 regressor entries for a plant with
    numerator degree m. Initial filter states are zero."""
    return FilterBank(spec, m)


def _assemble(psi, m, y_k, xu, xy, t):
    omega_1 = xu[m::-1].copy()
    omega_2 = -xy[::-1]
    z_bar = y_k + float(np.dot(psi, omega_2))
    return RegressionFrame(
        t=t,
        z_bar=z_bar,
        omega_bar=np.concatenate([omega_1, omega_2]),
        omega_bar_2=omega_2,
    )


def filter_step(bank: FilterBank, u_k: float, y_k: float, dt: float) -> RegressionFrame:
    """Emit the regression frame at the bank's current time, then advance the
    filter states one Euler step with (u_k, y_k)."""
    if not (np.isfinite(u_k) and np.isfinite(y_k)):
        raise ValueError(f"non-finite input at t={bank.t:.6g}: u={u_k}, y={y_k}")
    psi = np.asarray(bank.spec.psi)
    frame = _assemble(psi, bank.m, y_k, bank.x_u, bank.x_y, bank.t)
    bank.x_u = bank.x_u + dt * (bank.A @ bank.x_u + bank.b * u_k)
    bank.x_y = bank.x_y + dt * (bank.A @ bank.x_y + bank.b * y_k)
    bank.t += dt
    return frame


def filter_series(
    spec: FilterSpec, m: int, u: SampledSignal, y: SampledSignal
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whole-series counterpart of filter_step.

    Returns (t, z_bar, omega_bar) with omega_bar of shape (N, m+n+1).
    """
    if len(u) != len(y) or u.dt != y.dt or u.t_start != y.t_start:
        raise ValueError("u and y must share the same sampling grid")
    if m >= spec.n:
        raise ValueError(f"need m < n, got m={m}, n={spec.n}")
    A, b = companion(spec.psi)
    A = np.ascontiguousarray(A)
    x0 = np.zeros(spec.n)
    xu = _kernels.lti_euler_states(A, b, u.samples, x0, u.dt)
    xy = _kernels.lti_euler_states(A, b, y.samples, x0, y.dt)
    omega_1 = xu[:, m::-1]
    omega_2 = -xy[:, ::-1]
    psi = np.asarray(spec.psi)
    z_bar = y.samples + omega_2 @ psi
    omega_bar = np.ascontiguousarray(np.hstack([omega_1, omega_2]))
    return u.times, z_bar, omega_bar
