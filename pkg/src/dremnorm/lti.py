"""Strictly proper SISO transfer functions and fixed-step Euler simulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericalError
from .signals import SampledSignal

# |x| beyond this is treated as divergence of the integrator
OVERFLOW_THRESHOLD = 1e12


@dataclass(frozen=True)
class TransferFunction:
    """y = (num / den) u with num = [b_m .. b_0] and den = [a_{n-1} .. a_0].

    The denominator leading coefficient (degree n) is an implicit 1. The
    function must be strictly proper: deg num < deg den.
    """

    num: tuple[float, ...]
    den: tuple[float, ...]

    def __post_init__(self):
        num = tuple(float(v) for v in self.num)
        den = tuple(float(v) for v in self.den)
        if not num or not den:
            raise ValueError("coefficient lists must be non-empty")
        if not all(np.isfinite(num)) or not all(np.isfinite(den)):
            raise ValueError("coefficients must be finite")
        if len(num) > len(den):
            raise ValueError(
                f"transfer function must be strictly proper: "
                f"deg num = {len(num) - 1} >= deg den = {len(den)}"
            )
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def n(self) -> int:
        """Denominator degree."""
        return len(self.den)

    @property
    def m(self) -> int:
        """Numerator degree."""
        return len(self.num) - 1


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]


def companion(den: tuple[float, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Controllable-companion (A, b) for a monic polynomial p^n + den . alpha(p).

    den is ordered [a_{n-1} .. a_0]. State i of the resulting integrator chain
    carries the i-th derivative of state 0.
    """
    n = len(den)
    A = np.zeros((n, n))
    if n > 1:
        A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = [-a for a in den[::-1]]
    b = np.zeros(n)
    b[-1] = 1.0
    return A, b


def realize_state_space(tf: TransferFunction) -> StateSpace:
    """Controllable canonical form realization of a strictly proper tf."""
    A, b = companion(tf.den)
    c = np.zeros(tf.n)
    c[: tf.m + 1] = tf.num[::-1]  # [b_0 .. b_m] against the derivative chain
    return StateSpace(A=A, b=b, c=c)


def simulate(
    tf: TransferFunction,
    u: SampledSignal,
    x0: np.ndarray | None = None,
) -> SampledSignal:
    """Forward-Euler output trajectory x_{k+1} = x_k + dt (A x_k + b u_k), y = c x.

    Deterministic for fixed inputs. Raises NumericalError naming the time of
    the first sample whose state magnitude exceeds OVERFLOW_THRESHOLD.
    """
    ss = realize_state_space(tf)
    if x0 is None:
        x0 = np.zeros(ss.n)
    else:
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape != (ss.n,):
            raise ValueError(f"x0 must have length {ss.n}, got shape {x0.shape}")
    states = _kernels.lti_euler_states(
        np.ascontiguousarray(ss.A), ss.b, u.samples, x0, u.dt
    )
    bad = ~np.isfinite(states).all(axis=1) | (np.abs(states).max(axis=1) > OVERFLOW_THRESHOLD)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NumericalError(
            f"state diverged at t={u.t_start + k * u.dt:.6g} s "
            f"(|x| exceeded {OVERFLOW_THRESHOLD:g})"
        )
    y = states @ ss.c
    return SampledSignal(dt=u.dt, samples=y, t_start=u.t_start)
