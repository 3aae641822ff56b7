"""Excitation analysis: windowed excitation levels, order-change times, and
the parameter-error bounds of the three estimation loops.

All windowed integrals use trapezoidal quadrature on the sample grid, which
matches the first-order accuracy of the Euler runs being analyzed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .normalizer import normalize_phi_series
from .signals import SampledSignal


class Regime(str, enum.Enum):
    """Which bound applies over the analysis window.

    PLAIN and CLASSICAL select the loop; the NE_* values select the
    excitation-normalized loop's case: regressor order above the floor
    throughout (NE_HIGH), below throughout (NE_LOW), or crossing it once and
    staying below (NE_MIXED).
    """

    PLAIN = "plain"
    NE_LOW = "ne_low"
    NE_HIGH = "ne_high"
    NE_MIXED = "ne_mixed"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class ExcitationReport:
    """Windowed excitation summary of a scalar regressor.

    alpha is the raw excitation level (integral of omega^2), phi_energy the
    normalized one (integral of phi^2, bounded by T), alpha_classical the
    excitation of the classically normalized regressor omega^2/(1+omega^2).
    T_j is the sustained crossing time into order <= eta_min, when present.
    """

    t_s: float
    T: float
    alpha: float
    phi_energy: float
    eta_min: float
    T_j: float | None = None
    delta_min: float | None = None
    alpha_classical: float | None = None


@dataclass(frozen=True)
class OrderChangeTimes:
    """First crossing times of integer order-of-magnitude levels.

    crossings lists (level, time) for each integer decade below the starting
    order, down to the floor. T_j is the first time the magnitude drops to
    10^eta_min and stays there through the window end; None when it never
    drops for good, or never exceeded the floor in the first place.
    """

    T_j: float | None
    crossings: list[tuple[int, float]]


def _window(signal: SampledSignal, t_s: float, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Samples and times of signal restricted to [t_s, t_s + T]."""
    if T <= 0.0:
        raise ValueError(f"window length must be positive, got {T}")
    k0f = (t_s - signal.t_start) / signal.dt
    k1f = (t_s + T - signal.t_start) / signal.dt
    k0, k1 = int(round(k0f)), int(round(k1f))
    if abs(k0f - k0) > 1e-6 or abs(k1f - k1) > 1e-6:
        raise ValueError(
            f"window [{t_s}, {t_s + T}] does not align with the dt={signal.dt} grid"
        )
    if k0 < 0 or k1 >= len(signal) or k0 >= k1:
        raise ValueError(
            f"window [{t_s}, {t_s + T}] outside signal support "
            f"[{signal.t_start}, {signal.t_end}]"
        )
    return signal.samples[k0 : k1 + 1], signal.times[k0 : k1 + 1]


def excitation_level(signal: SampledSignal, t_s: float, T: float) -> float:
    """Excitation level over [t_s, t_s + T]: quadrature of the squared signal."""
    w, _ = _window(signal, t_s, T)
    return float(np.trapezoid(w * w, dx=signal.dt))


def phi_excitation(phi: SampledSignal, t_s: float, T: float) -> float:
    """Normalized excitation over [t_s, t_s + T]: quadrature of phi^2.

    Rejects samples outside [0, 1] (a normalization bug upstream) and checks
    the result against its analytic ceiling T.
    """
    w, _ = _window(phi, t_s, T)
    if (w < 0.0).any() or (w > 1.0).any():
        k = int(np.flatnonzero((w < 0.0) | (w > 1.0))[0])
        raise NumericalError(
            f"phi outside [0, 1] at window sample {k} (value {w[k]!r}); "
            "normalized regressor invariant violated upstream"
        )
    q = float(np.trapezoid(w * w, dx=phi.dt))
    if q > T * (1.0 + 1e-12) + 1e-12:
        raise NumericalError(f"phi excitation {q} exceeds window length {T}")
    return q


def order_change_times(signal: SampledSignal, eta_min: float) -> OrderChangeTimes:
    """Decade-crossing times of |signal| and the sustained floor crossing T_j."""
    a = np.abs(signal.samples)
    t = signal.times
    thresh = 10.0**eta_min

    above = a > thresh
    T_j = None
    if above.any():
        last_above = int(np.flatnonzero(above)[-1])
        if last_above + 1 < len(a):
            # first sample from which the magnitude stays at or below the
            # floor; absent when it never drops for good or never rose at all
            T_j = float(t[last_above + 1])

    crossings: list[tuple[int, float]] = []
    if a[0] > 0.0:
        eta0 = math.log10(a[0])
        top = math.ceil(eta0) - 1
        bottom = math.ceil(eta_min) - 1
        for level in range(top, bottom, -1):
            hit = np.flatnonzero(a <= 10.0**level)
            if hit.size:
                crossings.append((level, float(t[hit[0]])))
    return OrderChangeTimes(T_j=T_j, crossings=crossings)


def classify_regime(
    omega: SampledSignal, t_s: float, T: float, eta_min: float
) -> Regime | None:
    """NE regime of the window: HIGH, LOW, MIXED, or None when the magnitude
    dips below the floor and comes back (not covered by the three cases)."""
    w, _ = _window(omega, t_s, T)
    above = np.abs(w) > 10.0**eta_min
    if above.all():
        return Regime.NE_HIGH
    if not above.any():
        return Regime.NE_LOW
    first_below = int(np.flatnonzero(~above)[0])
    if above[:first_below].all() and not above[first_below:].any():
        return Regime.NE_MIXED
    return None


def analyze_excitation(
    omega: SampledSignal, t_s: float, T: float, eta_min: float
) -> ExcitationReport:
    """Full excitation report of a scalar regressor over [t_s, t_s + T]."""
    w, t = _window(omega, t_s, T)
    alpha = float(np.trapezoid(w * w, dx=omega.dt))
    phi = normalize_phi_series(w, eta_min)
    phi_energy = float(np.trapezoid(phi * phi, dx=omega.dt))
    wsq = w * w
    alpha_classical = float(np.trapezoid(wsq / (1.0 + wsq), dx=omega.dt))
    oc = order_change_times(
        SampledSignal(dt=omega.dt, samples=w, t_start=float(t[0])), eta_min
    )
    delta_min = oc.T_j - t_s if oc.T_j is not None else None
    return ExcitationReport(
        t_s=t_s,
        T=T,
        alpha=alpha,
        phi_energy=phi_energy,
        eta_min=eta_min,
        T_j=oc.T_j,
        delta_min=delta_min,
        alpha_classical=alpha_classical,
    )


def family_delta_min(reports: list[ExcitationReport]) -> float:
    """Common excitation floor of a regressor family: min over T_j - t_s."""
    values = [r.delta_min for r in reports if r.delta_min is not None]
    if not values:
        raise ValueError("no report in the family carries a crossing time T_j")
    return min(values)


def error_bounds(
    report: ExcitationReport,
    gamma: float,
    theta_err_start: float,
    regime: Regime,
) -> tuple[float | None, float]:
    """(lower, upper) bracket on |theta_err_i(t_s + T)| for the given regime.

    PLAIN:     upper = exp(-gamma * alpha) * |err0|; no lower bound.
    NE_LOW:    the raw excitation is amplified by 10^(-2 eta_min);
               lower exp(-gamma T), upper exp(-gamma * 10^(-2 eta_min) * alpha).
    NE_HIGH:   the normalized excitation equals T exactly, so the window
               endpoint value is exp(-gamma T) * |err0| (lower = upper; any
               excitation floor delta <= T gives a looser admissible upper).
    NE_MIXED:  upper exp(-gamma * delta_min), lower exp(-gamma T).
    CLASSICAL: upper = exp(-gamma * alpha_classical) * |err0|, with the
               classical excitation strictly below T.
    """
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    s = abs(theta_err_start)
    floor = math.exp(-gamma * report.T) * s
    if regime == Regime.PLAIN:
        return None, math.exp(-gamma * report.alpha) * s
    if regime == Regime.NE_LOW:
        amplified = 10.0 ** (-2.0 * report.eta_min) * report.alpha
        return floor, math.exp(-gamma * amplified) * s
    if regime == Regime.NE_HIGH:
        return floor, floor
    if regime == Regime.NE_MIXED:
        if report.delta_min is None:
            raise ValueError("mixed regime requires delta_min (no crossing time found)")
        return floor, math.exp(-gamma * report.delta_min) * s
    if regime == Regime.CLASSICAL:
        if report.alpha_classical is None:
            raise ValueError("classical regime requires alpha_classical")
        return floor, math.exp(-gamma * report.alpha_classical) * s
    raise ValueError(f"unknown regime {regime!r}")


def ub_values(
    t: np.ndarray,
    gamma: float,
    delta: float,
    T: float,
    t_s: float,
    theta_err_start: float,
    mode: str = "stepwise",
) -> np.ndarray:
    """Upper-bound curve evaluated at times t.

    STEPWISE applies the per-window bound literally: after k complete windows
    of length T the bound is |err0| * exp(-gamma * delta * k). CONTINUOUS
    interpolates the same decay smoothly. Both readings are offered because
    the bound constrains only window endpoints; stepwise is the default.
    """
    if not 0.0 < delta <= T:
        raise ValueError(f"delta must lie in (0, T], got delta={delta}, T={T}")
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    s = abs(theta_err_start)
    rel = np.clip((np.asarray(t, dtype=np.float64) - t_s) / T, 0.0, None)
    if mode == "stepwise":
        k = np.floor(rel + 1e-12)
        return s * np.exp(-gamma * delta * k)
    if mode == "continuous":
        return s * np.exp(-gamma * delta * rel)
    raise ValueError(f"ub mode must be 'stepwise' or 'continuous', got {mode!r}")


def ub_curve(
    gamma: float,
    delta: float,
    T: float,
    t_s: float,
    theta_err_start: float,
    horizon: float,
    mode: str = "stepwise",
    dt: float = 1e-2,
) -> SampledSignal:
    """Upper-bound curve as a sampled signal on [0, horizon]."""
    n = int(round(horizon / dt)) + 1
    t = dt * np.arange(n)
    return SampledSignal(
        dt=dt, samples=ub_values(t, gamma, delta, T, t_s, theta_err_start, mode)
    )
