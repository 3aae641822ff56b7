"""Excitation normalization of the mixed scalar regressor.

The regressor is written as omega = sign * 10^eta. Saturating eta from below
at a floor eta_min and multiplying the regression by
f(omega) = sign * 10^{-sat(eta)} yields the normalized pair

    phi = omega * f(omega)    in [0, 1],
    Y   = z * f(omega)        = phi * theta  (noise-free),

where phi equals 1 whenever the regressor's order of magnitude stays above
the floor, erasing its amplitude. phi is evaluated from the piecewise closed
form so omega = 0 stays well-defined (phi = 0, Y = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .mixing import MixedRegression


@dataclass(frozen=True)
class NumericOrder:
    """Sign and decimal order of magnitude of a scalar: x = sign * 10^eta.

    eta is None for x = 0 (the "minus infinity" order); a deliberate
    sentinel rather than float('-inf') so arithmetic on it fails loudly.
    """

    sign: int  # +1 when x >= 0, otherwise -1
    eta: float | None

    @property
    def is_zero(self) -> bool:
        return self.eta is None


@dataclass(frozen=True)
class NormalizerConfig:
    """Order-of-magnitude floor below which normalization saturates."""

    eta_min: float

    def __post_init__(self):
        if not np.isfinite(self.eta_min):
            raise ValueError(f"eta_min must be finite, got {self.eta_min}")


@dataclass(frozen=True)
class NormalizedRegression:
    t: float
    phi: float
    Y: np.ndarray


def numeric_order(omega: float) -> NumericOrder:
    """Decompose omega into sign and decimal order: omega = sign * 10^eta."""
    if not np.isfinite(omega):
        raise ValueError(f"regressor must be finite, got {omega}")
    if omega == 0.0:
        return NumericOrder(sign=+1, eta=None)
    return NumericOrder(
        sign=+1 if omega >= 0.0 else -1, eta=float(np.log10(abs(omega)))
    )


def saturate(eta: float | None, eta_min: float) -> float:
    """Clamp the order from below; the zero-order sentinel maps to the floor."""
    if not np.isfinite(eta_min):
        raise ValueError(f"eta_min must be finite, got {eta_min}")
    if eta is None or eta <= eta_min:
        return eta_min
    return eta


def _phi_f(omega: float, eta_min: float) -> tuple[float, float]:
    """(phi, f) for one regressor value; phi from the piecewise closed form."""
    if omega == 0.0:
        return 0.0, 0.0
    order = numeric_order(omega)
    if order.eta <= eta_min:
        return 10.0 ** (order.eta - eta_min), order.sign * 10.0 ** (-eta_min)
    return 1.0, order.sign * 10.0 ** (-order.eta)


def normalize(mixed: MixedRegression, cfg: NormalizerConfig) -> NormalizedRegression:
    """Normalized regression (phi, Y) for one mixed sample.

    omega = 0 maps to phi = 0, Y = 0: the closed form avoids the 0 * inf of
    evaluating omega * f(omega) literally, and a zero regressor carries no
    information worth feeding the estimators.
    """
    phi, f = _phi_f(mixed.omega, cfg.eta_min)
    if f == 0.0:
        Y = np.zeros_like(mixed.z)
    else:
        Y = mixed.z * f
    return NormalizedRegression(t=mixed.t, phi=phi, Y=Y)


def normalize_phi_series(omega: np.ndarray, eta_min: float) -> np.ndarray:
    """Vectorized phi over a regressor series."""
    omega = np.asarray(omega, dtype=np.float64)
    phi = np.zeros_like(omega)
    nz = omega != 0.0
    eta = np.log10(np.abs(np.where(nz, omega, 1.0)))
    low = nz & (eta <= eta_min)
    high = nz & (eta > eta_min)
    phi[low] = 10.0 ** (eta[low] - eta_min)
    phi[high] = 1.0
    return phi


def normalize_series(
    omega: np.ndarray, z: np.ndarray, eta_min: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (phi, Y) over a mixed-regression series."""
    omega = np.asarray(omega, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if not np.isfinite(eta_min):
        raise ValueError(f"eta_min must be finite, got {eta_min}")
    phi = normalize_phi_series(omega, eta_min)
    f = np.zeros_like(omega)
    nz = omega != 0.0
    eta = np.log10(np.abs(np.where(nz, omega, 1.0)))
    sign = np.where(omega >= 0.0, 1.0, -1.0)
    low = nz & (eta <= eta_min)
    high = nz & (eta > eta_min)
    f[low] = sign[low] * 10.0 ** (-eta_min)
    f[high] = sign[high] * 10.0 ** (-eta[high])
    Y = z * f[:, None] if z.ndim == 2 else z * f
    return phi, Y


def finite_time_retrieve(
    stream: Iterable[NormalizedRegression],
) -> np.ndarray | None:
    """Parameter vector read off at the first instant with phi = 1.

    One-shot analytic retrieval: when phi(t_k) = 1, Y(t_k) equals theta in
    the noise-free case. Fragile under measurement noise, where Y(t_k) is
    theta plus the (possibly dominating) noise at that single instant; the
    gradient loop averages over many samples instead. Returns None if phi
    never reaches 1.
    """
    for sample in stream:
        if sample.phi == 1.0:
            return np.array(sample.Y, copy=True)
    return None
