"""Uniformly sampled scalar signals and basic generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SampledSignal:
    """Scalar signal on a uniform time grid t_start + k*dt.

    Samples must be finite; dt must be positive.
    """

    dt: float
    samples: np.ndarray
    t_start: float = 0.0

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size and not np.isfinite(samples).all():
            k = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise ValueError(f"non-finite sample at index {k}")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(len(self))

    @property
    def t_end(self) -> float:
        """Time of the last sample."""
        return self.t_start + self.dt * (len(self) - 1)


def make_step_input(amplitude: float, dt: float, duration: float) -> SampledSignal:
    """Constant input of the given amplitude covering [0, duration)."""
    if not duration > 0.0:
        raise ValueError(f"duration must be positive, got {duration}")
    n = int(round(duration / dt))
    if n < 1:
        raise ValueError(f"duration {duration} shorter than one step dt={dt}")
    return SampledSignal(dt=dt, samples=np.full(n, float(amplitude)))


def add_noise(y: SampledSignal, noise_amplitude: float, seed: int) -> SampledSignal:
    """Add uniform noise in [-noise_amplitude, +noise_amplitude], reproducibly."""
    if noise_amplitude < 0.0:
        raise ValueError(f"noise amplitude must be non-negative, got {noise_amplitude}")
    rng = np.random.default_rng(seed)
    w = rng.uniform(-noise_amplitude, noise_amplitude, len(y))
    return SampledSignal(dt=y.dt, samples=y.samples + w, t_start=y.t_start)
