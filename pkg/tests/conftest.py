from __future__ import annotations

import numpy as np
import pytest

import dremnorm as dn


@pytest.fixture(scope="session")
def plant_config() -> dn.ExperimentConfig:
    return dn.load_preset("plant_steps")


@pytest.fixture(scope="session")
def plant_result(plant_config) -> dn.ExperimentResult:
    """One full noise-free run of the bundled plant preset, shared read-only."""
    return dn.run_experiment(plant_config)


@pytest.fixture(scope="session")
def plant_pipeline(plant_config):
    """Intermediate pipeline arrays per input amplitude (shared read-only)."""
    from dremnorm import mixing, normalizer, svf
    from dremnorm.signals import make_step_input
    from dremnorm.lti import simulate

    cfg = plant_config
    out = {}
    for amp in cfg.input_amplitudes:
        u = make_step_input(amp, cfg.dt, cfg.horizon)
        y = simulate(cfg.plant, u)
        t, z_bar, omega_bar = svf.filter_series(cfg.filter, cfg.plant.m, u, y)
        omega, z, valid = mixing.mix_series(z_bar, omega_bar, cfg.delays, cfg.dt)
        phi, Y = normalizer.normalize_series(omega, z, cfg.eta_min)
        out[amp] = dict(
            u=u, y=y, t=t, z_bar=z_bar, omega_bar=omega_bar,
            omega=omega, z=z, valid=valid, phi=phi, Y=Y,
        )
    return out


def exp_regressor(amplitude: float, rate: float, dt: float, window: float):
    """Synthetic decaying regressor on the inclusive grid [0, window]."""
    n = int(round(window / dt))
    t = dt * np.arange(n + 1)
    return t, amplitude * np.exp(-rate * t)
