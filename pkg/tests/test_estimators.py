import numpy as np
import pytest

from dremnorm.errors import NumericalError
from dremnorm.estimators import (
    NORM_CLASSICAL,
    NORM_EXCITATION,
    PLAIN,
    EstimatorState,
    estimate_series,
    make_estimator,
    start,
    step_norm_classical,
    step_norm_excitation,
    step_plain,
)
from dremnorm.normalizer import NormalizedRegression

from conftest import exp_regressor

DT = 1e-3


def run_scalar(variant, gamma, omega, dt=DT, theta_true=1.0, eta_min=None):
    """Scalar synthetic loop: trajectory of |theta_err| / |theta_err(0)|.

    omega is given on the inclusive grid [0, T]; the loop consumes the
    samples before the window end, so the last trajectory row sits at T.
    """
    from dremnorm.normalizer import normalize_series

    omega = omega[:-1]
    z = omega * theta_true
    if eta_min is not None:
        phi, Y = normalize_series(omega, z, eta_min)
    else:
        phi, Y = None, None
    traj = estimate_series(
        variant, gamma, dt, omega=omega, z=z, phi=phi, Y=Y
    )
    return np.abs(traj[:, 0] - theta_true) / theta_true


class TestStreamingSteps:
    def test_zero_regressor_is_a_no_op(self):
        st = start(make_estimator(PLAIN, 1.0, 3))
        out = step_plain(st, 0.0, np.zeros(3), 0.01)
        assert np.array_equal(out.theta_hat, st.theta_hat)
        st = start(make_estimator(NORM_CLASSICAL, 1.0, 3))
        out = step_norm_classical(st, 0.0, np.zeros(3), 0.01)
        assert np.array_equal(out.theta_hat, st.theta_hat)

    def test_not_started_raises(self):
        st = make_estimator(PLAIN, 1.0, 2)
        with pytest.raises(RuntimeError, match="frozen"):
            step_plain(st, 1.0, np.zeros(2), 0.01)

    def test_plain_step_matches_series(self):
        rng = np.random.default_rng(2)
        omega = rng.standard_normal(100) * 0.5
        z = omega * 2.0
        traj = estimate_series(PLAIN, 1.0, 0.01, omega=omega, z=z)
        st = start(make_estimator(PLAIN, 1.0, 1))
        for k in range(100):
            st = step_plain(st, omega[k], np.array([z[k]]), 0.01)
            assert st.theta_hat[0] == traj[k + 1, 0]

    def test_norm_excitation_step_matches_series(self):
        rng = np.random.default_rng(4)
        phi = rng.uniform(0.0, 1.0, 50)
        Y = phi * 3.0
        traj = estimate_series(NORM_EXCITATION, 0.5, 0.01, phi=phi, Y=Y)
        st = start(make_estimator(NORM_EXCITATION, 0.5, 1))
        for k in range(50):
            sample = NormalizedRegression(t=k * 0.01, phi=phi[k], Y=np.array([Y[k]]))
            st = step_norm_excitation(st, sample, 0.01)
            assert st.theta_hat[0] == traj[k + 1, 0]

    def test_nonfinite_update_names_component(self):
        st = start(EstimatorState(variant=PLAIN, gamma=1.0, theta_hat=np.ones(2)))
        with pytest.raises(NumericalError, match="component 0"):
            step_plain(st, 1e200, np.zeros(2), 1.0)

    def test_state_validation(self):
        with pytest.raises(ValueError, match="gamma"):
            EstimatorState(variant=PLAIN, gamma=0.0, theta_hat=np.zeros(2))
        with pytest.raises(ValueError, match="variant"):
            EstimatorState(variant="other", gamma=1.0, theta_hat=np.zeros(2))


class TestPlainLoop:
    def test_constant_regressor_closed_form(self):
        n = int(round(1.0 / DT))
        omega = np.ones(n + 1)
        ratio = run_scalar(PLAIN, 1.0, omega)
        assert abs(ratio[n] - np.exp(-1.0)) <= 2 * DT

    def test_decaying_regressor_closed_form(self):
        # amplitude 2 regressor: error contracts by exp(-gamma A^2 / 2)
        _, omega = exp_regressor(2.0, 1.0, DT, 10.0)
        ratio = run_scalar(PLAIN, 1.0, omega)
        assert ratio[-1] == pytest.approx(np.exp(-2.0), rel=0.01)

    def test_amplitude_sensitivity(self):
        # same gain, amplitudes 1 and 100: final errors differ by orders of
        # magnitude (the flaw the normalized loop removes)
        _, small = exp_regressor(1.0, 1.0, DT, 10.0)
        _, large = exp_regressor(100.0, 1.0, DT, 10.0)
        r_small = run_scalar(PLAIN, 0.1, small)[-1]
        r_large = run_scalar(PLAIN, 0.1, large)[-1]
        assert r_small > 1e3 * r_large


class TestNormalizedExcitationLoop:
    def test_unit_phi_closed_form(self):
        for T in (1.0, 5.0):
            n = int(round(T / DT))
            phi = np.ones(n)
            traj = estimate_series(NORM_EXCITATION, 0.1, DT, phi=phi, Y=phi * 1.0)
            ratio = abs(traj[-1, 0] - 1.0)
            assert abs(ratio - np.exp(-0.1 * T)) <= 2 * DT

    def test_decaying_regressor_normalized_excitation(self):
        _, omega = exp_regressor(1.0, 1.0, DT, 10.0)
        ratio = run_scalar(NORM_EXCITATION, 1.0, omega, eta_min=-2.0)
        assert ratio[-1] == pytest.approx(np.exp(-5.11), rel=0.01)

    def test_tenfold_regressor_normalized_excitation(self):
        _, omega = exp_regressor(10.0, 1.0, DT, 10.0)
        ratio = run_scalar(NORM_EXCITATION, 1.0, omega, eta_min=-2.0)
        assert ratio[-1] == pytest.approx(np.exp(-7.409), rel=0.01)

    def test_amplitude_invariance(self):
        # orders above the floor throughout: trajectories coincide
        _, omega = exp_regressor(3.0, 0.2, DT, 10.0)
        a = run_scalar(NORM_EXCITATION, 0.5, omega, eta_min=-12.0)
        b = run_scalar(NORM_EXCITATION, 0.5, 100.0 * omega, eta_min=-12.0)
        assert np.abs(a - b).max() <= 1e-9 * np.abs(a).max()


class TestClassicalLoop:
    def test_constant_regressor_closed_form(self):
        # omega = 1: effective squared regressor is 1/2
        for T in (1.0, 4.0):
            n = int(round(T / DT))
            omega = np.ones(n)
            traj = estimate_series(NORM_CLASSICAL, 1.0, DT, omega=omega, z=omega * 1.0)
            assert abs(abs(traj[-1, 0] - 1.0) - np.exp(-T / 2)) <= 2 * DT

    def test_excitation_saturates_below_window_length(self):
        # the normalized excitation approaches but never reaches the window
        # length as the amplitude grows
        T, dt = 10.0, 1e-3
        t, omega = exp_regressor(1e6, 1.0, dt, T)
        q = np.trapezoid(omega**2 / (1.0 + omega**2), dx=dt)
        assert q < T
        assert q > T - 0.1

    def test_amplitude_sensitivity(self):
        _, small = exp_regressor(1.0, 1.0, DT, 10.0)
        _, large = exp_regressor(100.0, 1.0, DT, 10.0)
        r_small = run_scalar(NORM_CLASSICAL, 10.0, small)[-1]
        r_large = run_scalar(NORM_CLASSICAL, 10.0, large)[-1]
        assert r_small > 1e3 * r_large


class TestAgainstAnalyticSolution:
    @pytest.mark.parametrize("variant", [PLAIN, NORM_EXCITATION, NORM_CLASSICAL])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_trajectory_tracks_exponential_of_integral(self, variant, seed):
        rng = np.random.default_rng(seed)
        amplitude = rng.uniform(0.5, 2.0)
        rate = rng.uniform(0.3, 1.5)
        t, omega = exp_regressor(amplitude, rate, DT, 10.0)
        from dremnorm.normalizer import normalize_phi_series

        if variant == PLAIN:
            effective_sq = omega**2
        elif variant == NORM_EXCITATION:
            effective_sq = normalize_phi_series(omega, -2.0) ** 2
        else:
            effective_sq = omega**2 / (1.0 + omega**2)
        gamma = 1.0
        expected = np.exp(-gamma * np.cumsum(np.insert(effective_sq[:-1], 0, 0.0)) * DT)
        measured = run_scalar(variant, gamma, omega, eta_min=-2.0)
        # compare at the window end (left-endpoint rule matches the update)
        assert measured[-1] == pytest.approx(expected[-1], rel=0.01)

    def test_monotone_decay_within_stability_bound(self, plant_result):
        for run in plant_result.runs:
            for vt in run.variants.values():
                err = vt.err_norm
                started = np.flatnonzero(run.valid)
                if started.size == 0:
                    continue
                window = err[started[0] :]
                assert (np.diff(window) <= 1e-12).all()
