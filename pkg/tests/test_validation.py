import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from microinit.exceptions import ConfigError, DegenerateInputError
from microinit.models.observation import OperatorKind
from microinit.models.system import MackeyGlassParams
from microinit.services.dynamics import LinearModel, LorenzModel, MackeyGlassModel
from microinit.services.observation import get_operator
from microinit.services.validation import (
    estimate_model_space_stats,
    lyapunov_exponent,
    median_profile,
    normalized_periodogram,
    nse_mod,
    nse_obs,
    power_spectrum,
    predictability_horizon,
    stats_from_covariance,
    ten_fold_time,
)


def test_nse_obs_examples():
    assert nse_obs(1.0, 1.0, 2.0) == 0.0
    assert nse_obs(3.0, 1.0, 2.0) == 1.0
    np.testing.assert_allclose(nse_obs([1.0, 2.0], [1.0, 0.0], 1.0), [0.0, 4.0])
    with pytest.raises(DegenerateInputError):
        nse_obs(1.0, 0.0, 0.0)


def test_nse_mod_examples():
    stats = stats_from_covariance(np.eye(3))
    assert nse_mod(np.ones(3), np.ones(3), stats) == 0.0
    assert nse_mod(np.array([1.0, 0.0, 0.0]), np.zeros(3), stats) == pytest.approx(1.0 / 3.0, rel=1e-6)


def test_nse_mod_is_batched():
    stats = stats_from_covariance(np.diag([1.0, 4.0]))
    truth = np.zeros((3, 2))
    estimate = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 2.0]])
    np.testing.assert_allclose(nse_mod(truth, estimate, stats), [0.5, 0.5, 1.0], rtol=1e-6)


def test_nse_mod_of_covariance_draws_averages_to_one():
    rng = np.random.default_rng(10)
    a = rng.normal(size=(4, 4))
    covariance = a @ a.T + np.eye(4)
    draws = rng.multivariate_normal(np.zeros(4), covariance, size=20_000)
    values = nse_mod(draws, np.zeros(4), stats_from_covariance(covariance))
    assert np.mean(values) == pytest.approx(1.0, rel=0.03)


def test_rank_deficient_covariance_is_flagged_and_regularized():
    stats = stats_from_covariance(np.diag([1.0, 0.0]))
    assert stats.rank_deficient
    assert stats.regularization > 0.0
    assert np.isfinite(nse_mod(np.array([0.0, 1e-6]), np.zeros(2), stats))


def test_state_length_must_match_covariance():
    with pytest.raises(ConfigError):
        nse_mod(np.zeros(3), np.zeros(3), stats_from_covariance(np.eye(2)))


def test_attractor_covariance_is_positive_definite():
    stats = estimate_model_space_stats(LorenzModel(), np.random.default_rng(0), n_steps=5000, burn_in=500)
    assert stats.covariance.shape == (3, 3)
    assert not stats.rank_deficient
    assert np.all(np.linalg.eigvalsh(stats.covariance) > 0.0)


def test_horizon_of_immediate_divergence_is_zero():
    report = predictability_horizon([[2.5, 3.0, 0.1]])
    assert report.indices == [0]
    assert report.k_max == 0.0
    assert report.censored_count == 0


def test_horizon_is_the_first_crossing():
    report = predictability_horizon([[0.0, 0.5, 2.0, 0.1], [0.0, 0.1, 0.2, 2.1]])
    assert report.indices == [2, 3]
    assert report.k_max == 2.5
    np.testing.assert_allclose(report.cdf, [0.0, 0.0, 0.5, 1.0])


def test_runs_that_never_cross_are_censored():
    report = predictability_horizon([[0.0] * 5, [0.0, 3.0, 0.0, 0.0, 0.0]])
    assert report.censored == [True, False]
    assert report.censored_count == 1
    assert report.indices == [5, 1]
    assert report.k_max == 3.0
    assert report.cdf[-1] == 0.5


def test_identical_sequences_share_the_horizon():
    run = [0.0, 0.3, 1.9, 2.2]
    assert predictability_horizon([run, run, run]).k_max == 3.0


def test_horizon_of_no_runs():
    report = predictability_horizon([])
    assert report.k_max == 0.0
    assert report.indices == []


@given(arrays(np.float64, (5, 20), elements=st.floats(0.0, 5.0)))
def test_horizon_cdf_is_monotone(matrix):
    cdf = predictability_horizon(list(matrix)).cdf
    assert np.all(np.diff(cdf) >= 0.0)
    assert np.all((cdf >= 0.0) & (cdf <= 1.0))


def test_ten_fold_time_examples():
    assert ten_fold_time(0.906, 2, 0.01) == pytest.approx(127.06, abs=0.05)
    assert ten_fold_time(np.log(10.0), 1, 1.0) == pytest.approx(1.0)
    assert ten_fold_time(0.906, 4, 0.01) == pytest.approx(ten_fold_time(0.906, 2, 0.01) / 2.0)
    with pytest.raises(ConfigError):
        ten_fold_time(0.0, 2, 0.01)


def test_lyapunov_of_a_contraction():
    model = LinearModel(0.5 * np.eye(2))
    lam = lyapunov_exponent(
        model, np.random.default_rng(0), renorm_interval=10, total_steps=1000, transient_steps=100,
        x0=np.zeros(2),
    )
    assert lam == pytest.approx(np.log(0.5), rel=1e-9)


def test_lyapunov_of_an_expansion_along_one_axis():
    model = LinearModel(np.diag([1.5, 0.5]))
    lam = lyapunov_exponent(
        model, np.random.default_rng(1), renorm_interval=5, total_steps=500, transient_steps=100,
        x0=np.zeros(2),
    )
    assert lam == pytest.approx(np.log(1.5), rel=1e-6)


def test_lyapunov_rejects_bad_intervals():
    with pytest.raises(ConfigError):
        lyapunov_exponent(LinearModel(np.eye(2)), np.random.default_rng(0), renorm_interval=0)
    with pytest.raises(ConfigError):
        lyapunov_exponent(LinearModel(np.eye(2)), np.random.default_rng(0), renorm_interval=10, total_steps=5)


def test_periodogram_peaks_at_the_sinusoid_frequency():
    n, spacing = 256, 0.5
    t = np.arange(n) * spacing
    frequency, power = normalized_periodogram(3.0 + np.sin(2.0 * np.pi * 8.0 / (n * spacing) * t), spacing)
    assert np.argmax(power) == 8
    assert frequency[8] == pytest.approx(8.0 / (n * spacing))
    assert power.sum() == pytest.approx(1.0)
    assert power[8] > 0.99


def test_periodogram_of_a_constant_is_undefined():
    with pytest.raises(DegenerateInputError):
        normalized_periodogram(np.ones(16), 1.0)


def test_power_spectrum_is_normalized():
    spectrum = power_spectrum(LorenzModel(), np.random.default_rng(2), n_runs=2, n_points=256)
    assert spectrum.power.sum() == pytest.approx(1.0, abs=1e-9)
    assert spectrum.frequency.size == 129
    assert spectrum.df == pytest.approx(1.0 / (256 * 0.01))
    np.testing.assert_allclose(spectrum.density * spectrum.df, spectrum.power)


def test_power_spectrum_of_the_observable():
    op = get_operator(OperatorKind.CUBE_SUM)
    spectrum = power_spectrum(LorenzModel(), np.random.default_rng(2), op=op, n_runs=1, n_points=128)
    assert spectrum.power.sum() == pytest.approx(1.0, abs=1e-9)


def test_power_spectrum_needs_a_power_of_two():
    with pytest.raises(ConfigError):
        power_spectrum(LorenzModel(), np.random.default_rng(0), n_runs=1, n_points=100)


@given(arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 6)), elements=st.floats(-1e3, 1e3)))
def test_median_profile_matches_sorting(matrix):
    ordered = np.sort(matrix, axis=0)
    n = matrix.shape[0]
    if n % 2:
        expected = ordered[n // 2]
    else:
        expected = 0.5 * (ordered[n // 2 - 1] + ordered[n // 2])
    np.testing.assert_allclose(median_profile(matrix), expected, rtol=1e-12, atol=1e-12)


@pytest.mark.slow
def test_lorenz_largest_exponent():
    lam = lyapunov_exponent(LorenzModel(), np.random.default_rng(0), total_steps=100_000)
    assert lam == pytest.approx(0.906, rel=0.1)
    assert ten_fold_time(lam, 2, 0.01) == pytest.approx(127, rel=0.15)


@pytest.mark.slow
def test_mackey_glass_ten_fold_time():
    model = MackeyGlassModel(MackeyGlassParams())
    lam = lyapunov_exponent(model, np.random.default_rng(0), total_steps=200_000, transient_steps=5000)
    assert ten_fold_time(lam, 2, model.dt) == pytest.approx(230, rel=0.15)


def _power_near(spectrum, frequency, half_width=2):
    centre = int(np.argmin(np.abs(spectrum.frequency - frequency)))
    return float(np.mean(spectrum.power[centre - half_width : centre + half_width + 1]))


@pytest.mark.slow
def test_lorenz_keeps_more_power_at_a_six_time_unit_period():
    lorenz = power_spectrum(LorenzModel(), np.random.default_rng(5), n_runs=20, n_points=4096)
    mackey_glass = power_spectrum(
        MackeyGlassModel(MackeyGlassParams()), np.random.default_rng(5), n_runs=20, n_points=4096
    )
    assert _power_near(lorenz, 1.0 / 6.0) >= 100.0 * _power_near(mackey_glass, 1.0 / 6.0)
