import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from microinit.exceptions import ConfigError, DegenerateInputError, InvalidSeriesError
from microinit.models.observation import NoiseDistribution, ObservationSeries
from microinit.models.system import MackeyGlassParams
from microinit.services.dynamics import LorenzModel, MackeyGlassModel, sample_attractor
from microinit.services.filter import filter_report, lpma, lpma_once, lpma_values, snr_gain
from microinit.services.observation import CubeSum, add_noise, generate_series
from microinit.services.seeding import stage_rng

tracks = arrays(
    np.float64, st.integers(2, 40), elements=st.floats(-100, 100, allow_nan=False)
)


def test_single_pass_examples():
    np.testing.assert_allclose(lpma_once(np.array([0.0, 1.0, 0.0])), [0.5, 0.5, 0.5])
    np.testing.assert_allclose(lpma_once(np.array([1.0, 2.0, 3.0, 4.0])), [1.5, 2.0, 3.0, 3.5])


def test_two_samples_average():
    np.testing.assert_allclose(lpma_once(np.array([2.0, 4.0])), [3.0, 3.0])


def test_single_sample_is_rejected():
    with pytest.raises(InvalidSeriesError):
        lpma_once(np.array([1.0]))


def test_negative_pass_count_is_rejected():
    with pytest.raises(ConfigError):
        lpma_values(np.arange(5.0), -1)


@given(value=st.floats(-1e6, 1e6), length=st.integers(2, 50), q=st.integers(0, 6))
def test_constants_pass_unchanged(value, length, q):
    np.testing.assert_allclose(lpma_values(np.full(length, value), q), value, rtol=1e-12)


@given(track=tracks)
def test_passes_compose(track):
    np.testing.assert_array_equal(lpma_values(track, 2), lpma_once(lpma_once(track)))
    np.testing.assert_array_equal(lpma_values(track, 0), track)


@given(data=st.data(), length=st.integers(2, 30))
def test_filter_is_linear(data, length):
    elements = st.floats(-100, 100, allow_nan=False)
    a = data.draw(arrays(np.float64, length, elements=elements))
    b = data.draw(arrays(np.float64, length, elements=elements))
    c = data.draw(st.floats(-10, 10))
    np.testing.assert_allclose(
        lpma_values(a + c * b, 3),
        lpma_values(a, 3) + c * lpma_values(b, 3),
        rtol=1e-9,
        atol=1e-9,
    )


def test_white_noise_variance_drops_each_pass():
    noise = np.random.default_rng(0).standard_normal(50_000)
    variances = [np.var(lpma_values(noise, q)) for q in range(5)]
    assert all(later < earlier for earlier, later in zip(variances, variances[1:]))
    once = lpma_once(noise)
    assert np.var(once[1:-1]) / np.var(noise) == pytest.approx(3.0 / 8.0, rel=0.05)


def test_lpma_keeps_series_metadata():
    series = ObservationSeries(values=[0.0, 1.0, 0.0, 2.0], m=3, dt=0.5, noise_ratio=0.3)
    assert lpma(series, 0) is series
    filtered = lpma(series, 1)
    assert (filtered.m, filtered.dt, filtered.noise_ratio) == (3, 0.5, 0.3)
    assert filtered.sigma_y == pytest.approx(np.std(filtered.values))


def test_snr_gain_of_identity_filter_is_one():
    clean = np.array([0.0, 1.0, 2.0, 3.0])
    noisy = clean + np.array([0.1, -0.2, 0.05, 0.3])
    assert snr_gain(clean, noisy, noisy) == 1.0


def test_snr_gain_needs_a_residual():
    clean = np.array([0.0, 1.0, 2.0])
    with pytest.raises(DegenerateInputError):
        snr_gain(clean, clean + 0.1, clean)


def test_snr_gain_needs_equal_lengths():
    with pytest.raises(ConfigError):
        snr_gain(np.zeros(3), np.ones(3), np.ones(4))


def test_filter_report_on_white_noise():
    rng = np.random.default_rng(4)
    clean = np.zeros(50_000)
    noisy = rng.standard_normal(50_000)
    report = filter_report(clean, noisy, 4)
    assert report.q == 4
    # four passes are the binomial kernel C(8, k) / 256, sum of squares 12870 / 65536
    assert report.r0 == pytest.approx(np.sqrt(65536.0 / 12870.0), rel=0.02)


def _median_gain(model, T, m, q, runs=40):
    gains = []
    for run in range(runs):
        start = sample_attractor(model, stage_rng(0, "truth", run))
        clean = generate_series(model, CubeSum(), start, T, m)
        noisy = add_noise(clean, 0.3, NoiseDistribution.GAUSSIAN, stage_rng(0, "noise", run))
        gains.append(filter_report(clean.values, noisy.values, q).r0)
    return float(np.median(gains))


@pytest.mark.slow
def test_lorenz_filter_gain():
    assert _median_gain(LorenzModel(), T=50, m=2, q=4) == pytest.approx(2.02, abs=0.4)


@pytest.mark.slow
def test_mackey_glass_filter_gain():
    model = MackeyGlassModel(MackeyGlassParams())
    assert _median_gain(model, T=25, m=2, q=5) == pytest.approx(2.41, abs=0.5)
