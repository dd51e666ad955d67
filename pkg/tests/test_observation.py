import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import skew

from microinit.exceptions import ConfigError, InvalidSeriesError
from microinit.models.observation import NoiseDistribution, ObservationSeries, OperatorKind
from microinit.services.dynamics import sample_attractor, trajectory
from microinit.services.observation import (
    CubeSum,
    PairwiseSum,
    Product,
    add_noise,
    generate_series,
    get_operator,
    observe,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
states = arrays(np.float64, 3, elements=finite)
nonzero = st.one_of(st.floats(0.1, 10), st.floats(-10, -0.1))


def _sine_series(n=10_001):
    values = np.sin(np.linspace(0.0, 40.0 * np.pi, n)) + 0.5
    return ObservationSeries(values=values, m=1, dt=0.01)


def test_operator_examples():
    assert observe(CubeSum(), np.array([1.0, 1.0, 1.0])) == pytest.approx(1.442250, abs=1e-6)
    assert observe(Product(), np.array([2.0, 3.0, 4.0])) == pytest.approx(2.884499, abs=1e-6)
    assert observe(PairwiseSum(), np.array([1.0, -2.0, 0.0])) == pytest.approx(-1.414214, abs=1e-6)
    assert observe(Product(), np.array([0.0, 5.0, -3.0])) == 0.0


def test_operator_lookup():
    assert get_operator("product").kind is OperatorKind.PRODUCT
    assert get_operator(OperatorKind.CUBE_SUM).kind is OperatorKind.CUBE_SUM
    with pytest.raises(ConfigError):
        get_operator("mean")


@settings(max_examples=200)
@given(x=arrays(np.float64, 3, elements=nonzero), scale=st.floats(0, 10))
@pytest.mark.parametrize("op", [CubeSum(), Product(), PairwiseSum()], ids=lambda o: o.kind.value)
def test_operators_are_positively_homogeneous(op, x, scale):
    # away from cancellation the root does not amplify rounding
    if not isinstance(op, Product):
        assume(abs(observe(op, x)) > 0.1 * np.max(np.abs(x)))
    assert observe(op, scale * x) == pytest.approx(scale * observe(op, x), rel=1e-9, abs=1e-9)


@settings(max_examples=200)
@given(x=arrays(np.float64, 3, elements=nonzero), scale=st.floats(-10, 10))
@pytest.mark.parametrize("op", [CubeSum(), Product()], ids=lambda o: o.kind.value)
def test_odd_operators_are_homogeneous_for_any_sign(op, x, scale):
    if isinstance(op, CubeSum):
        assume(abs(observe(op, x)) > 0.1 * np.max(np.abs(x)))
    assert op.is_odd(3)
    assert observe(op, scale * x) == pytest.approx(scale * observe(op, x), rel=1e-9, abs=1e-9)


@given(x=states)
def test_cube_sum_is_invertible(x):
    assert observe(CubeSum(), x) ** 3 == pytest.approx(np.sum(x**3), rel=1e-9, abs=1e-9)


@given(x=states)
def test_product_ignores_paired_sign_flips(x):
    op = Product()
    assert observe(op, x * np.array([1.0, -1.0, -1.0])) == observe(op, x)
    assert observe(op, x * np.array([-1.0, -1.0, 1.0])) == observe(op, x)


def test_operators_broadcast_over_batches(rng):
    batch = rng.normal(size=(5, 4, 3))
    for op in (CubeSum(), Product(), PairwiseSum()):
        values = observe(op, batch)
        assert values.shape == (5, 4)
        assert values[2, 1] == pytest.approx(observe(op, batch[2, 1]))


def test_generate_series_samples_every_m_steps(lorenz, lorenz_state):
    series = generate_series(lorenz, CubeSum(), lorenz_state, T=1, m=1)
    assert series.T == 1
    assert series.values[1] == pytest.approx(observe(CubeSum(), lorenz.step(lorenz_state)))
    np.testing.assert_allclose(series.times, [-0.01, 0.0])


def test_constant_series_is_rejected(mackey_glass):
    with pytest.raises(InvalidSeriesError):
        generate_series(mackey_glass, CubeSum(), np.ones(50), T=5, m=2)


def test_short_series_is_rejected():
    with pytest.raises(InvalidSeriesError):
        ObservationSeries(values=[1.0], m=1, dt=0.1)
    with pytest.raises(InvalidSeriesError):
        ObservationSeries(values=[1.0, np.nan, 2.0], m=1, dt=0.1)


def test_sigma_is_recomputed_from_values():
    series = ObservationSeries(values=[1.0, 3.0], m=1, dt=1.0, sigma_y=99.0)
    assert series.sigma_y == 1.0


def test_zero_noise_returns_the_series():
    series = _sine_series(101)
    noisy = add_noise(series, 0.0, NoiseDistribution.GAUSSIAN, np.random.default_rng(0))
    np.testing.assert_array_equal(noisy.values, series.values)


@pytest.mark.parametrize("dist", list(NoiseDistribution))
def test_noise_has_requested_scale(dist):
    clean = _sine_series()
    noisy = add_noise(clean, 0.3, dist, np.random.default_rng(5))
    noise = noisy.values - clean.values
    assert np.std(noise) == pytest.approx(0.3 * clean.sigma_y, rel=0.03)
    assert abs(np.mean(noise)) < 0.02 * clean.sigma_y
    assert abs(np.corrcoef(noise, clean.values)[0, 1]) < 0.05
    assert noisy.noise_ratio == 0.3


def test_beta_noise_is_left_skewed():
    clean = _sine_series()
    noisy = add_noise(clean, 0.3, NoiseDistribution.BETA, np.random.default_rng(8))
    assert skew(noisy.values - clean.values) < -0.3


def test_noise_is_reproducible():
    clean = _sine_series(501)
    first = add_noise(clean, 0.3, "gaussian", np.random.default_rng(21))
    second = add_noise(clean, 0.3, "gaussian", np.random.default_rng(21))
    np.testing.assert_array_equal(first.values, second.values)


def test_negative_noise_ratio_is_rejected():
    with pytest.raises(ConfigError):
        add_noise(_sine_series(11), -0.1, "gaussian", np.random.default_rng(0))


def test_short_series_variance_matches_the_attractor(lorenz, rng):
    orbit = trajectory(lorenz, sample_attractor(lorenz, rng), 100_000, 1)
    long_run = np.var(observe(CubeSum(), orbit))
    short = [
        generate_series(lorenz, CubeSum(), sample_attractor(lorenz, rng), T=50, m=2).sigma_y ** 2
        for _ in range(20)
    ]
    assert long_run / 4.0 <= np.median(short) <= 4.0 * long_run
