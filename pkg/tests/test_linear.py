import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from microinit.exceptions import ConfigError
from microinit.models.linear import LinearTVSystem
from microinit.services.linear import (
    build_matrix,
    observe_linear,
    random_system,
    recover,
    reduced_indices,
    transition_study,
)


def _constant_system(F, H, length):
    return LinearTVSystem(F_seq=np.array([F] * length), H_seq=np.array([H] * length))


def test_identity_dynamics_repeat_the_observation_row():
    system = _constant_system(np.eye(3), np.ones(3), 6)
    matrix = build_matrix(system, T=3, m=2)
    np.testing.assert_array_equal(matrix.rows, np.ones((6, 3)))
    assert matrix.row_indices == list(range(6))


def test_single_observation_is_the_first_row():
    system = random_system(np.random.default_rng(0), 4, 1)
    matrix = build_matrix(system, T=1, m=1)
    np.testing.assert_array_equal(matrix.rows, system.H_seq[:1])


def test_rows_are_propagated_observation_rows():
    system = random_system(np.random.default_rng(1), 4, 4)
    matrix = build_matrix(system, T=2, m=2)
    F, H = system.F_seq, system.H_seq
    expected = [
        H[0],
        H[1] @ F[0],
        H[2] @ F[1] @ F[0],
        H[3] @ F[2] @ F[1] @ F[0],
    ]
    np.testing.assert_allclose(matrix.rows, expected, rtol=1e-12, atol=1e-12)


def test_reduced_indices_examples():
    assert reduced_indices(3, 1) == [0, 1, 2]
    assert reduced_indices(2, 2) == [0, 1]
    assert reduced_indices(3, 3) == [0, 2, 5]


@given(T=st.integers(1, 10), m=st.integers(1, 6))
def test_reduced_rows_are_a_subset_of_the_extended_rows(T, m):
    indices = reduced_indices(T, m)
    assert len(indices) == T
    assert len(set(indices)) == T
    assert all(0 <= k < m * T for k in indices)


def test_reduced_matrix_keeps_the_sampled_rows():
    system = random_system(np.random.default_rng(2), 4, 9)
    extended = build_matrix(system, T=3, m=3)
    reduced = build_matrix(system, T=3, m=3, extended=False)
    np.testing.assert_array_equal(reduced.rows, extended.rows[[0, 2, 5]])


def test_full_rank_system_is_recovered_exactly():
    rng = np.random.default_rng(3)
    system = random_system(rng, 4, 4)
    truth = rng.standard_normal(4)
    matrix = build_matrix(system, T=4, m=1)
    result = recover(matrix, observe_linear(matrix, truth))
    assert result.unique
    assert result.rank == 4
    assert np.linalg.norm(result.x0 - truth) / np.linalg.norm(truth) <= 1e-8


def test_too_few_rows_leave_a_family_of_solutions():
    rng = np.random.default_rng(4)
    system = random_system(rng, 4, 4)
    truth = rng.standard_normal(4)
    matrix = build_matrix(system, T=2, m=2, extended=False)
    y = observe_linear(matrix, truth)
    result = recover(matrix, y)
    assert result.rank <= 2
    assert not result.unique
    assert result.residual <= 1e-9
    assert np.linalg.norm(result.x0 - truth) > 1e-3


def test_zero_dynamics_have_rank_one():
    system = _constant_system(np.zeros((3, 3)), np.ones(3), 4)
    result = recover(build_matrix(system, T=4, m=1), np.array([1.0, 0.0, 0.0, 0.0]))
    assert result.rank == 1


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_x=st.integers(1, 6), T=st.integers(1, 6), m=st.integers(1, 3))
def test_exact_recovery_follows_the_rank(seed, n_x, T, m):
    rng = np.random.default_rng(seed)
    system = random_system(rng, n_x, m * T)
    truth = rng.standard_normal(n_x)
    matrix = build_matrix(system, T, m)
    result = recover(matrix, observe_linear(matrix, truth))
    assert result.rank <= min(m * T, n_x)
    if result.unique:
        np.testing.assert_allclose(result.x0, truth, rtol=1e-6, atol=1e-6)


def test_observation_rows_must_be_non_zero():
    with pytest.raises(ValidationError):
        _constant_system(np.eye(2), np.array([1.0, 0.0]), 2)


def test_shape_mismatch_is_rejected():
    with pytest.raises(ValidationError):
        LinearTVSystem(F_seq=np.zeros((2, 3, 3)), H_seq=np.ones((2, 2)))


def test_short_system_is_rejected():
    system = random_system(np.random.default_rng(5), 3, 2)
    with pytest.raises(ConfigError):
        build_matrix(system, T=2, m=2)


def test_observation_count_must_match():
    system = random_system(np.random.default_rng(6), 3, 3)
    with pytest.raises(ConfigError):
        recover(build_matrix(system, T=3, m=1), np.zeros(2))


def test_transition_study_separates_the_grid():
    frame = transition_study(n_x=4, m_range=[1, 2], T_range=[1, 2, 3, 4], draws=5, seed=0)
    assert list(frame.columns) == ["T", "m", "median_error", "rank", "unique_fraction"]
    assert len(frame) == 8
    for row in frame.itertuples():
        if row.T * row.m >= 4:
            assert row.median_error <= 1e-8
            assert row.unique_fraction == 1.0
        else:
            assert row.median_error > 1e-3
            assert row.rank == row.T * row.m


def test_transition_study_is_reproducible():
    first = transition_study(n_x=3, m_range=[1], T_range=[1, 3], draws=3, seed=9)
    second = transition_study(n_x=3, m_range=[1], T_range=[1, 3], draws=3, seed=9)
    assert first.equals(second)
