import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftbench.detectors import (
    THETA_GRID,
    CusumDriftDetector,
    CusumFlattenDetector,
    CusumFlattenParams,
    EwmaDetector,
    EwmaParams,
    cusum_flatten,
    cusum_offtopic,
    ewma,
    grid_search_theta,
)
from driftbench.metrics import f1_from_flags

series = st.lists(st.floats(-50, 50), min_size=1, max_size=60)


def test_cusum_flatten_hand_trace():
    res = cusum_flatten([0.5, 0.5, 0.2, 0.2, 0.2], CusumFlattenParams(mu=0.5, k=0.1, h=0.5))
    assert np.allclose(res.extras["S"], [0, 0, -0.2, -0.4, -0.6])
    # 1-based index 5 is the first flag
    assert res.flags.tolist() == [False, False, False, False, True]
    assert np.allclose(res.scores, [0, 0, 0.2, 0.4, 0.6])


def test_cusum_flatten_slack_absorbs_baseline():
    res = cusum_flatten(np.full(20, 1.3), CusumFlattenParams(mu=1.3, k=0.2, h=1.0))
    assert not res.flags.any() and np.all(res.extras["S"] == 0)


def test_cusum_flatten_single_drop():
    res = cusum_flatten([-9.0], CusumFlattenParams(mu=1.0, k=0.5, h=0.5))
    assert res.flags[0]


def test_cusum_reset_on_alarm():
    x = [0, -2, -2, -2, -2, 0]
    plain = cusum_flatten(x, CusumFlattenParams(0.0, 0.5, 2.0))
    reset = cusum_flatten(x, CusumFlattenParams(0.0, 0.5, 2.0), reset_on_alarm=True)
    assert np.allclose(plain.extras["S"], [0, -1.5, -3, -4.5, -6, -5.5])
    assert plain.flags.tolist() == [False, False, True, True, True, True]
    assert np.allclose(reset.extras["S"], [0, -1.5, -3, -1.5, -3, 0])
    assert reset.flags.tolist() == [False, False, True, False, True, False]


@settings(max_examples=200, deadline=None)
@given(x=series, mu=st.floats(-5, 5), k=st.floats(0, 2), h=st.floats(0.01, 10))
def test_cusum_flatten_state_nonpositive(x, mu, k, h):
    res = cusum_flatten(x, CusumFlattenParams(mu, k, h))
    assert np.all(res.extras["S"] <= 0)
    assert np.array_equal(res.flags, res.extras["S"] < -h)


def test_cusum_params_validated():
    with pytest.raises(ValueError):
        CusumFlattenParams(0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        CusumFlattenParams(0.0, 0.5, 0.0)


def test_cusum_offtopic_hand_trace():
    res = cusum_offtopic([0.05, 0.3, 0.3], 0.1)
    assert np.allclose(res.extras["S"], [0, 0.2, 0.4])
    assert res.flags.tolist() == [False, True, True]
    assert np.allclose(res.scores, [0.05, 0.3, 0.3])


def test_cusum_offtopic_zero_series():
    res = cusum_offtopic(np.zeros(10), 0.1)
    assert not res.flags.any() and np.all(res.extras["S"] == 0)


@settings(max_examples=200, deadline=None)
@given(x=series, theta=st.floats(0.01, 0.5))
def test_cusum_offtopic_state_nonnegative(x, theta):
    assert np.all(cusum_offtopic(x, theta).extras["S"] >= 0)


def test_theta_grid():
    assert len(THETA_GRID) == 50
    assert THETA_GRID[0] == 0.01 and THETA_GRID[-1] == 0.5
    assert np.allclose(np.diff(THETA_GRID), 0.01)


def test_grid_search_all_normal_ties_to_smallest():
    rng = np.random.default_rng(0)
    assert grid_search_theta(rng.random(30), np.zeros(30, bool)) == 0.01


def test_grid_search_picks_best_f1():
    drift = np.array([0.02] * 10 + [0.6] * 4 + [0.02] * 10)
    labels = np.array([0] * 10 + [1] * 4 + [0] * 10, bool)
    theta = grid_search_theta(drift, labels)
    scores = [f1_from_flags(cusum_offtopic(drift, t).flags, labels) for t in THETA_GRID]
    best = int(np.argmax(scores))  # first maximum = smallest theta among ties
    assert theta == THETA_GRID[best]
    assert scores[best] > 0.5


def test_drift_detector_requires_labels_or_theta():
    with pytest.raises(ValueError):
        CusumDriftDetector().fit(np.ones(5))
    with pytest.raises(ValueError):
        CusumDriftDetector().fit(np.ones(5), np.zeros(5))
    assert CusumDriftDetector(theta=0.2).fit(np.ones(5)).theta_ == 0.2


def test_ewma_hand_trace():
    res = ewma([1.0, 0.0], EwmaParams(mu=1.0, sigma=0.2, lam=0.5, z_threshold=3))
    assert np.allclose(res.extras["S"], [1.0, 0.5], atol=1e-12)
    control = 0.2 * np.sqrt(0.5 / 1.5)
    assert control == pytest.approx(0.11547, abs=1e-5)
    assert res.extras["z"][1] == pytest.approx(-0.5 / control, abs=1e-12)
    assert res.extras["z"][1] == pytest.approx(-4.330, abs=1e-3)
    assert res.flags.tolist() == [False, True]


@settings(max_examples=100, deadline=None)
@given(x=series)
def test_ewma_lambda_one_is_identity(x):
    res = ewma(x, EwmaParams(mu=0.0, sigma=1.0, lam=1.0))
    assert np.array_equal(res.extras["S"], np.asarray(x, float))


def test_ewma_constant_converges_geometrically():
    res = ewma(np.full(30, 2.0), EwmaParams(mu=0.0, sigma=1.0, lam=0.3))
    gaps = 2.0 - res.extras["S"]
    assert np.allclose(gaps[1:] / gaps[:-1], 0.7)


def test_ewma_zero_sigma_guarded():
    res = ewma([1.0, 0.0], EwmaParams(mu=1.0, sigma=0.0, lam=0.5))
    assert np.all(np.isfinite(res.scores)) and res.flags[1]


def test_ewma_params_validated():
    with pytest.raises(ValueError):
        EwmaParams(0, 1, lam=0.0)
    with pytest.raises(ValueError):
        EwmaParams(0, 1, lam=0.5, z_threshold=0)


def test_estimators_fit_on_baseline_prefix():
    x = np.r_[np.zeros(10) + [0.1, -0.1] * 5, np.full(10, -3.0)]
    cu = CusumFlattenDetector().fit(x)
    assert cu.mu_ == pytest.approx(0.0)
    flags = cu.predict(x)
    assert not flags[:10].any() and flags[10:].any()
    ew = EwmaDetector().fit(x)
    assert ew.sigma_ == pytest.approx(0.1)
    assert ew.predict(x)[10:].all()


def test_estimator_params_roundtrip():
    assert CusumFlattenDetector(k=0.3).get_params()["k"] == 0.3
    assert EwmaDetector().set_params(lam=0.2).lam == 0.2


def test_series_validation():
    with pytest.raises(ValueError):
        cusum_flatten([], CusumFlattenParams(0, 0.5, 1))
    with pytest.raises(ValueError):
        cusum_offtopic([0.1, np.nan], 0.1)
    with pytest.raises(ValueError):
        ewma(np.zeros((2, 2)), EwmaParams(0, 1))
