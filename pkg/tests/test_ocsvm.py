import numpy as np
import pytest

from driftbench.detectors import OneClassSVM, ocsvm_score, ocsvm_train, rbf_kernel
from driftbench.detectors.ocsvm import solve_dual
from oracles import ocsvm_instances, qp_oracle

pytest.importorskip("cvxopt")


def test_nu_property_and_oracle_agreement():
    for X, nu, gamma in ocsvm_instances():
        model = ocsvm_train(X, nu, gamma)
        f = ocsvm_score(model, X)
        n = len(X)
        # margin points sit at |f| ~ solver tolerance; count clear outliers only
        assert np.mean(f < -1e-6) <= nu + 1.0 / n
        alpha_o, rho_o, Q = qp_oracle(X, nu, gamma)
        f_oracle = Q @ alpha_o - rho_o
        assert np.max(np.abs(f - f_oracle)) < 1e-4
        assert model.alpha.sum() == pytest.approx(1.0)
        assert np.all(model.alpha <= 1.0 / (nu * n) + 1e-12)


def test_objective_matches_oracle():
    for X, nu, gamma in ocsvm_instances(10, seed=1):
        Q = rbf_kernel(X, X, gamma)
        alpha, _, _ = solve_dual(Q, 1.0 / (nu * len(X)))
        alpha_o, _, _ = qp_oracle(X, nu, gamma)
        assert 0.5 * alpha @ Q @ alpha <= 0.5 * alpha_o @ Q @ alpha_o + 1e-7


def test_identical_points_all_inside():
    X = np.ones((10, 3))
    model = ocsvm_train(X, nu=0.1, gamma=0.5)
    assert np.all(ocsvm_score(model, X) >= -1e-12)
    alpha_o, rho_o, Q = qp_oracle(X, 0.1, 0.5)
    assert np.all(Q @ alpha_o - rho_o >= -1e-6)


def test_far_point_scores_minus_rho():
    X = np.random.default_rng(2).normal(size=(20, 2))
    model = ocsvm_train(X, 0.2, 1.0)
    assert model.rho > 0
    assert ocsvm_score(model, np.array([[1e3, 1e3]]))[0] == pytest.approx(-model.rho)


def test_rbf_self_similarity():
    X = np.random.default_rng(3).normal(size=(7, 4))
    assert np.allclose(np.diag(rbf_kernel(X, X, 0.7)), 1.0)


def test_margin_support_vector_scores_zero():
    X = np.random.default_rng(4).normal(size=(25, 2))
    nu = 0.2
    model = ocsvm_train(X, nu, 0.5)
    upper = 1.0 / (nu * len(X))
    free = (model.alpha > 1e-9) & (model.alpha < upper - 1e-9)
    assert free.any()
    assert np.all(np.abs(ocsvm_score(model, model.support_vectors[free])) <= 1e-4)


def test_interior_duplicate_positive():
    rng = np.random.default_rng(5)
    X = rng.normal(scale=0.5, size=(30, 2))
    model = ocsvm_train(X, 0.1, 0.5)
    f = ocsvm_score(model, X)
    deepest = X[np.argmax(f)]
    assert ocsvm_score(model, deepest[None, :])[0] > 0


def test_reflection_symmetry():
    rng = np.random.default_rng(6)
    half = rng.normal(size=(10, 2))
    X = np.vstack([half, -half])
    model = ocsvm_train(X, 0.2, 0.5)
    probe = rng.normal(size=(15, 2))
    assert np.allclose(ocsvm_score(model, probe), ocsvm_score(model, -probe), atol=1e-6)


def test_nu_one_edge_case():
    X = np.random.default_rng(7).normal(size=(8, 2))
    model = ocsvm_train(X, 1.0, 0.5)
    assert np.allclose(model.alpha, 1.0 / 8)


def test_estimator_wrapper():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(40, 3))
    est = OneClassSVM(nu=0.1).fit(X)
    assert est.model_.gamma == pytest.approx(1 / 3)
    pred = est.predict(np.vstack([X, [[50.0, 50.0, 50.0]]]))
    assert set(np.unique(pred)) <= {-1, 1} and pred[-1] == -1
    res = est.detect(X)
    assert np.array_equal(res.flags, est.decision_function(X) < 0)
    assert np.allclose(res.scores, -est.decision_function(X))
    with pytest.raises(ValueError):
        est.decision_function(np.zeros((2, 5)))


def test_training_validation():
    with pytest.raises(ValueError):
        ocsvm_train(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        ocsvm_train(np.zeros((5, 2)), nu=0.0)
    with pytest.raises(ValueError):
        ocsvm_train(np.zeros((5, 2)), gamma=-1)


def test_deterministic():
    X = np.random.default_rng(9).normal(size=(20, 2))
    a, b = ocsvm_train(X, 0.1, 1.0), ocsvm_train(X, 0.1, 1.0)
    assert np.array_equal(a.alpha, b.alpha) and a.rho == b.rho
