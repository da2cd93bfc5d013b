"""Independent reference computations shared by the unit and acceptance tests."""
import numpy as np

from driftbench.detectors import rbf_kernel
from driftbench.detectors.gru import PARAM_NAMES, loss_and_grads


def qp_oracle(X, nu, gamma):
    """Interior-point solution of the one-class dual.

    ``rho`` is the mean of ``(Q alpha)_i`` over free vectors. With none free
    it is only bounded by the KKT conditions, and the midpoint of that
    interval is used.
    """
    import cvxopt

    cvxopt.solvers.options.update(show_progress=False, abstol=1e-10, reltol=1e-10, feastol=1e-10)
    n = len(X)
    Q = rbf_kernel(X, X, gamma)
    upper = 1.0 / (nu * n)
    m = cvxopt.matrix
    sol = cvxopt.solvers.qp(
        m(Q + 1e-12 * np.eye(n)), m(np.zeros(n)),
        m(np.vstack([-np.eye(n), np.eye(n)])), m(np.r_[np.zeros(n), np.full(n, upper)]),
        m(np.ones((1, n))), m(1.0))
    alpha = np.array(sol["x"]).ravel()
    grad = Q @ alpha
    tol = 1e-6 * upper
    at_zero, at_upper = alpha < tol, alpha > upper - tol
    free = ~(at_zero | at_upper)
    if free.any():
        rho = float(grad[free].mean())
    else:
        # alpha = 0 needs grad >= rho, alpha = upper needs grad <= rho
        lo = grad[at_upper].max() if at_upper.any() else -np.inf
        hi = grad[at_zero].min() if at_zero.any() else np.inf
        rho = float((lo + hi) / 2)
    return alpha, rho, Q


def ocsvm_instances(count=50, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(5, 31))
        d = int(rng.integers(1, 4))
        X = rng.normal(size=(n, d)) * rng.uniform(0.3, 2.0)
        nu = float(rng.choice([0.1, 0.2, 0.3, 0.5]))
        gamma = float(rng.choice([0.1, 0.5, 1.0]))
        yield X, nu, gamma


def numeric_grad(params, X, T, name, eps=1e-5):
    grad = np.zeros_like(params[name])
    it = np.nditer(params[name], flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        orig = params[name][i]
        params[name][i] = orig + eps
        up = loss_and_grads(params, X, T)[0]
        params[name][i] = orig - eps
        down = loss_and_grads(params, X, T)[0]
        params[name][i] = orig
        grad[i] = (up - down) / (2 * eps)
    return grad


def max_gradient_error(params, X, T):
    """Largest relative error between BPTT and central differences over every parameter."""
    _, analytic = loss_and_grads(params, X, T)
    worst = 0.0
    for name in PARAM_NAMES:
        numeric = numeric_grad(params, X, T, name)
        rel = np.abs(analytic[name] - numeric) / np.maximum(
            np.abs(analytic[name]) + np.abs(numeric), 1e-6)
        worst = max(worst, float(rel.max()))
    return worst


def brute_force_f1(flags, labels):
    tp = fp = fn = 0
    for f, y in zip(flags, labels):
        tp += bool(f) and bool(y)
        fp += bool(f) and not y
        fn += (not f) and bool(y)
    if tp == 0:
        return 0.0
    precision, recall = tp / (tp + fp), tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)
