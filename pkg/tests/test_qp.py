import numpy as np
import pytest
from scipy.optimize import minimize

from pmuplace.qp import elastic_qp


def reference(w, C, b, mu):
    """Smooth split of the hinge: min w z^2 + mu*sum s, C z + s >= b, s >= 0, 0 <= z <= 1."""
    m, n = C.shape
    fun = lambda v: w @ v[:n] ** 2 + mu * v[n:].sum()
    jac = lambda v: np.concatenate([2 * w * v[:n], np.full(m, mu)])
    cons = {"type": "ineq", "fun": lambda v: C @ v[:n] + v[n:] - b,
            "jac": lambda v: np.hstack([C, np.eye(m)])}
    v0 = np.concatenate([np.ones(n), np.maximum(b - C.sum(axis=1), 0)])
    res = minimize(fun, v0, jac=jac, constraints=[cons],
                   bounds=[(0, 1)] * n + [(0, None)] * m, method="SLSQP",
                   options={"ftol": 1e-13, "maxiter": 500})
    return res.fun


def objective(w, C, b, mu, z):
    return w @ z ** 2 + mu * np.maximum(b - C @ z, 0).sum()


def test_path_two_example():
    # f = (1, 1) at x = 0, both gradients (-1, -1): d1 + d2 >= 1
    r = elastic_qp(np.ones(2), np.ones((2, 2)), np.ones(2))
    assert np.allclose(r.z, [0.5, 0.5], atol=1e-10)


def test_hard_constraints_satisfied():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m, n = rng.integers(1, 12, size=2)
        C = rng.random((m, n)) * (rng.random((m, n)) < 0.5)
        C[:, rng.integers(0, n)] += 0.5
        b = rng.random(m) * C.sum(axis=1)  # feasible inside the box
        r = elastic_qp(rng.uniform(0.5, 2, n), C, b)
        assert np.all(C @ r.z >= b - 1e-8)
        assert np.all((r.z >= 0) & (r.z <= 1))


@pytest.mark.parametrize("seed", range(20))
def test_matches_reference_solver(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 8, size=2)
    C = rng.random((m, n)) * (rng.random((m, n)) < 0.6)
    b = rng.uniform(0, 1.5, m)
    w = rng.uniform(0.5, 2, n)
    mu = rng.uniform(0.5, 5)
    r = elastic_qp(w, C, b, mu)
    assert objective(w, C, b, mu, r.z) <= reference(w, C, b, mu) + 1e-7


def test_no_rows():
    r = elastic_qp(np.ones(3), np.zeros((0, 3)), np.zeros(0))
    assert np.all(r.z == 0) and r.converged
