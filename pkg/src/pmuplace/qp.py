"""Convex QP subproblem used by the SQP iteration.

    minimize    sum_j w_j z_j^2 + mu * sum_i max(0, b_i - (C z)_i)
    subject to  0 <= z <= 1

with C >= 0 and w > 0.  mu = inf gives the hard-constrained QP C z >= b.
The problem is solved through its dual, a box-constrained concave maximisation
over lambda in [0, mu]^m, by projected Newton with an Armijo search along the
projection arc.  The primal point is z = min(C'lambda / 2w, 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve


@dataclass
class QpResult:
    z: np.ndarray
    lam: np.ndarray
    iterations: int
    converged: bool
    violation: float  # sum of max(0, b - C z)


def _primal(w, C, lam):
    t = C.T @ lam
    return np.minimum(t / (2 * w), 1.0), t


def _neg_dual(w, C, b, lam):
    z, t = _primal(w, C, lam)
    psi = np.where(t <= 2 * w, -t * t / (4 * w), w - t)
    return -(b @ lam + psi.sum()), C @ z - b, z, t


def elastic_qp(w, C, b, mu=np.inf, tol=1e-10, max_iter=200) -> QpResult:
    w = np.asarray(w, dtype=float)
    C = np.asarray(C, dtype=float)
    b = np.asarray(b, dtype=float)
    m = C.shape[0]
    lam = np.zeros(m)
    val, grad, z, t = _neg_dual(w, C, b, lam)
    scale = max(1.0, np.abs(b).max(initial=0.0))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        pg = np.where(lam <= 0, np.minimum(grad, 0),
                      np.where(lam >= mu, np.maximum(grad, 0), grad))
        if m == 0 or np.abs(pg).max() <= tol * scale:
            converged = True
            break
        eps = min(1e-8, np.abs(pg).max())
        act = ((lam <= eps) & (grad > 0)) | ((lam >= mu - eps) & (grad < 0))
        fr = ~act
        F = t < 2 * w  # coordinates below their upper bound
        p = -grad.copy()
        if fr.any():
            Cf = C[np.ix_(fr, F)]
            H = (Cf / (2 * w[F])) @ Cf.T
            H[np.diag_indices_from(H)] += 1e-12 * (1 + H.diagonal().max(initial=0.0))
            gf = grad[fr]
            try:
                pf = -cho_solve(cho_factor(H), gf)
            except LinAlgError:
                pf = -np.linalg.lstsq(H, gf, rcond=None)[0]
            p[fr] = pf if gf @ pf < 0 else -gf
        a = 1.0
        while True:
            trial = np.clip(lam + a * p, 0, mu)
            v2, g2, z2, t2 = _neg_dual(w, C, b, trial)
            if v2 <= val + 1e-4 * (grad @ (trial - lam)) or a < 1e-14:
                break
            a *= 0.5
        if np.array_equal(trial, lam):
            converged = True
            break
        lam, val, grad, z, t = trial, v2, g2, z2, t2
    viol = float(np.maximum(b - C @ z, 0).sum())
    return QpResult(z, lam, it, converged, viol)
