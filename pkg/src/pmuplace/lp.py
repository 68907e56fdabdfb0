"""Bounded-variable primal simplex for covering LPs: min c'x s.t. G x >= 1, l <= x <= u.

G is binary.  Fixed variables (l == u) are substituted out and rows already
satisfied by the fixed values are dropped before the simplex runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
NUMERICAL = "numerical"


@dataclass
class LpProblem:
    c: np.ndarray
    G: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
        n = self.c.shape[0]
        if self.G.shape[1] != n:
            raise ValueError(f"G has {self.G.shape[1]} columns, expected {n}")
        if not np.all((self.G == 0) | (self.G == 1)):
            raise ValueError("G must be binary")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.ones(n) if self.upper is None else np.asarray(self.upper, dtype=float)
        if np.any(self.lower < 0) or np.any(self.upper > 1) or np.any(self.lower > self.upper):
            raise ValueError("bounds must satisfy 0 <= lower <= upper <= 1")

    @property
    def n(self):
        return self.c.shape[0]

    def with_fixings(self, fixings: dict[int, int]) -> "LpProblem":
        lo, up = self.lower.copy(), self.upper.copy()
        for j, v in fixings.items():
            lo[j] = up[j] = float(v)
        return LpProblem(self.c, self.G, lo, up)


@dataclass
class LpSolution:
    status: str
    objective: float = np.nan
    x: np.ndarray | None = None
    iterations: int = 0
    info: dict = field(default_factory=dict)


def solve_lp(p: LpProblem, max_iter: int | None = None) -> LpSolution:
    n = p.n
    free = np.flatnonzero(p.upper > p.lower)
    x = p.lower.copy()
    r = 1.0 - p.G @ x
    rows = np.flatnonzero(r > TOL)
    if rows.size == 0:
        return _finish(p, x, 0)
    Gs = p.G[np.ix_(rows, free)]
    rs = r[rows]
    ub = p.upper[free] - p.lower[free]
    if np.any(Gs.sum(axis=1) == 0):
        return LpSolution(INFEASIBLE, info={"reason": "row without free support"})

    simplex = _Simplex(Gs, rs, ub, p.c[free], max_iter)
    try:
        status = simplex.run()
    except (FloatingPointError, np.linalg.LinAlgError):
        status = NUMERICAL
    if status != OPTIMAL:
        return LpSolution(status, iterations=simplex.iters)
    try:
        x[free] += simplex.structural()
    except np.linalg.LinAlgError:
        return LpSolution(NUMERICAL, iterations=simplex.iters)
    return _finish(p, x, simplex.iters)


def _finish(p, x, iters):
    x = np.clip(x, p.lower, p.upper)
    if np.any(p.G @ x < 1 - 1e-9 * max(1, p.n)):
        return LpSolution(NUMERICAL, iterations=iters, info={"reason": "post-check failed"})
    return LpSolution(OPTIMAL, float(p.c @ x), x, iters)


class _Simplex:
    """Dense tableau over columns [y (n) | surplus (m) | artificial (m)].

    Row i reads G_i y - s_i + a_i = r_i; y in [0, ub], s, a >= 0.
    """

    def __init__(self, G, r, ub, c, max_iter):
        m, n = G.shape
        self.m, self.n = m, n
        self.M = np.hstack([G, -np.eye(m), np.eye(m)])
        self.r = r
        self.ub = np.concatenate([ub, np.full(2 * m, np.inf)])
        self.c = np.concatenate([c, np.zeros(2 * m)])
        self.max_iter = max_iter or 50 * (m + n + 10)
        self.iters = 0
        self.degenerate = 0
        self.bland_after = 5 * n

        # start with every structural variable at its upper bound
        self.at_upper = np.zeros(n + 2 * m, dtype=bool)
        self.at_upper[:n] = True
        resid = r - G @ ub
        self.head = np.where(resid <= 0, n + np.arange(m), n + m + np.arange(m))
        self.art_cols = np.arange(n + m, n + 2 * m)
        B = self.M[:, self.head]
        self.T = np.linalg.solve(B, self.M)
        self.beta = np.abs(resid)

    def run(self):
        m, n = self.m, self.n
        phase1 = np.zeros_like(self.c)
        phase1[self.art_cols] = 1.0
        status = self._optimize(phase1)
        if status != OPTIMAL:
            return status
        infeas = self.beta[self.head >= n + m].sum()
        if infeas > TOL * max(1.0, np.abs(self.r).sum()):
            return INFEASIBLE
        # artificials are pinned to zero for phase 2
        self.ub[self.art_cols] = 0.0
        self.at_upper[self.art_cols] = False
        return self._optimize(self.c)

    def _optimize(self, cost):
        bland = self.degenerate >= self.bland_after
        while True:
            if self.iters >= self.max_iter:
                return NUMERICAL
            basic = np.zeros(len(cost), dtype=bool)
            basic[self.head] = True
            d = cost - cost[self.head] @ self.T
            movable = ~basic & (self.ub > 0)
            up = movable & ~self.at_upper & (d < -TOL)
            down = movable & self.at_upper & (d > TOL)
            cand = np.flatnonzero(up | down)
            if cand.size == 0:
                return OPTIMAL
            j = cand[0] if bland else cand[np.argmax(np.abs(d[cand]))]
            sgn = 1.0 if up[j] else -1.0

            alpha = sgn * self.T[:, j]
            lim = np.full(self.m, np.inf)
            dec = alpha > TOL
            lim[dec] = self.beta[dec] / alpha[dec]
            hub = self.ub[self.head]
            inc = (alpha < -TOL) & np.isfinite(hub)
            lim[inc] = (hub[inc] - self.beta[inc]) / -alpha[inc]
            lim = np.maximum(lim, 0.0)
            step = lim.min() if self.m else np.inf
            if self.ub[j] <= step:
                # bound flip, no basis change
                step = self.ub[j]
                self.beta -= step * alpha
                self.at_upper[j] = not self.at_upper[j]
                self.iters += 1
                continue
            if not np.isfinite(step):
                return NUMERICAL  # unbounded cannot happen with finite structural bounds
            ties = np.flatnonzero(lim <= step + TOL)
            row = ties[np.argmin(self.head[ties])] if bland else ties[np.argmax(np.abs(alpha[ties]))]
            if step <= TOL:
                self.degenerate += 1
                if self.degenerate >= self.bland_after:
                    bland = True
            self._pivot(row, j, sgn, step, alpha)
            self.iters += 1

    def _pivot(self, row, j, sgn, step, alpha):
        leaving = self.head[row]
        entering_val = (self.ub[j] if self.at_upper[j] else 0.0) + sgn * step
        self.beta -= step * alpha
        self.at_upper[leaving] = alpha[row] < 0
        self.at_upper[j] = False
        T = self.T
        piv = T[row, j]
        if abs(piv) < TOL:
            raise FloatingPointError("pivot breakdown")
        T[row] /= piv
        col = T[:, j].copy()
        col[row] = 0.0
        T -= np.outer(col, T[row])
        self.head[row] = j
        self.beta[row] = entering_val

    def structural(self):
        """Recompute basic values from the original columns and return y."""
        n, m = self.n, self.m
        vals = np.where(self.at_upper, self.ub, 0.0)
        vals[~np.isfinite(vals)] = 0.0
        vals[self.head] = 0.0
        rhs = self.r - self.M @ vals
        vals[self.head] = np.linalg.solve(self.M[:, self.head], rhs)
        return np.clip(vals[:n], 0.0, self.ub[:n])
