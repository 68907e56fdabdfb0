"""Exact binary placement model, min w'x s.t. A x >= 1, x binary, by branch-and-bound
on LP relaxations."""
from __future__ import annotations

import heapq
import itertools
import math
from fractions import Fraction

import numpy as np

from .lp import INFEASIBLE as LP_INFEASIBLE
from .lp import OPTIMAL as LP_OPTIMAL
from .lp import LpProblem, solve_lp
from .observability import is_observable
from .report import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, SolveReport

INT_TOL = 1e-9


def _weights(w, n):
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    if w.shape != (n,) or np.any(w <= 0):
        raise ValueError("weights must be a positive vector of length n")
    return w


def greedy_cover(A, w=None) -> np.ndarray:
    """Pick the bus covering the most unobserved buses per unit weight until all
    buses are observed; ties go to the lowest index."""
    A = np.asarray(A)
    n = A.shape[0]
    w = _weights(w, n)
    x = np.zeros(n, dtype=np.int64)
    uncovered = np.ones(n, dtype=bool)
    while uncovered.any():
        gain = (A[:, uncovered].sum(axis=1)) / w
        gain[x == 1] = -1
        j = int(np.argmax(gain))  # argmax returns the first maximum
        x[j] = 1
        uncovered &= A[j] == 0
    return x


def weight_unit(w) -> float | None:
    """Largest g with every w_i an integer multiple of g, if the weights are
    (near) rational; None otherwise.  Objective values are then multiples of g,
    so LP bounds can be rounded up to the next multiple."""
    fr = [Fraction(float(v)).limit_denominator(10**6) for v in w]
    g = fr[0]
    for f in fr[1:]:
        g = Fraction(math.gcd(g.numerator * f.denominator, f.numerator * g.denominator),
                     g.denominator * f.denominator)
    g = float(g)
    if g <= 0 or np.abs(w / g - np.round(w / g)).max() > 1e-9:
        return None
    return g


def dedup_rows(A) -> np.ndarray:
    """Unique constraint rows in first-occurrence order."""
    _, first = np.unique(np.asarray(A), axis=0, return_index=True)
    return np.asarray(A)[np.sort(first)]


def solve_bip(A, w=None, node_limit: int = 100_000) -> SolveReport:
    A = np.asarray(A)
    n = A.shape[0]
    w = _weights(w, n)
    # search on normalised weights so that rescaling w cannot change the path
    unit = weight_unit(w)
    ws = np.round(w / unit) if unit else w / w.max()
    G = dedup_rows(A)
    base = LpProblem(ws, G)

    def key(value):
        return math.ceil(value - 1e-9) if unit else value

    def prunable(value, best):
        return key(value) >= best - 1e-9 * max(1.0, best)

    incumbent = greedy_cover(A, ws)
    best = float(ws @ incumbent)
    counter = itertools.count()
    heap = []
    nodes = 0
    lp_iters = 0

    def open_node(fixings, depth):
        nonlocal lp_iters, nodes
        sol = solve_lp(base.with_fixings(fixings))
        nodes += 1
        lp_iters += sol.iterations
        if sol.status == LP_INFEASIBLE:
            return None
        if sol.status != LP_OPTIMAL:
            raise RuntimeError(f"LP relaxation failed: {sol.status}")
        return sol

    def consider(sol, fixings, depth):
        nonlocal incumbent, best
        frac = np.abs(sol.x - np.round(sol.x))
        if frac.max() <= INT_TOL:
            cand = np.round(sol.x).astype(np.int64)
            val = float(ws @ cand)
            if val < best - 1e-9:
                incumbent, best = cand, val
            return
        if not prunable(sol.objective, best):
            heapq.heappush(heap, (key(sol.objective), -depth, next(counter), sol.objective, fixings, sol.x))

    root = open_node({}, 0)
    if root is None:
        return SolveReport("bip", None, np.inf, INFEASIBLE, nodes)
    consider(root, {}, 0)

    status = OPTIMAL
    while heap:
        bkey, negdepth, _, bound, fixings, x = heapq.heappop(heap)
        if prunable(bound, best):
            continue
        if nodes >= node_limit:
            heapq.heappush(heap, (bkey, negdepth, -1, bound, fixings, x))
            status = ITERATION_LIMIT
            break
        frac = np.abs(x - np.round(x))
        dist = np.abs(x - 0.5)
        dist[frac <= INT_TOL] = np.inf
        j = int(np.argmin(dist))
        for v in (1, 0):
            child = {**fixings, j: v}
            sol = open_node(child, -negdepth + 1)
            if sol is not None:
                consider(sol, child, -negdepth + 1)

    open_bounds = [h[3] for h in heap if not prunable(h[3], best)]
    lower = min(open_bounds) if open_bounds else best
    if unit:
        lower = min(key(lower), best)
    scale = unit if unit else w.max()
    if status == OPTIMAL:
        assert is_observable(A, incumbent)
    return SolveReport("bip", incumbent, float(w @ incumbent), status, nodes,
                       {"gap": float((best - lower) * scale), "lower_bound": float(lower * scale),
                        "root_bound": float(root.objective * scale), "lp_iterations": lp_iters})
