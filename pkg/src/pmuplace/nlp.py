"""SQP solver for the continuous placement model

    minimize  sum_i w_i x_i^2
    s.t.      f_i(x) = prod_{j in N[i]} (1 - x_j) = 0,   0 <= x <= 1,

plus rounding to a binary placement and multi-start enumeration of optima.

Since f >= 0 on the box, the equalities are linearised one-sidedly,
f + G d <= 0, which is always satisfiable inside the box (x + d = 1 works).
Each subproblem is the elastic QP of :mod:`pmuplace.qp`; steps are accepted
by an Armijo search on the l1 merit J + mu * sum f.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observability import ProductConstraints, is_observable, sori
from .qp import elastic_qp
from .report import CONVERGED, FAILED, ITERATION_LIMIT, NON_BINARY, SolveReport

BINARITY_TOL = 1e-6


@dataclass(frozen=True)
class SqpConfig:
    tol_con: float = 1e-6
    tol_x: float = 1e-6
    tol_fun: float = 1e-6
    max_iter: int = 200
    penalty_init: float = 1.0
    penalty_growth: float = 2.0
    threshold: float = 0.5

    def __post_init__(self):
        if min(self.tol_con, self.tol_x, self.tol_fun) <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if self.max_iter < 1 or self.penalty_init <= 0 or self.penalty_growth <= 1:
            raise ValueError("need max_iter >= 1, penalty_init > 0, penalty_growth > 1")


@dataclass(frozen=True)
class StartStrategy:
    kind: str = "all-ones"  # all-ones | grid-random | uniform-random
    count: int = 1
    seed: int = 0
    grid_step: float = 0.1

    def __post_init__(self):
        if self.kind not in ("all-ones", "grid-random", "uniform-random"):
            raise ValueError(f"unknown start kind {self.kind!r}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        cells = 1.0 / self.grid_step
        if self.grid_step <= 0 or abs(cells - round(cells)) > 1e-9:
            raise ValueError("grid step must divide 1 evenly")

    def points(self, n: int) -> list[np.ndarray]:
        """Start #1 is always all ones; the rest follow `kind`."""
        rng = np.random.default_rng(self.seed)
        cells = round(1.0 / self.grid_step)
        out = [np.ones(n)]
        for _ in range(self.count - 1):
            if self.kind == "all-ones":
                out.append(np.ones(n))
            elif self.kind == "grid-random":
                out.append(rng.integers(0, cells + 1, size=n) / cells)
            else:
                out.append(rng.uniform(size=n))
        return out


def _weights(w, n):
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"weights have shape {w.shape}, expected ({n},)")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    return w


def objective_value_grad(x, w=None):
    x = np.asarray(x, dtype=float)
    w = _weights(w, x.shape[0])
    return float(w @ (x * x)), 2 * w * x


class RestorationNeeded(RuntimeError):
    pass


def _subproblem(pc, x, w, f, G, mu, tol_con):
    C = -G
    zero_row = ~C.any(axis=1)
    if np.any(zero_row & (f > tol_con)):
        raise RestorationNeeded("violated constraint with vanishing gradient")
    keep = ~zero_row
    Ck = C[keep]
    b = f[keep] + Ck @ x
    qp = elastic_qp(w, Ck, b, mu)
    lam = np.zeros(len(f))
    lam[keep] = qp.lam
    # dropped rows linearise to their (tiny) current value
    lin = qp.violation + f[zero_row].sum()
    return qp.z - x, lam, lin


def sqp_subproblem(x, w, net, penalty=None, tol_con=1e-6):
    """SQP step d for the continuous model at x.

    penalty=None solves the hard-constrained QP; a finite penalty gives the
    elastic form used inside :func:`solve_nlp`.
    """
    pc = net if isinstance(net, ProductConstraints) else ProductConstraints(net)
    x = np.asarray(x, dtype=float)
    w = _weights(w, pc.n)
    f, G = pc.values_jacobian(x)
    mu = np.inf if penalty is None else float(penalty)
    return _subproblem(pc, x, w, f, G, mu, tol_con)[0]


def round_to_binary(x, threshold=0.5):
    """Return (placement, residual): entrywise threshold and max distance from {0,1}."""
    x = np.asarray(x, dtype=float)
    placement = (x > threshold).astype(np.int64)
    residual = float(np.minimum(x, 1 - x).max(initial=0.0))
    return placement, max(residual, 0.0)


def _kkt_residual(x, w, G, lam):
    r = 2 * w * x + G.T @ lam
    r = np.where(x <= 0, np.minimum(r, 0), np.where(x >= 1, np.maximum(r, 0), r))
    return float(np.abs(r).max(initial=0.0))


def _restore(pc, x):
    """One Gauss-Newton step on ||f||^2, kept inside the box."""
    f, G = pc.values_jacobian(x)
    H = G.T @ G + 1e-10 * np.eye(len(x))
    step = np.linalg.solve(H, -G.T @ f)
    xn = np.clip(x + step, 0, 1)
    return xn if pc.values(xn) @ pc.values(xn) < f @ f else None


def solve_nlp(net, w=None, x0=None, cfg: SqpConfig = SqpConfig()) -> SolveReport:
    pc = net if isinstance(net, ProductConstraints) else ProductConstraints(net)
    n = pc.n
    w = _weights(w, n)
    x = np.ones(n) if x0 is None else np.clip(np.asarray(x0, dtype=float), 0, 1)
    if x.shape != (n,):
        raise ValueError(f"start has shape {x.shape}, expected ({n},)")

    def merit(y, mu):
        return float(w @ (y * y) + mu * pc.values(y).sum())

    mu = cfg.penalty_init
    restored = False
    status = ITERATION_LIMIT
    trace = []
    kkt = np.inf
    moved = np.inf  # length of the last accepted step
    it = 0
    for it in range(1, cfg.max_iter + 1):
        f, G = pc.values_jacobian(x)
        try:
            d, lam, lin = _subproblem(pc, x, w, f, G, mu, cfg.tol_con)
        except RestorationNeeded:
            d = None
        if d is not None:
            kkt = _kkt_residual(x, w, G, lam)
            step_norm = float(np.abs(d).max(initial=0.0))
            small = step_norm <= cfg.tol_x or moved <= cfg.tol_x or kkt <= cfg.tol_fun
            if f.max() <= cfg.tol_con and small:
                status = CONVERGED
                break
            slope = 2 * (w * x) @ d + mu * (lin - f.sum())
            before = merit(x, mu)
            a = 1.0
            while True:
                after = merit(x + a * d, mu)
                if after <= before + 1e-4 * a * min(slope, 0.0):
                    break
                a *= 0.5
                if a < 1e-12:
                    d = None
                    break
        if d is None:
            if restored:
                status = FAILED
                break
            restored = True
            xr = _restore(pc, x)
            if xr is None:
                status = FAILED
                break
            trace.append({"iter": it, "restoration": True, "mu": mu})
            x = xr
            moved = np.inf
            continue
        x_new = np.clip(x + a * d, 0, 1)
        moved = float(np.abs(x_new - x).max(initial=0.0))
        x = x_new
        trace.append({"iter": it, "step": a, "mu": mu, "merit_before": before,
                      "merit_after": after, "max_f": float(f.max()), "step_norm": step_norm})
        if lam.max(initial=0.0) > mu / 2:
            mu *= cfg.penalty_growth

    placement, binarity = round_to_binary(x, cfg.threshold)
    fx = pc.values(x)
    residuals = {
        "max_f": float(np.abs(fx).max(initial=0.0)),
        "kkt": float(kkt),
        "binarity": binarity,
        "penalty": mu,
    }
    if status == CONVERGED:
        if not is_observable(pc.A, placement):
            status = FAILED
        elif binarity > BINARITY_TOL:
            status = NON_BINARY
    return SolveReport("nlp", placement, float(w @ placement), status, it,
                       residuals, x=x, trace=trace)


def run_starts(net, w=None, strategy: StartStrategy = StartStrategy(),
               cfg: SqpConfig = SqpConfig()) -> list[SolveReport]:
    """solve_nlp from every start, in start order (failures included)."""
    pc = net if isinstance(net, ProductConstraints) else ProductConstraints(net)
    reports = []
    for k, x0 in enumerate(strategy.points(pc.n)):
        rep = solve_nlp(pc, w, x0, cfg)
        rep.start_index = k
        reports.append(rep)
    return reports


def distinct_solutions(reports, A) -> list[SolveReport]:
    """Successful reports deduplicated by placement (first start wins), sorted by
    objective ascending, SORI descending, then placement support."""
    seen = {}
    for rep in reports:
        if rep.ok and rep.support() not in seen:
            seen[rep.support()] = rep
    return sorted(seen.values(),
                  key=lambda r: (r.objective, -sori(A, r.placement), r.support()))


def multistart(net, w=None, strategy: StartStrategy = StartStrategy(),
               cfg: SqpConfig = SqpConfig()) -> list[SolveReport]:
    pc = net if isinstance(net, ProductConstraints) else ProductConstraints(net)
    return distinct_solutions(run_starts(pc, w, strategy, cfg), pc.A)


def rank_by_sori(solutions, A) -> list[SolveReport]:
    """Stable sort by SORI descending, ties by placement support."""
    return sorted(solutions, key=lambda r: (-sori(A, r.placement), r.support()))
