"""Solver outcome record shared by the integer and continuous solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# bip statuses
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration-limit"
# nlp statuses
CONVERGED = "converged"
NON_BINARY = "non-binary"
FAILED = "failed"

SUCCESS = (OPTIMAL, CONVERGED)


@dataclass
class SolveReport:
    method: str  # "bip" or "nlp"
    placement: np.ndarray | None  # binary int vector, internal bus order
    objective: float
    status: str
    iterations: int
    residuals: dict = field(default_factory=dict)
    x: np.ndarray | None = None  # continuous point (nlp only)
    trace: list = field(default_factory=list)
    start_index: int | None = None

    @property
    def ok(self) -> bool:
        return self.status in SUCCESS

    @property
    def count(self) -> int:
        return 0 if self.placement is None else int(self.placement.sum())

    def support(self) -> tuple[int, ...]:
        """Internal indices of buses carrying a PMU."""
        return tuple(int(i) for i in np.flatnonzero(self.placement))
