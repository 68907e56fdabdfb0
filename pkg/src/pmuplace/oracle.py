"""Exhaustive minimum dominating set enumeration for small networks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import Network, build_connectivity

DEFAULT_N_CAP = 30


class OracleCapExceeded(ValueError):
    pass


@dataclass
class OracleResult:
    size: int
    placements: list[tuple[int, ...]]  # 0-based supports, sorted
    nodes: int

    def vectors(self, n: int) -> list[np.ndarray]:
        out = []
        for s in self.placements:
            x = np.zeros(n, dtype=np.int64)
            x[list(s)] = 1
            out.append(x)
        return out


def min_dominating_set_exact(net, size_cap: int | None = None, n_cap: int = DEFAULT_N_CAP) -> OracleResult:
    """All minimum dominating sets, by iterative deepening over the set size.

    At each node the uncovered bus with the smallest closed neighbourhood is
    chosen; one of its neighbourhood members must join the set.  Members are
    tried in ascending order and earlier siblings are forbidden in later
    branches, so each set is produced exactly once.
    """
    A = build_connectivity(net) if isinstance(net, Network) else np.asarray(net)
    n = A.shape[0]
    if n > n_cap:
        raise OracleCapExceeded(f"n={n} exceeds oracle cap {n_cap}")
    size_cap = n if size_cap is None else size_cap
    nbhd = [np.flatnonzero(A[i]).tolist() for i in range(n)]
    masks = [sum(1 << j for j in nbhd[i]) for i in range(n)]  # bus j observes these
    full = (1 << n) - 1
    nodes = 0

    def search(k, covered, chosen, forbidden, found):
        nonlocal nodes
        nodes += 1
        if covered == full:
            found.append(tuple(sorted(chosen)))
            return
        if k == 0:
            return
        # uncovered bus with the fewest still-allowed candidates
        best = None
        for i in range(n):
            if not covered >> i & 1:
                cands = [j for j in nbhd[i] if not forbidden >> j & 1]
                if best is None or len(cands) < len(best):
                    best = cands
                    if len(cands) <= 1:
                        break
        banned = forbidden
        for j in best:
            search(k - 1, covered | masks[j], chosen + [j], banned, found)
            banned |= 1 << j

    for k in range(1, min(size_cap, n) + 1):
        found: list[tuple[int, ...]] = []
        search(k, 0, [], 0, found)
        if found:
            return OracleResult(k, sorted(set(found)), nodes)
    return OracleResult(-1, [], nodes)
