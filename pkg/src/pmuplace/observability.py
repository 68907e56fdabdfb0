"""Observability checks, the product-form constraints and the SORI index."""
from __future__ import annotations

import numpy as np

from .topology import Network, build_connectivity


def _matrix(A_or_net) -> np.ndarray:
    if isinstance(A_or_net, Network):
        return build_connectivity(A_or_net)
    return np.asarray(A_or_net)


def _check_dims(A: np.ndarray, x: np.ndarray):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"connectivity matrix must be square, got {A.shape}")
    if x.shape != (A.shape[0],):
        raise ValueError(f"placement has shape {x.shape}, expected ({A.shape[0]},)")


def coverage(A, x) -> np.ndarray:
    """A @ x: number of PMUs observing each bus."""
    A = _matrix(A)
    x = np.asarray(x)
    _check_dims(A, x)
    return A @ x


def is_observable(A, x) -> bool:
    return bool(np.all(coverage(A, x) >= 1))


def unobserved(A, x) -> np.ndarray:
    """Indices of buses with zero coverage."""
    return np.flatnonzero(coverage(A, x) < 1)


def sori(A, x) -> int:
    """System observability redundancy index, 1' A x."""
    x = np.asarray(x)
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("SORI needs a binary placement")
    return int(coverage(A, x.astype(np.int64)).sum())


class ProductConstraints:
    """f_i(x) = prod over the closed neighborhood of bus i of (1 - x_j).

    Neighborhoods are stored as a padded index array; the pad column points at
    an extra slot whose factor is always 1.
    """

    def __init__(self, A_or_net):
        A = _matrix(A_or_net)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"connectivity matrix must be square, got {A.shape}")
        self.A = A
        self.n = n = A.shape[0]
        nbhd = [np.flatnonzero(A[i]) for i in range(n)]
        width = max(len(s) for s in nbhd)
        self.idx = np.full((n, width), n, dtype=np.int64)
        for i, s in enumerate(nbhd):
            self.idx[i, : len(s)] = s

    def _factors(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        return np.append(1.0 - x, 1.0)[self.idx]

    def values(self, x) -> np.ndarray:
        return self._factors(x).prod(axis=1)

    def values_jacobian(self, x):
        """Return (f, G) with G[i, j] = df_i/dx_j."""
        Y = self._factors(x)
        n, width = Y.shape
        ones = np.ones((n, 1))
        prefix = np.cumprod(np.hstack([ones, Y[:, :-1]]), axis=1)
        suffix = np.cumprod(np.hstack([ones, Y[:, :0:-1]]), axis=1)[:, ::-1]
        G = np.zeros((n, n + 1))
        rows = np.repeat(np.arange(n), width)
        # pad entries land in the dropped last column
        G[rows, self.idx.ravel()] = -(prefix * suffix).ravel()
        return Y.prod(axis=1), G[:, :n]

    def jacobian(self, x) -> np.ndarray:
        return self.values_jacobian(x)[1]


def constraint_values(net, x) -> np.ndarray:
    return ProductConstraints(net).values(x)


def constraint_jacobian(net, x) -> np.ndarray:
    return ProductConstraints(net).jacobian(x)
