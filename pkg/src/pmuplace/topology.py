"""Network topology: edge-list parsing, bus renumbering and the connectivity matrix.

Network files are plain UTF-8 text::

    # comment
    n m            # bus count, branch-line count
    bus 1 2 5 ...  # optional: explicit bus labels (exactly n in total)
    u v            # m branch lines, original bus labels

Without ``bus`` lines the declared buses are ``1..n``.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DATA_ENV = "PMUPLACE_DATA"
FIXTURES = ("ieee14", "ieee30", "ieee57", "ieee118", "ieee300")


class NetworkParseError(ValueError):
    """Raised for malformed network files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Network:
    """Bus/branch topology.

    Buses are addressed internally by 0-based index ``0..n-1``; ``labels[i]`` is
    the identifier bus ``i`` carries in the source file.  ``branches`` holds
    unique unordered pairs ``(i, j)`` with ``i < j``.  ``n_lines`` is the number
    of branch lines read, parallel circuits included.
    """

    n: int
    branches: tuple[tuple[int, int], ...]
    labels: tuple[int, ...]
    n_lines: int = -1
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("network must have at least one bus")
        if len(self.labels) != self.n or len(set(self.labels)) != self.n:
            raise ValueError("labels must be n distinct bus identifiers")
        for i, j in self.branches:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"branch ({i}, {j}) out of range")
            if i >= j:
                raise ValueError(f"branch ({i}, {j}) must satisfy i < j")
        if len(set(self.branches)) != len(self.branches):
            raise ValueError("duplicate branches")
        if self.n_lines < 0:
            object.__setattr__(self, "n_lines", len(self.branches))

    @classmethod
    def from_edges(cls, n, edges, labels=None, name=""):
        """Build from 0-based edge pairs, collapsing duplicates and orientation."""
        pairs = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at bus {u}")
            pairs.append((min(u, v), max(u, v)))
        uniq = tuple(sorted(set(pairs)))
        labels = tuple(range(1, n + 1)) if labels is None else tuple(int(l) for l in labels)
        return cls(n, uniq, labels, n_lines=len(pairs), name=name)

    def neighbors(self) -> list[list[int]]:
        """Adjacency lists, a(i) for every bus, ascending."""
        adj = [[] for _ in range(self.n)]
        for i, j in self.branches:
            adj[i].append(j)
            adj[j].append(i)
        return [sorted(a) for a in adj]

    def closed_neighborhoods(self) -> list[list[int]]:
        """{i} plus a(i) for every bus, ascending."""
        return [sorted([i, *a]) for i, a in enumerate(self.neighbors())]

    def index_of(self, label: int) -> int:
        try:
            return self.labels.index(int(label))
        except ValueError:
            raise KeyError(f"no bus labelled {label}") from None

    def placement(self, labels) -> np.ndarray:
        """Binary placement vector with PMUs at the given original bus labels."""
        x = np.zeros(self.n, dtype=np.int64)
        for lab in labels:
            x[self.index_of(lab)] = 1
        return x

    def placement_labels(self, x) -> list[int]:
        """Original labels of buses carrying a PMU, ascending."""
        return sorted(self.labels[i] for i in np.flatnonzero(np.asarray(x) > 0.5))

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        adj = self.neighbors()
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n


def parse_network(text: str, name: str = "") -> Network:
    """Parse the edge-list format described in the module docstring."""
    header = None
    declared: list[int] = []
    declared_at: dict[int, int] = {}
    raw_edges: list[tuple[int, int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise NetworkParseError("expected header 'n m'", lineno)
            n, m = _ints(fields, lineno)
            if n < 1:
                raise NetworkParseError("empty system (n must be positive)", lineno)
            if m < 0:
                raise NetworkParseError("negative branch count", lineno)
            header = (n, m)
            continue
        if fields[0] == "bus":
            for lab in _ints(fields[1:], lineno):
                if lab in declared_at:
                    raise NetworkParseError(f"bus {lab} declared twice", lineno)
                declared_at[lab] = lineno
                declared.append(lab)
            continue
        if len(fields) != 2:
            raise NetworkParseError("expected branch line 'u v'", lineno)
        u, v = _ints(fields, lineno)
        if u == v:
            raise NetworkParseError(f"self-loop at bus {u}", lineno)
        raw_edges.append((u, v, lineno))

    if header is None:
        raise NetworkParseError("empty system (no header line)")
    n, m = header
    if len(raw_edges) != m:
        raise NetworkParseError(f"header declares {m} branches, found {len(raw_edges)}")
    if declared:
        if len(declared) != n:
            raise NetworkParseError(f"header declares {n} buses, bus lines list {len(declared)}")
        labels = declared
    else:
        labels = list(range(1, n + 1))
    index = {lab: i for i, lab in enumerate(labels)}

    edges = []
    for u, v, lineno in raw_edges:
        for lab in (u, v):
            if lab not in index:
                raise NetworkParseError(f"branch references undeclared bus {lab}", lineno)
        edges.append((index[u], index[v]))
    net = Network.from_edges(n, edges, labels, name=name)
    if not net.is_connected():
        warnings.warn(f"network {name or '<text>'} is not connected", stacklevel=2)
    return net


def _ints(fields, lineno):
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise NetworkParseError(f"non-integer field in {' '.join(fields)!r}", lineno) from None


def renumber(net: Network) -> Network:
    """Reindex buses densely in ascending order of their original labels."""
    order = sorted(range(net.n), key=lambda i: net.labels[i])
    new_index = {old: new for new, old in enumerate(order)}
    edges = [(new_index[i], new_index[j]) for i, j in net.branches]
    out = Network.from_edges(net.n, edges, [net.labels[i] for i in order], name=net.name)
    return Network(out.n, out.branches, out.labels, n_lines=net.n_lines, name=net.name)


def renumber_permutation(net: Network) -> np.ndarray:
    """perm[new] = old index, for the reordering applied by :func:`renumber`."""
    return np.array(sorted(range(net.n), key=lambda i: net.labels[i]), dtype=np.int64)


def build_connectivity(net: Network) -> np.ndarray:
    """Binary n-by-n matrix: 1 on the diagonal and wherever two buses share a branch."""
    A = np.eye(net.n, dtype=np.int64)
    if net.branches:
        ij = np.array(net.branches)
        A[ij[:, 0], ij[:, 1]] = 1
        A[ij[:, 1], ij[:, 0]] = 1
    return A


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    return Path(env) if env else Path(__file__).with_name("data")


def resolve(source: str) -> Path:
    """Map a bundled fixture name (``ieee14``...) or a path to a file path."""
    p = Path(source)
    if p.exists():
        return p
    candidate = data_dir() / f"{source}.txt"
    if candidate.exists():
        return candidate
    raise FileNotFoundError(f"no network file or bundled system named {source!r}")


def load_network(source: str, renumbered: bool = True) -> Network:
    path = resolve(source)
    net = parse_network(path.read_text(encoding="utf-8"), name=path.stem)
    return renumber(net) if renumbered else net
