"""Federation network topologies as undirected graphs.

A topology is a symmetric 0/1 adjacency matrix over ``n`` nodes with no
self-loops. Every generator guarantees a connected graph; node identity is
the matrix row index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    Disconnected,
    GenerationFailed,
    InvalidIndex,
    InvalidSize,
    NotSymmetric,
    SelfLoop,
)

MAX_RANDOM_RETRIES = 100


class TopologyKind(str, Enum):
    FULLY_CONNECTED = "fully"
    STAR = "star"
    RING = "ring"
    RANDOM = "random"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Topology:
    """Immutable undirected graph; safe to share across threads."""

    n: int
    adj: np.ndarray
    kind: TopologyKind = TopologyKind.CUSTOM

    def __post_init__(self):
        object.__setattr__(self, "adj", np.asarray(self.adj, dtype=np.int8))
        self.adj.setflags(write=False)

    def neighbors(self, i: int) -> list[int]:
        """Neighbor indices of node ``i`` in ascending order."""
        if not 0 <= i < self.n:
            raise InvalidIndex(f"node index {i} out of range [0, {self.n})")
        return [int(j) for j in np.flatnonzero(self.adj[i])]

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))

    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(self.adj)))]

    def is_connected(self) -> bool:
        return _is_connected(self.adj)

    def diameter(self) -> int:
        """Longest shortest path, by BFS from every node."""
        worst = 0
        for s in range(self.n):
            dist = _bfs_distances(self.adj, s)
            worst = max(worst, int(max(dist)))
        return worst

    def to_text(self) -> str:
        rows = [" ".join(str(int(v)) for v in row) for row in self.adj]
        return "\n".join([str(self.n)] + rows) + "\n"


def _bfs_distances(adj: np.ndarray, start: int) -> list[int]:
    n = adj.shape[0]
    dist = [-1] * n
    dist[start] = 0
    queue = [start]
    while queue:
        u = queue.pop(0)
        for v in np.flatnonzero(adj[u]):
            if dist[v] == -1:
                dist[v] = dist[u] + 1
                queue.append(int(v))
    return dist


def _is_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n == 0:
        return False
    return all(d >= 0 for d in _bfs_distances(adj, 0))


def _validate(adj: np.ndarray) -> None:
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise InvalidSize(f"adjacency matrix must be square, got {adj.shape}")
    if not np.isin(adj, (0, 1)).all():
        raise InvalidSize("adjacency entries must be 0 or 1")
    if not (adj == adj.T).all():
        raise NotSymmetric("adjacency matrix is not symmetric")
    if np.diagonal(adj).any():
        raise SelfLoop("nonzero diagonal: self-loops are not allowed")
    if not _is_connected(adj):
        raise Disconnected("graph is not connected")


def fully_connected(n: int) -> Topology:
    """Complete graph on ``n`` nodes."""
    if n < 1:
        raise InvalidSize(f"fully connected topology needs n >= 1, got {n}")
    adj = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
    return Topology(n, adj, TopologyKind.FULLY_CONNECTED)


def star(n: int, center: int = 0) -> Topology:
    """Star with all ``n - 1`` edges incident to ``center``."""
    if n < 2:
        raise InvalidSize(f"star topology needs n >= 2, got {n}")
    if not 0 <= center < n:
        raise InvalidIndex(f"star center {center} out of range [0, {n})")
    adj = np.zeros((n, n), dtype=np.int8)
    adj[center, :] = 1
    adj[:, center] = 1
    adj[center, center] = 0
    return Topology(n, adj, TopologyKind.STAR)


def ring(n: int) -> Topology:
    """Cycle: node i linked to (i+1) mod n and (i-1) mod n.

    Rejects n < 3 since a 2-ring would duplicate the single edge.
    """
    if n < 3:
        raise InvalidSize(f"ring topology needs n >= 3, got {n}")
    adj = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        adj[i, (i + 1) % n] = 1
        adj[(i + 1) % n, i] = 1
    return Topology(n, adj, TopologyKind.RING)


def random_connected(n: int, p: float, seed: int) -> Topology:
    """Erdos-Renyi G(n, p) sample, resampled until connected.

    Deterministic for a fixed (n, p, seed). Gives up after
    ``MAX_RANDOM_RETRIES`` disconnected draws, which signals that p is
    too small for this n.
    """
    if n < 2:
        raise InvalidSize(f"random topology needs n >= 2, got {n}")
    if not 0.0 < p <= 1.0:
        raise InvalidSize(f"edge probability must be in (0, 1], got {p}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RANDOM_RETRIES):
        draws = rng.random((n, n))
        upper = np.triu(draws < p, k=1)
        adj = (upper | upper.T).astype(np.int8)
        if _is_connected(adj):
            return Topology(n, adj, TopologyKind.RANDOM)
    raise GenerationFailed(
        f"no connected G({n}, {p}) sample in {MAX_RANDOM_RETRIES} tries"
    )


def from_custom(adj) -> Topology:
    """Validate a caller-supplied adjacency matrix."""
    mat = np.asarray(adj)
    _validate(mat)
    return Topology(mat.shape[0], mat.astype(np.int8), TopologyKind.CUSTOM)


def load_topology_file(path) -> Topology:
    """Read the plain-text format: first line n, then n rows of 0/1."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise InvalidSize(f"empty topology file: {path}")
    n = int(lines[0])
    if len(lines) != n + 1:
        raise InvalidSize(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    if any(len(r) != n for r in rows):
        raise InvalidSize("matrix row length does not match n")
    return from_custom(np.array(rows))


def save_topology_file(t: Topology, path) -> None:
    Path(path).write_text(t.to_text())


def neighbors(t: Topology, i: int) -> list[int]:
    return t.neighbors(i)


def make_topology(kind: str, n: int, p: float = 0.5, seed: int = 0,
                  center: int = 0, path: str | None = None) -> Topology:
    """Build a topology from scenario-level parameters."""
    kind = TopologyKind(kind)
    if kind is TopologyKind.FULLY_CONNECTED:
        return fully_connected(n)
    if kind is TopologyKind.STAR:
        return star(n, center)
    if kind is TopologyKind.RING:
        return ring(n)
    if kind is TopologyKind.RANDOM:
        return random_connected(n, p, seed)
    if path is None:
        raise InvalidSize("custom topology requires a file path")
    return load_topology_file(path)
