"""Weighted undirected graphs, Laplacians and leader-follower screening.

Node indices are 1-based everywhere a user can see them, matching the
usual ``v_1 .. v_n`` labelling; arrays are of course 0-based internally.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidGraph, MismatchedNodeCount

__all__ = [
    "WeightedGraph",
    "leader_set",
    "input_matrix",
    "laplacian",
    "connected_components",
    "is_leader_follower_connected",
    "leaderless_components",
    "union_graph",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on nodes ``1..n`` with positive edge weights.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : sequence of (i, j, w)
        Edges with ``1 <= i < j <= n`` after normalisation. Pairs given as
        ``(j, i)`` are reordered; duplicates and self-loops are rejected.
    """

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidGraph(f"node count must be a positive integer, got {self.n}")
        normalised = []
        seen = set()
        for edge in self.edges:
            if len(edge) == 2:
                i, j = edge
                w = 1.0
            elif len(edge) == 3:
                i, j, w = edge
            else:
                raise InvalidGraph(f"edge {edge!r} must be (i, j) or (i, j, w)")
            if int(i) != i or int(j) != j:
                raise InvalidGraph(f"edge endpoints must be integers: {edge!r}")
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise InvalidGraph(f"self-loop at node {i}")
            if i > j:
                i, j = j, i
            if i < 1 or j > self.n:
                raise InvalidGraph(f"edge ({i}, {j}) out of range 1..{self.n}")
            if not np.isfinite(w) or w <= 0:
                raise InvalidGraph(f"edge ({i}, {j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise InvalidGraph(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            normalised.append((i, j, w))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(sorted(normalised)))

    @classmethod
    def from_adjacency(cls, adj) -> "WeightedGraph":
        adj = np.asarray(adj, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidGraph("adjacency must be square")
        if not np.allclose(adj, adj.T, rtol=0, atol=0):
            raise InvalidGraph("adjacency must be symmetric")
        n = adj.shape[0]
        edges = [(i + 1, j + 1, adj[i, j])
                 for i in range(n) for j in range(i + 1, n) if adj[i, j] != 0]
        return cls(n, tuple(edges))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = w
        return a

    def without_edge(self, i: int, j: int) -> "WeightedGraph":
        key = (min(i, j), max(i, j))
        kept = tuple(e for e in self.edges if (e[0], e[1]) != key)
        if len(kept) == len(self.edges):
            raise InvalidGraph(f"edge {key} not present")
        return WeightedGraph(self.n, kept)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[i, j, w] for i, j, w in self.edges]}


def leader_set(leaders: Iterable[int], n: int) -> tuple:
    """Validate 1-based leader indices and return them as a sorted tuple."""
    idx = [int(k) for k in leaders]
    if not idx:
        raise InvalidGraph("leader set must be non-empty")
    if len(set(idx)) != len(idx):
        raise InvalidGraph(f"duplicate leader indices in {idx}")
    for k in idx:
        if k < 1 or k > n:
            raise InvalidGraph(f"leader {k} out of range 1..{n}")
    return tuple(sorted(idx))


def input_matrix(leaders: Sequence[int], n: int) -> np.ndarray:
    """Columns ``e_k`` for each leader ``k``."""
    leaders = leader_set(leaders, n)
    b = np.zeros((n, len(leaders)))
    for col, k in enumerate(leaders):
        b[k - 1, col] = 1.0
    return b


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Return ``L = D - A`` for the graph ``g``.

    >>> laplacian(WeightedGraph(2, ((1, 2, 1.0),)))
    array([[ 1., -1.],
           [-1.,  1.]])
    """
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def connected_components(g: WeightedGraph) -> list:
    """Node sets (1-based) of the maximal connected subgraphs, by BFS."""
    nbrs = {k: [] for k in range(1, g.n + 1)}
    for i, j, _ in g.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    seen = set()
    comps = []
    for start in range(1, g.n + 1):
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def leaderless_components(g: WeightedGraph, leaders: Iterable[int]) -> list:
    leaders = set(leader_set(leaders, g.n))
    return [c for c in connected_components(g) if not c & leaders]


def is_leader_follower_connected(g: WeightedGraph, leaders: Iterable[int]) -> bool:
    """True iff every connected component of ``g`` holds at least one leader."""
    return not leaderless_components(g, leaders)


def union_graph(gs: Sequence[WeightedGraph]) -> WeightedGraph:
    """Graph whose adjacency is the entrywise sum of the inputs' adjacencies."""
    gs = list(gs)
    if not gs:
        raise InvalidGraph("union of an empty list of graphs")
    n = gs[0].n
    weights: dict = {}
    for g in gs:
        if g.n != n:
            raise MismatchedNodeCount(f"graphs have {n} and {g.n} nodes")
        for i, j, w in g.edges:
            weights[(i, j)] = weights.get((i, j), 0.0) + w
    return WeightedGraph(n, tuple((i, j, w) for (i, j), w in weights.items()))
