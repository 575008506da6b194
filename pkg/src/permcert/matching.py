"""Maximum bipartite matching with Hall deficiency certificates.

Vertices are 0-based. Neighbors are explored in increasing index order so
every result is deterministic for a given graph.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import InputError, NotMaximumError, TooLargeError

_INF = float("inf")


@dataclass(frozen=True)
class BipartiteGraph:
    left_size: int
    right_size: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.left_size:
            raise InputError("adjacency must list every left vertex")
        for nbrs in self.adjacency:
            if list(nbrs) != sorted(set(nbrs)):
                raise InputError(f"neighbors {nbrs} must be sorted and distinct")
            if nbrs and not (0 <= nbrs[0] and nbrs[-1] < self.right_size):
                raise InputError(f"neighbor index out of range in {nbrs}")

    @classmethod
    def from_edges(cls, left_size: int, right_size: int, edges: Iterable[tuple[int, int]]):
        adj: list[set[int]] = [set() for _ in range(left_size)]
        for u, v in edges:
            adj[u].add(v)
        return cls(left_size, right_size, tuple(tuple(sorted(s)) for s in adj))

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def neighborhood(self, left: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for u in left:
            out.update(self.adjacency[u])
        return frozenset(out)


@dataclass(frozen=True)
class Matching:
    pairs: dict[int, int]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def is_perfect_on_left(self, g: BipartiteGraph) -> bool:
        return self.size == g.left_size

    def check(self, g: BipartiteGraph) -> None:
        """Raise if the matching is not injective or uses a non-edge."""
        if len(set(self.pairs.values())) != len(self.pairs):
            raise InputError("matching is not injective on the right")
        for u, v in self.pairs.items():
            if not (0 <= u < g.left_size) or not g.has_edge(u, v):
                raise InputError(f"pair ({u}, {v}) is not an edge")


def max_matching(g: BipartiteGraph) -> Matching:
    """Hopcroft-Karp: BFS layering from free left vertices, then DFS augmentation."""
    adj = g.adjacency
    L = g.left_size
    pair_l = [-1] * L
    pair_r = [-1] * g.right_size

    # greedy warm start, same sorted order as the augmenting phase
    for u in range(L):
        for v in adj[u]:
            if pair_r[v] == -1:
                pair_l[u] = v
                pair_r[v] = u
                break

    while True:
        dist = [_INF] * L
        queue = deque()
        for u in range(L):
            if pair_l[u] == -1:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = pair_r[v]
                if w == -1:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            break

        ptr = [0] * L
        augmented = False
        for root in range(L):
            if pair_l[root] != -1:
                continue
            stack = [root]
            via: list[int] = []
            while stack:
                u = stack[-1]
                nbrs = adj[u]
                pushed = False
                while ptr[u] < len(nbrs):
                    v = nbrs[ptr[u]]
                    ptr[u] += 1
                    w = pair_r[v]
                    if w == -1:
                        via.append(v)
                        for uu, vv in zip(stack, via):
                            pair_l[uu] = vv
                            pair_r[vv] = uu
                        augmented = True
                        stack = []
                        pushed = True
                        break
                    if dist[w] == dist[u] + 1:
                        via.append(v)
                        stack.append(w)
                        pushed = True
                        break
                if not pushed:
                    dist[u] = _INF
                    stack.pop()
                    if via:
                        via.pop()
        if not augmented:
            break

    return Matching({u: v for u, v in enumerate(pair_l) if v != -1})


def hall_violator(g: BipartiteGraph, m: Matching) -> frozenset[int] | None:
    """Left set S with |N(S)| < |S|, or None when m saturates the left side.

    S is every left vertex reachable by an alternating path from an unmatched
    left vertex. If such a path ends at a free right vertex, m was not maximum.
    """
    m.check(g)
    if m.size == g.left_size:
        return None
    pair_r = {v: u for u, v in m.pairs.items()}
    seen_left = {u for u in range(g.left_size) if u not in m.pairs}
    queue = deque(sorted(seen_left))
    seen_right: set[int] = set()
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v in seen_right:
                continue
            seen_right.add(v)
            w = pair_r.get(v)
            if w is None:
                raise NotMaximumError(f"augmenting path reaches free right vertex {v}")
            if w not in seen_left:
                seen_left.add(w)
                queue.append(w)
    return frozenset(seen_left)


def brute_force_max_matching(g: BipartiteGraph, limit: int = 10) -> int:
    """Exact maximum matching size by exhaustive assignment search (testing oracle)."""
    if g.left_size > limit:
        raise TooLargeError(f"brute force limited to {limit} left vertices")
    adj = g.adjacency

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> int:
        if i == g.left_size:
            return 0
        result = best(i + 1, used)  # leave i unmatched
        for v in adj[i]:
            if not used >> v & 1:
                result = max(result, 1 + best(i + 1, used | 1 << v))
        return result

    return best(0, 0)


def complete_graph(left: int, right: int) -> BipartiteGraph:
    return BipartiteGraph(left, right, tuple(tuple(range(right)) for _ in range(left)))


def graph_from_lists(right_size: int, adjacency: Sequence[Sequence[int]]) -> BipartiteGraph:
    return BipartiteGraph(
        len(adjacency), right_size, tuple(tuple(sorted(set(a))) for a in adjacency)
    )
