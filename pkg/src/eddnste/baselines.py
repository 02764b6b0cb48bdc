"""Reference strategies: greedy connectivity and random transit selection.

Both grow a cloud-rooted forest one transit server at a time.  A new
transit server ``t`` feeds each destination it covers along the BFS path
from ``t``; a server already in the forest keeps its current parent unless
the new path reaches it at a smaller depth, in which case it is re-hung.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .graph import (
    CLOUD,
    EddInstance,
    EddSolution,
    all_pairs_bfs,
    prune_parents,
    shortest_path,
    solution_from_parents,
)


class _Forest:
    def __init__(self, instance: EddInstance, apsp: tuple[np.ndarray, np.ndarray]):
        self.instance = instance
        self.dist, self.pred = apsp
        self.parent: dict[int, int] = {}
        self.children: dict[int, set[int]] = {CLOUD: set()}
        self.depth: dict[int, int] = {CLOUD: 0}

    def _hang(self, v: int, p: int) -> None:
        old = self.parent.get(v)
        if old is not None:
            self.children[old].discard(v)
        self.parent[v] = p
        self.children.setdefault(p, set()).add(v)
        self.children.setdefault(v, set())
        # Re-derive depths below v.
        self.depth[v] = self.depth[p] + 1
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for c in self.children[x]:
                self.depth[c] = self.depth[x] + 1
                queue.append(c)

    def covered_by(self, t: int, unserved: set[int]) -> list[int]:
        row = self.dist[t]
        return sorted(r for r in unserved if row[r] <= self.instance.d_limit)

    def add_transit(self, t: int, targets: list[int]) -> None:
        self._hang(t, CLOUD)
        for r in targets:
            path = shortest_path(self.pred, t, r)
            for prev, x in zip(path, path[1:]):
                if x not in self.parent or self.depth[x] > self.depth[prev] + 1:
                    self._hang(x, prev)

    def served(self) -> set[int]:
        return {v for v in self.parent if v in self.instance.destinations}

    def solution(self) -> EddSolution:
        kept = prune_parents(self.parent, self.instance.destinations)
        return solution_from_parents(self.instance, kept)


def greedy_connectivity(
    instance: EddInstance, apsp: tuple[np.ndarray, np.ndarray] | None = None
) -> EddSolution:
    """Repeatedly promote the server reaching the most unserved destinations.

    A server's connectivity counts unserved destinations within ``d_limit``
    hops, itself included.  Ties go to the smallest id.
    """
    if apsp is None:
        apsp = all_pairs_bfs(instance.graph)
    forest = _Forest(instance, apsp)
    unserved = set(instance.destinations)
    nodes = list(instance.graph.nodes)
    while unserved:
        best, best_cover = -1, []
        for v in nodes:
            if v in forest.parent and forest.parent[v] == CLOUD:
                continue
            cover = forest.covered_by(v, unserved)
            if len(cover) > len(best_cover):
                best, best_cover = v, cover
        forest.add_transit(best, best_cover)
        unserved -= forest.served()
    return forest.solution()


def random_strategy(
    instance: EddInstance,
    seed: int,
    apsp: tuple[np.ndarray, np.ndarray] | None = None,
) -> EddSolution:
    """Promote servers in a seeded random order until every destination is served.

    Servers that would reach no unserved destination are skipped and never
    charged a cloud transfer.
    """
    if apsp is None:
        apsp = all_pairs_bfs(instance.graph)
    rng = np.random.default_rng(seed)
    forest = _Forest(instance, apsp)
    unserved = set(instance.destinations)
    for v in rng.permutation(np.arange(1, instance.graph.node_count + 1)):
        if not unserved:
            break
        cover = forest.covered_by(int(v), unserved)
        if cover:
            forest.add_transit(int(v), cover)
            unserved -= forest.served()
    return forest.solution()
