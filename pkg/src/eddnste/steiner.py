"""Network Steiner tree approximation by triple loss contraction.

Starting from the metric closure on the destinations, the heuristic keeps
contracting the 3-destination subset whose centroid connection saves the
most MST weight, then builds the final tree as an MST over the metric
closure of the destinations plus the chosen centroids.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import Edge, Graph, MetricClosure, metric_closure, mst

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Triple:
    members: tuple[int, int, int]
    centroid: int = -1
    d_z: int = -1


@dataclass(frozen=True)
class SaveMatrix:
    """Pairwise MST savings over an ordered terminal list."""

    terminals: tuple[int, ...]
    save: np.ndarray

    def __getitem__(self, pair: tuple[int, int]) -> int:
        u, v = pair
        return int(self.save[self.terminals.index(u), self.terminals.index(v)])


@dataclass(frozen=True)
class SteinerTree:
    """Subtree of the input graph spanning every destination.

    ``steiner_points`` are the contracted-triple centroids kept in the
    metric tree (some may later be pruned away as leaves).
    """

    nodes: frozenset[int]
    edges: tuple[Edge, ...]
    steiner_points: frozenset[int]

    @property
    def cost(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj.values():
            nbrs.sort()
        return adj

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)


def enumerate_triples(destinations: Iterable[int]) -> list[Triple]:
    """All 3-subsets of the destinations, lexicographic in sorted id order."""
    return [Triple(z) for z in itertools.combinations(sorted(set(destinations)), 3)]


def centroid(closure: MetricClosure, z: Sequence[int]) -> tuple[int, int]:
    """Node minimising the summed hop distance to the members of ``z``.

    Every graph node is a candidate, destinations included; ties go to the
    smallest id.
    """
    sums = closure.full_dist[1:, list(z)].sum(axis=1)
    v = int(np.argmin(sums))
    return v + 1, int(sums[v])


def _kruskal_matrix(f: np.ndarray) -> list[tuple[int, int, int]]:
    """MST of a complete graph given as a matrix, as ``(i, j, w)`` index triples."""
    k = f.shape[0]
    iu, ju = np.triu_indices(k, 1)
    w = f[iu, ju]
    order = np.lexsort((ju, iu, w))
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for e in order:
        i, j = int(iu[e]), int(ju[e])
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append((i, j, int(w[e])))
            if len(tree) == k - 1:
                break
    return tree


def find_save(terminals: Sequence[int], tree: Sequence[tuple[int, int, float]]) -> SaveMatrix:
    """Save matrix of a spanning tree over ``terminals``.

    ``tree`` lists ``(u, v, weight)`` edges by node id.  The heaviest edge is
    removed, every pair split by it gets that weight as its save value, and
    both halves are processed the same way.
    """
    terms = tuple(terminals)
    pos = {v: i for i, v in enumerate(terms)}
    save = np.zeros((len(terms), len(terms)), dtype=np.int64)
    stack = [(list(range(len(terms))), [(pos[u], pos[v], w) for u, v, w in tree])]
    while stack:
        part, edges = stack.pop()
        if not edges:
            continue
        heaviest = max(range(len(edges)), key=lambda i: (edges[i][2], -edges[i][0], -edges[i][1]))
        a, b, x = edges[heaviest]
        rest = edges[:heaviest] + edges[heaviest + 1:]
        adj: dict[int, list[int]] = {v: [] for v in part}
        for i, j, _ in rest:
            adj[i].append(j)
            adj[j].append(i)
        side = {a}
        queue = deque([a])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if u not in side:
                    side.add(u)
                    queue.append(u)
        one = sorted(side)
        two = [v for v in part if v not in side]
        save[np.ix_(one, two)] = x
        save[np.ix_(two, one)] = x
        stack.append((one, [e for e in rest if e[0] in side]))
        stack.append((two, [e for e in rest if e[0] not in side]))
    return SaveMatrix(terms, save)


def contract_triple(f: np.ndarray, z: Sequence[int]) -> np.ndarray:
    """Copy of ``f`` with the weights among the three indices in ``z`` zeroed."""
    out = f.copy()
    for i, j in itertools.combinations(z, 2):
        out[i, j] = out[j, i] = 0
    return out


def _expand_tree(graph: Graph, closure: MetricClosure, keep: frozenset[int], metric_edges: Iterable[Edge]) -> tuple[Edge, ...]:
    physical: dict[Edge, int] = {}
    for u, v in metric_edges:
        path = closure.path(u, v)
        for a, b in zip(path, path[1:]):
            physical[(min(a, b), max(a, b))] = 1
    nodes = {x for e in physical for x in e} | set(closure.terminals)
    edges, _ = mst(nodes, physical)
    # Non-destination leaves carry no destination; peel them off.
    adj: dict[int, set[int]] = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    leaves = deque(v for v in sorted(nodes) if len(adj[v]) <= 1 and v not in keep)
    while leaves:
        v = leaves.popleft()
        if v not in adj or v in keep or len(adj[v]) > 1:
            continue
        for u in adj.pop(v):
            adj[u].discard(v)
            if len(adj[u]) <= 1 and u not in keep:
                leaves.append(u)
    return tuple(sorted(e for e in edges if e[0] in adj and e[1] in adj))


def steiner_approx(
    graph: Graph,
    destinations: Iterable[int],
    apsp: tuple[np.ndarray, np.ndarray] | None = None,
) -> SteinerTree:
    """Approximate minimum Steiner tree of ``destinations`` in ``graph``."""
    dests = frozenset(destinations)
    closure = metric_closure(graph, dests, apsp)
    apsp = (closure.full_dist, closure.pred)
    terms = closure.terminals
    if len(terms) == 1:
        return SteinerTree(frozenset(terms), (), frozenset())

    triples = [t.members for t in enumerate_triples(terms)]
    chosen: set[int] = set()
    f = closure.dist.copy()
    if triples:
        pos = {v: i for i, v in enumerate(terms)}
        idx = np.array([[pos[v] for v in z] for z in triples], dtype=np.int64)
        i, j, k = idx[:, 0], idx[:, 1], idx[:, 2]
        to_terms = closure.full_dist[:, list(terms)]
        d_z = np.full(len(triples), np.iinfo(np.int64).max, dtype=np.int64)
        cents = np.zeros(len(triples), dtype=np.int64)
        for v in graph.nodes:
            row = to_terms[v]
            s = row[i] + row[j] + row[k]
            better = s < d_z
            d_z[better] = s[better]
            cents[better] = v
        iteration = 0
        while True:
            tree = _kruskal_matrix(f)
            mst_cost = sum(w for _, _, w in tree)
            save = find_save(range(len(terms)), tree).save
            pairs = np.stack([save[i, j], save[j, k], save[i, k]])
            win = pairs.max(axis=0) + pairs.min(axis=0) - d_z
            best = int(np.argmax(win))
            logger.debug(
                "steiner iteration=%d triple=%s centroid=%d win=%d mst=%d",
                iteration, triples[best], int(cents[best]), int(win[best]), mst_cost,
            )
            if win[best] <= 0:
                break
            f = contract_triple(f, idx[best])
            chosen.add(int(cents[best]))
            iteration += 1

    final = metric_closure(graph, dests | chosen, apsp)
    metric_edges, _ = mst(final.terminals, final.weights())
    edges = _expand_tree(graph, final, dests, metric_edges)
    nodes = frozenset(x for e in edges for x in e) | dests
    return SteinerTree(nodes, edges, frozenset(chosen))
