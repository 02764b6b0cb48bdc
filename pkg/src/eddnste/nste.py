"""Turn an approximate Steiner tree into a depth-limited, cloud-rooted plan."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import (
    CLOUD,
    EddInstance,
    EddSolution,
    Graph,
    InstanceError,
    all_pairs_bfs,
    prune_parents,
    shortest_path,
    solution_from_parents,
)
from .steiner import SteinerTree, steiner_approx


@dataclass(frozen=True)
class DirectedTree:
    """Steiner tree hung below the cloud.

    ``paths[v]`` is the graph path from ``parent[v]`` to ``v``; for the
    cloud-attached root it is just ``[root]``.
    """

    root: int
    parent: Mapping[int, int]
    depth: Mapping[int, int]
    paths: Mapping[int, tuple[int, ...]]

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {CLOUD: []}
        for v, p in sorted(self.parent.items()):
            out.setdefault(p, []).append(v)
            out.setdefault(v, [])
        return out


def _bfs_depths(children: Mapping[int, set[int]]) -> dict[int, int]:
    depth = {CLOUD: 0}
    queue = deque([CLOUD])
    while queue:
        p = queue.popleft()
        for v in children.get(p, ()):
            depth[v] = depth[p] + 1
            queue.append(v)
    return depth


def root_at_cloud(st: SteinerTree, graph: Graph, pred: np.ndarray | None = None) -> DirectedTree:
    """Attach the highest-degree tree node to the cloud and orient the tree.

    Tree edges that are not graph links are replaced by shortest graph
    paths; the orientation is a BFS from the attached node, so every node
    gets its minimum depth.
    """
    if not st.nodes:
        raise InstanceError("cannot root an empty Steiner tree")
    root = min(st.nodes, key=lambda v: (-st.degree(v), v))
    adj: dict[int, set[int]] = {v: set() for v in st.nodes}
    for u, v in st.edges:
        if graph.has_edge(u, v):
            hops = [u, v]
        else:
            if pred is None:
                pred = all_pairs_bfs(graph)[1]
            hops = shortest_path(pred, u, v)
        for a, b in zip(hops, hops[1:]):
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
    parent = {root: CLOUD}
    depth = {root: 1}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in sorted(adj[v]):
            if u not in parent:
                parent[u] = v
                depth[u] = depth[v] + 1
                queue.append(u)
    paths = {v: (p, v) if p != CLOUD else (v,) for v, p in parent.items()}
    return DirectedTree(root, parent, depth, paths)


def prune(instance: EddInstance, parent: Mapping[int, int]) -> EddSolution:
    """Keep only the tree paths leading to destinations and price the plan."""
    return solution_from_parents(instance, prune_parents(parent, instance.destinations))


def slice_and_tune(dt: DirectedTree, instance: EddInstance) -> EddSolution:
    """Walk the rooted tree depth-first and fix every depth-limit overflow.

    A destination found deeper than the depth limit is fed straight from
    the cloud; its graph neighbours that sit more than one level below it
    are re-hung under it when that keeps them within the limit.  Children
    are visited in ascending id order.
    """
    graph = instance.graph
    dests = instance.destinations
    limit = instance.depth_limit
    parent = dict(dt.parent)
    children: dict[int, set[int]] = {CLOUD: set()}
    for v, p in parent.items():
        children.setdefault(p, set()).add(v)
        children.setdefault(v, set())
    depth = _bfs_depths(children)

    def rehang(v: int, new_parent: int) -> None:
        children[parent[v]].discard(v)
        parent[v] = new_parent
        children[new_parent].add(v)

    visited: set[int] = set()
    stack: list[tuple[int, set[int]]] = [(CLOUD, set())]
    while stack:
        v, done = stack[-1]
        pending = children[v] - done
        if not pending:
            stack.pop()
            continue
        u = min(pending)
        done.add(u)
        if u not in visited:
            visited.add(u)
            if u in dests and depth[u] > limit:
                rehang(u, CLOUD)
                stack[0][1].add(u)
                depth[u] = 1
                for w in graph.neighbors(u):
                    if w in parent and depth[w] > depth[u] + 1 and depth[u] + 1 <= limit:
                        if parent[w] != u:
                            rehang(w, u)
                        depth[w] = depth[u] + 1
                depth = _bfs_depths(children)
        stack.append((u, set()))

    return prune(instance, parent)


def edd_nste(instance: EddInstance, apsp: tuple[np.ndarray, np.ndarray] | None = None) -> EddSolution:
    """Full EDD-NSTE pipeline: Steiner approximation, rooting, slicing."""
    if apsp is None:
        apsp = all_pairs_bfs(instance.graph)
    st = steiner_approx(instance.graph, instance.destinations, apsp)
    dt = root_at_cloud(st, instance.graph, apsp[1])
    return slice_and_tune(dt, instance)
