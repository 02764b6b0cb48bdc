"""Edge-server graphs, EDD instances and solutions, shortest paths and MSTs.

Node ids are 1-based (``1..n``); id ``0`` is reserved for the cloud.  All
edges are undirected and one hop long.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

CLOUD = 0

Edge = tuple[int, int]


class InstanceError(ValueError):
    """Raised for malformed graphs, instances or unknown node ids."""


def _edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Connected undirected unit-weight graph on nodes ``1..node_count``.

    ``adjacency[v]`` is the neighbour set of ``v``; ``adjacency[0]`` is the
    (always empty) slot of the cloud sentinel.
    """

    node_count: int
    adjacency: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        n = self.node_count
        if n < 1:
            raise InstanceError(f"graph needs at least one node, got n={n}")
        if len(self.adjacency) != n + 1:
            raise InstanceError("adjacency must have n + 1 entries (slot 0 is the cloud)")
        if self.adjacency[CLOUD]:
            raise InstanceError("the cloud slot 0 cannot have graph neighbours")
        for v in range(1, n + 1):
            for u in self.adjacency[v]:
                if u == v:
                    raise InstanceError(f"self-loop on node {v}")
                if not 1 <= u <= n:
                    raise InstanceError(f"node {v} has neighbour {u} outside 1..{n}")
                if v not in self.adjacency[u]:
                    raise InstanceError(f"adjacency is not symmetric for edge ({v}, {u})")
        if not self._connected():
            raise InstanceError("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for edge in edges:
            if len(edge) != 2:
                raise InstanceError(f"edge {edge!r} must have exactly two endpoints")
            u, v = int(edge[0]), int(edge[1])
            for x in (u, v):
                if not 1 <= x <= n:
                    raise InstanceError(f"edge ({u}, {v}) references node {x} outside 1..{n}")
            if u == v:
                raise InstanceError(f"self-loop on node {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(frozenset(a) for a in adj))

    def _connected(self) -> bool:
        seen = {1}
        queue = deque([1])
        while queue:
            v = queue.popleft()
            for u in self.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == self.node_count

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def neighbors(self, v: int) -> list[int]:
        """Neighbours of ``v`` in ascending id order."""
        return sorted(self.adjacency[v])

    def edges(self) -> list[Edge]:
        return sorted(
            (u, v) for u in self.nodes for v in self.adjacency[u] if u < v
        )

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return 1 <= u <= self.node_count and v in self.adjacency[u]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


@dataclass(frozen=True)
class EddInstance:
    """One EDD problem: graph, destinations, C2E/E2E cost ratio and hop limit.

    ``e2e_costs`` maps sorted node pairs to per-edge transfer costs and
    ``c2e_costs`` maps nodes to per-node cloud-transfer costs.  Missing
    entries fall back to 1 and ``gamma`` respectively.
    """

    graph: Graph
    destinations: frozenset[int]
    gamma: float
    d_limit: int
    e2e_costs: Mapping[Edge, float] = field(default_factory=dict)
    c2e_costs: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "destinations", frozenset(self.destinations))
        if not self.destinations:
            raise InstanceError("destination set must be nonempty")
        bad = sorted(r for r in self.destinations if not 1 <= r <= self.graph.node_count)
        if bad:
            raise InstanceError(f"destinations {bad} are not graph nodes")
        if not self.gamma > 0:
            raise InstanceError(f"gamma must be positive, got {self.gamma}")
        if int(self.d_limit) != self.d_limit or self.d_limit < 0:
            raise InstanceError(f"d_limit must be a non-negative integer, got {self.d_limit}")
        e2e = {}
        for (u, v), c in dict(self.e2e_costs).items():
            if not self.graph.has_edge(u, v):
                raise InstanceError(f"E2E cost given for non-edge ({u}, {v})")
            if c < 0:
                raise InstanceError(f"negative E2E cost on ({u}, {v})")
            e2e[_edge_key(u, v)] = float(c)
        c2e = {}
        for v, c in dict(self.c2e_costs).items():
            if not 1 <= v <= self.graph.node_count:
                raise InstanceError(f"C2E cost given for unknown node {v}")
            if not c > 0:
                raise InstanceError(f"C2E cost on node {v} must be positive")
            c2e[int(v)] = float(c)
        object.__setattr__(self, "e2e_costs", e2e)
        object.__setattr__(self, "c2e_costs", c2e)

    @property
    def depth_limit(self) -> int:
        """Depth budget counting the C2E hop (``d_limit + 1``)."""
        return self.d_limit + 1

    @property
    def uniform_costs(self) -> bool:
        return not self.e2e_costs and not self.c2e_costs

    def e2e_cost(self, u: int, v: int) -> float:
        return self.e2e_costs.get(_edge_key(u, v), 1.0)

    def c2e_cost(self, v: int) -> float:
        return self.c2e_costs.get(v, float(self.gamma))

    @property
    def rho(self) -> float:
        return len(self.destinations) / self.graph.node_count

    @property
    def delta(self) -> float:
        return self.graph.edge_count / self.graph.node_count


@dataclass(frozen=True)
class EddSolution:
    """A cloud-rooted distribution plan.

    ``transit`` is the set S of servers fed directly by the cloud,
    ``e2e_edges`` the directed edge-to-edge transfers, ``depth`` the depth
    of every visited server (transit servers sit at depth 1).
    """

    transit: frozenset[int]
    e2e_edges: frozenset[Edge]
    depth: Mapping[int, int]
    visited: frozenset[int]
    c2e_cost: float
    e2e_cost: float

    @property
    def cost(self) -> float:
        return self.c2e_cost + self.e2e_cost

    def parents(self) -> dict[int, int]:
        parent = {s: CLOUD for s in self.transit}
        for u, v in self.e2e_edges:
            parent[v] = u
        return parent

    def to_dict(self) -> dict:
        return {
            "transit": sorted(self.transit),
            "e2e_edges": [list(e) for e in sorted(self.e2e_edges)],
            "depth": {str(v): self.depth[v] for v in sorted(self.depth)},
            "visited": sorted(self.visited),
            "cost": {
                "c2e_cost": self.c2e_cost,
                "e2e_cost": self.e2e_cost,
                "total": self.cost,
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> EddSolution:
        try:
            cost = data["cost"]
            return cls(
                transit=frozenset(int(v) for v in data["transit"]),
                e2e_edges=frozenset((int(u), int(v)) for u, v in data["e2e_edges"]),
                depth={int(k): int(d) for k, d in data["depth"].items()},
                visited=frozenset(int(v) for v in data["visited"]),
                c2e_cost=float(cost["c2e_cost"]),
                e2e_cost=float(cost["e2e_cost"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"malformed solution document: {exc!r}") from exc


def plan_cost(instance: EddInstance, transit: Iterable[int], e2e_edges: Iterable[Edge]) -> tuple[float, float]:
    """(C2E cost, E2E cost) of a plan under the instance's cost model."""
    c2e = float(sum(instance.c2e_cost(s) for s in transit))
    e2e = float(sum(instance.e2e_cost(u, v) for u, v in e2e_edges))
    return c2e, e2e


def solution_from_parents(instance: EddInstance, parent: Mapping[int, int]) -> EddSolution:
    """Build an :class:`EddSolution` from a parent map (cloud parent = transit).

    Depths are tree depths below the cloud.  Nodes whose parent chain does
    not reach the cloud raise :class:`InstanceError`.
    """
    children: dict[int, list[int]] = {}
    for v, p in parent.items():
        children.setdefault(p, []).append(v)
    depth = {CLOUD: 0}
    queue = deque([CLOUD])
    while queue:
        p = queue.popleft()
        for v in sorted(children.get(p, ())):
            depth[v] = depth[p] + 1
            queue.append(v)
    if len(depth) != len(parent) + 1:
        stray = sorted(set(parent) - set(depth))
        raise InstanceError(f"nodes {stray} are not connected to the cloud")
    del depth[CLOUD]
    transit = frozenset(v for v, p in parent.items() if p == CLOUD)
    edges = frozenset((p, v) for v, p in parent.items() if p != CLOUD)
    c2e, e2e = plan_cost(instance, transit, edges)
    return EddSolution(
        transit=transit,
        e2e_edges=edges,
        depth=depth,
        visited=frozenset(parent),
        c2e_cost=c2e,
        e2e_cost=e2e,
    )


def prune_parents(parent: Mapping[int, int], keep: Iterable[int]) -> dict[int, int]:
    """Drop every node that is not on the cloud path of some node in ``keep``."""
    needed: set[int] = set()
    for v in keep:
        while v != CLOUD and v not in needed:
            needed.add(v)
            v = parent[v]
    return {v: p for v, p in parent.items() if v in needed}


def all_pairs_bfs(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Hop distances and BFS predecessors between every pair of nodes.

    Both arrays are ``(n + 1) x (n + 1)`` and indexed by node id; row and
    column 0 (the cloud) are unused.  ``pred[s, v]`` is the node before
    ``v`` on the shortest ``s -> v`` path found by BFS from ``s`` visiting
    neighbours in ascending id order, ``-1`` for ``v == s``.
    """
    n = graph.node_count
    dist = np.full((n + 1, n + 1), -1, dtype=np.int64)
    pred = np.full((n + 1, n + 1), -1, dtype=np.int64)
    neighbors = [graph.neighbors(v) for v in range(n + 1)]
    for s in graph.nodes:
        row, prow = dist[s], pred[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in neighbors[v]:
                if row[u] < 0:
                    row[u] = row[v] + 1
                    prow[u] = v
                    queue.append(u)
    return dist, pred


def shortest_path(pred: np.ndarray, u: int, v: int) -> list[int]:
    """Node sequence ``u, ..., v`` reconstructed from a predecessor matrix."""
    path = [v]
    while v != u:
        v = int(pred[u, v])
        if v < 0:
            raise InstanceError(f"no path recorded from {u} to {path[-1]}")
        path.append(v)
    path.reverse()
    return path


@dataclass(frozen=True)
class MetricClosure:
    """Hop-distance metric restricted to ``terminals``.

    ``dist[i, j]`` is the distance between ``terminals[i]`` and
    ``terminals[j]``; ``full_dist``/``pred`` cover the whole graph so metric
    edges can be expanded back into graph paths.
    """

    terminals: tuple[int, ...]
    dist: np.ndarray
    full_dist: np.ndarray
    pred: np.ndarray

    def index(self, v: int) -> int:
        return self.terminals.index(v)

    def path(self, u: int, v: int) -> list[int]:
        return shortest_path(self.pred, u, v)

    def weights(self) -> dict[Edge, int]:
        """Complete-graph edge weights keyed by sorted node-id pairs."""
        return {
            (a, b): int(self.full_dist[a, b])
            for a, b in itertools.combinations(sorted(self.terminals), 2)
        }


def metric_closure(
    graph: Graph,
    terminals: Iterable[int],
    apsp: tuple[np.ndarray, np.ndarray] | None = None,
) -> MetricClosure:
    terms = tuple(sorted(set(terminals)))
    unknown = [t for t in terms if not 1 <= t <= graph.node_count]
    if unknown:
        raise InstanceError(f"unknown terminal ids {unknown}")
    dist, pred = apsp if apsp is not None else all_pairs_bfs(graph)
    idx = np.array(terms, dtype=np.int64)
    return MetricClosure(terms, dist[np.ix_(idx, idx)], dist, pred)


def mst(nodes: Iterable[int], weights: Mapping[Edge, float]) -> tuple[list[Edge], float]:
    """Kruskal minimum spanning tree of a weighted graph.

    Ties are broken by ``(weight, smaller endpoint, larger endpoint)`` so the
    result is deterministic.  ``weights`` keys may be given in either
    orientation.  Raises :class:`InstanceError` on an empty node set or a
    disconnected input.
    """
    node_list = sorted(set(nodes))
    if not node_list:
        raise InstanceError("mst of an empty node set")
    parent = {v: v for v in node_list}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ordered = sorted((w, *_edge_key(u, v)) for (u, v), w in weights.items())
    tree: list[Edge] = []
    total = 0.0
    for w, u, v in ordered:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.append((u, v))
            total += w
            if len(tree) == len(node_list) - 1:
                break
    if len(tree) != len(node_list) - 1:
        raise InstanceError("mst input graph is not connected")
    return tree, total


@dataclass(frozen=True)
class Violation:
    """One broken constraint of a plan."""

    constraint: str
    subject: object
    message: str

    def __str__(self) -> str:
        return f"[{self.constraint}] {self.subject}: {self.message}"


def validate_solution(instance: EddInstance, solution: EddSolution) -> list[Violation]:
    """Check a plan against every feasibility constraint of the EDD model.

    Returns the list of violations; an empty list means the plan is feasible
    and its stored cost matches the instance's cost model.
    """
    g = instance.graph
    out: list[Violation] = []

    def bad(constraint: str, subject: object, message: str) -> None:
        out.append(Violation(constraint, subject, message))

    for v in sorted(solution.transit | solution.visited | set(solution.depth)):
        if not 1 <= v <= g.node_count:
            bad("node-id", v, "not a graph node")
    for u, v in sorted(solution.e2e_edges):
        if not g.has_edge(u, v):
            bad("edge", (u, v), "E2E transfer over a non-existent link")
    if out:
        return out

    if not solution.transit:
        bad("at-least-one-transit", "S", "no server receives data from the cloud")

    for r in sorted(instance.destinations - solution.visited):
        bad("destination-visited", r, "destination never receives the data")

    incoming: dict[int, list[int]] = {}
    for u, v in solution.e2e_edges:
        incoming.setdefault(v, []).append(u)
        for x in (u, v):
            if x not in solution.visited:
                bad("edge-endpoints-visited", (u, v), f"endpoint {x} is not marked visited")
    for v in sorted(solution.visited):
        feeds = sorted(incoming.get(v, ()))
        if v in solution.transit:
            if feeds:
                bad("single-parent", v, f"transit server also fed by {feeds}")
        elif len(feeds) != 1:
            bad("single-parent", v, f"expected exactly one incoming transfer, got {len(feeds)}")
    for v in sorted(solution.transit - solution.visited):
        bad("edge-endpoints-visited", v, "transit server is not marked visited")

    depth = solution.depth
    limit = instance.depth_limit
    for v in sorted(solution.visited):
        if v not in depth:
            bad("depth-range", v, "visited server has no depth label")
            continue
        d = depth[v]
        if (d == 1) != (v in solution.transit):
            bad("depth-one-iff-transit", v, f"depth {d} but transit={v in solution.transit}")
        if not 1 <= d <= limit:
            bad("depth-range", v, f"depth {d} outside [1, {limit}]")
    for u, v in sorted(solution.e2e_edges):
        if u in depth and v in depth and depth[v] - depth[u] != 1:
            bad("depth-step", (u, v), f"depths {depth[u]} -> {depth[v]} differ by {depth[v] - depth[u]}")

    # Multi-source BFS along the chosen transfers.
    children: dict[int, list[int]] = {}
    for u, v in solution.e2e_edges:
        children.setdefault(u, []).append(v)
    hops = {s: 0 for s in solution.transit}
    queue = deque(sorted(solution.transit))
    while queue:
        u = queue.popleft()
        for v in children.get(u, ()):
            if v not in hops:
                hops[v] = hops[u] + 1
                queue.append(v)
    for r in sorted(instance.destinations & solution.visited):
        if r not in hops:
            bad("reachable", r, "destination not reachable from any transit server")
        elif hops[r] > instance.d_limit:
            bad("hop-limit", r, f"{hops[r]} E2E hops exceed d_limit={instance.d_limit}")

    c2e, e2e = plan_cost(instance, solution.transit, solution.e2e_edges)
    if abs(c2e - solution.c2e_cost) > 1e-9 or abs(e2e - solution.e2e_cost) > 1e-9:
        bad(
            "cost",
            "total",
            f"stored cost ({solution.c2e_cost}, {solution.e2e_cost}) != recomputed ({c2e}, {e2e})",
        )
    return out
