"""Brute-force reference implementations used only by the tests.

Everything here is deliberately naive and shares no code path with the
package beyond the data types.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from hypothesis import strategies as st

from eddnste.graph import CLOUD, EddInstance, Graph, InstanceError, solution_from_parents, validate_solution


def path_distance(graph: Graph, u: int, v: int) -> int:
    """Shortest hop count by enumerating every simple path."""
    best = math.inf

    def walk(x: int, seen: set[int], length: int) -> None:
        nonlocal best
        if length >= best:
            return
        if x == v:
            best = length
            return
        for y in graph.adjacency[x]:
            if y not in seen:
                seen.add(y)
                walk(y, seen, length + 1)
                seen.remove(y)

    walk(u, {u}, 0)
    return int(best)


def prufer_trees(nodes: list[int]):
    """Every labelled spanning tree of the complete graph on ``nodes``."""
    k = len(nodes)
    if k == 1:
        yield []
        return
    if k == 2:
        yield [(nodes[0], nodes[1])]
        return
    for seq in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for i in seq:
            degree[i] += 1
        edges = []
        for i in seq:
            leaf = min(j for j in range(k) if degree[j] == 1)
            edges.append((nodes[leaf], nodes[i]))
            degree[leaf] -= 1
            degree[i] -= 1
        a, b = [j for j in range(k) if degree[j] == 1]
        edges.append((nodes[a], nodes[b]))
        yield edges


@functools.lru_cache(maxsize=None)
def _tree_index(k: int) -> np.ndarray:
    """Every labelled tree on 0..k-1 as a (trees, k-1, 2) index array."""
    return np.array(list(prufer_trees(list(range(k)))), dtype=np.int64).reshape(-1, max(k - 1, 0), 2)


def brute_mst_weight(nodes: list[int], weight) -> float:
    """Minimum spanning tree weight of a complete graph by full enumeration."""
    nodes = sorted(nodes)
    k = len(nodes)
    if k == 1:
        return 0
    w = np.array([[weight(a, b) if a != b else 0 for b in nodes] for a in nodes], dtype=float)
    trees = _tree_index(k)
    return float(w[trees[:, :, 0], trees[:, :, 1]].sum(axis=1).min())


def brute_save(nodes: list[int], weight, u: int, v: int) -> float:
    """mst(F) - mst(F with the (u, v) edge contracted to weight 0)."""

    def contracted(a: int, b: int) -> float:
        return 0 if {a, b} == {u, v} else weight(a, b)

    return brute_mst_weight(nodes, weight) - brute_mst_weight(nodes, contracted)


def brute_steiner_cost(graph: Graph, terminals) -> int:
    """Fewest graph edges forming a tree that touches every terminal."""
    terms = set(terminals)
    if len(terms) == 1:
        return 0
    edges = graph.edges()
    for k in range(1, len(edges) + 1):
        for subset in itertools.combinations(edges, k):
            nodes = {x for e in subset for x in e}
            if not terms <= nodes or len(nodes) != k + 1:
                continue
            # k edges on k + 1 nodes: a tree iff connected.
            reach, stack = {subset[0][0]}, [subset[0][0]]
            while stack:
                x = stack.pop()
                for a, b in subset:
                    for p, q in ((a, b), (b, a)):
                        if p == x and q not in reach:
                            reach.add(q)
                            stack.append(q)
            if reach == nodes:
                return k
    raise AssertionError("graph is connected, a tree must exist")


def brute_edd_optimum(instance: EddInstance) -> float:
    """Optimal plan cost by trying every parent assignment (tiny graphs only)."""
    g = instance.graph
    choices = []
    for v in g.nodes:
        choices.append([None, CLOUD] + g.neighbors(v))
    best = math.inf
    for assignment in itertools.product(*choices):
        parent = {v: p for v, p in zip(g.nodes, assignment) if p is not None}
        if not instance.destinations <= parent.keys():
            continue
        if any(p != CLOUD and p not in parent for p in parent.values()):
            continue
        try:
            sol = solution_from_parents(instance, parent)
        except InstanceError:
            continue  # cycle
        if sol.cost < best and not validate_solution(instance, sol):
            best = sol.cost
    return best


@st.composite
def connected_graphs(draw, min_nodes: int = 1, max_nodes: int = 7) -> Graph:
    n = draw(st.integers(min_nodes, max_nodes))
    edges = set()
    for v in range(2, n + 1):
        u = draw(st.integers(1, v - 1))
        edges.add((u, v))
    extra = [e for e in itertools.combinations(range(1, n + 1), 2) if e not in edges]
    if extra:
        chosen = draw(st.lists(st.sampled_from(extra), max_size=len(extra), unique=True))
        edges.update(chosen)
    # Relabel so the spanning tree is not always rooted at node 1.
    perm = draw(st.permutations(list(range(1, n + 1))))
    return Graph.from_edges(n, [(perm[u - 1], perm[v - 1]) for u, v in edges])


@st.composite
def instances(draw, max_nodes: int = 7, max_d_limit: int = 4, gammas=(1.0, 3.0, 20.0)) -> EddInstance:
    g = draw(connected_graphs(max_nodes=max_nodes))
    dests = draw(st.sets(st.sampled_from(list(g.nodes)), min_size=1))
    d_limit = draw(st.integers(0, max_d_limit))
    gamma = draw(st.sampled_from(gammas))
    return EddInstance(g, frozenset(dests), gamma, d_limit)
