"""Exact EDD solver (branch and bound) and a brute-force Steiner tree oracle.

Any feasible plan is a forest hanging from the cloud, so with unit E2E
costs a plan that visits the server set ``H`` through transit set ``S``
costs ``sum(c2e(s) - 1 for s in S) + |H|``.  The search therefore branches
on which non-destination servers join ``H``; for each candidate ``H`` the
cheapest ``S`` is a weighted set cover of the destinations by
``d_limit``-hop balls inside the subgraph induced by ``H``.  Widening ``H``
never makes that cover more expensive, which gives an admissible bound.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from typing import Iterable

from .graph import (
    CLOUD,
    Edge,
    EddInstance,
    EddSolution,
    Graph,
    InstanceError,
    all_pairs_bfs,
    metric_closure,
    mst,
    prune_parents,
    solution_from_parents,
)
from .steiner import _expand_tree

DEFAULT_NODE_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """The search visited more nodes than its budget allows."""

    def __init__(self, budget: int):
        super().__init__(f"exact search exceeded its budget of {budget} nodes")
        self.budget = budget


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Search:
    def __init__(self, instance: EddInstance, budget: int):
        if instance.e2e_costs:
            raise InstanceError("the exact solver supports unit E2E costs only")
        g = instance.graph
        self.instance = instance
        self.n = g.node_count
        self.adj = [0] * (self.n + 1)
        for v in g.nodes:
            for u in g.adjacency[v]:
                self.adj[v] |= 1 << u
        self.dest_mask = sum(1 << r for r in instance.destinations)
        self.weight = {v: instance.c2e_cost(v) - 1.0 for v in g.nodes}
        self.hops = instance.d_limit
        self.budget = budget
        self.count = 0
        self.cover_cache: dict[int, tuple[float, int]] = {}
        self.best_cost = math.inf
        self.best_parent: dict[int, int] | None = None

    def tick(self) -> None:
        self.count += 1
        if self.count > self.budget:
            raise BudgetExceeded(self.budget)

    def ball(self, v: int, h_mask: int) -> int:
        reach = frontier = 1 << v
        for _ in range(self.hops):
            nxt = 0
            for x in _bits(frontier):
                nxt |= self.adj[x]
            frontier = nxt & h_mask & ~reach
            if not frontier:
                break
            reach |= frontier
        return reach

    def cover(self, h_mask: int) -> tuple[float, int]:
        """Cheapest transit set inside ``h_mask`` reaching every destination."""
        hit = self.cover_cache.get(h_mask)
        if hit is not None:
            return hit
        forced_cost, forced = 0.0, 0
        sets: list[tuple[float, int, int]] = []
        for v in _bits(h_mask):
            reach = self.ball(v, h_mask) & self.dest_mask
            if self.weight[v] <= 0:
                forced_cost += self.weight[v]
                forced |= 1 << v
                continue
            if reach:
                sets.append((self.weight[v], reach, v))
        covered = 0
        for v in _bits(forced):
            covered |= self.ball(v, h_mask) & self.dest_mask
        # Drop sets dominated by a no-costlier set.
        sets.sort(key=lambda s: (s[0], -s[1].bit_count(), s[2]))
        kept: list[tuple[float, int, int]] = []
        for w, reach, v in sets:
            reach &= ~covered
            if reach and not any(kw <= w and reach & ~kr == 0 for kw, kr, _ in kept):
                kept.append((w, reach, v))
        min_w = min((w for w, _, _ in kept), default=0.0)
        best = [math.inf, 0]

        def search(uncovered: int, cost: float, chosen: int) -> None:
            self.tick()
            if not uncovered:
                if cost < best[0]:
                    best[0], best[1] = cost, chosen
                return
            widest = max(
                ((r & uncovered).bit_count() for _, r, _ in kept), default=0
            )
            if widest == 0:
                return
            bound = cost + min_w * -(-uncovered.bit_count() // widest)
            if bound >= best[0] - 1e-9:
                return
            low = uncovered & -uncovered
            options = [s for s in kept if s[1] & low]
            options.sort(key=lambda s: (s[0] / (s[1] & uncovered).bit_count(), s[2]))
            for w, reach, v in options:
                search(uncovered & ~reach, cost + w, chosen | (1 << v))

        search(self.dest_mask & ~covered, 0.0, 0)
        result = (forced_cost + best[0], forced | best[1])
        self.cover_cache[h_mask] = result
        return result

    def realize(self, h_mask: int, s_mask: int) -> dict[int, int]:
        """BFS forest from the transit set inside ``h_mask``, pruned to destinations."""
        parent = {s: CLOUD for s in _bits(s_mask)}
        queue = deque(sorted(parent))
        while queue:
            v = queue.popleft()
            for u in _bits(self.adj[v] & h_mask):
                if u not in parent:
                    parent[u] = v
                    queue.append(u)
        return prune_parents(parent, self.instance.destinations)

    def cost_of(self, parent: dict[int, int]) -> float:
        inst = self.instance
        return sum(inst.c2e_cost(v) if p == CLOUD else 1.0 for v, p in parent.items())

    def run(self) -> dict[int, int]:
        g = self.instance.graph
        full = sum(1 << v for v in g.nodes)
        optional = [v for v in g.nodes if not self.dest_mask >> v & 1]
        optional.sort(
            key=lambda v: (-(self.ball(v, full) & self.dest_mask).bit_count(), v)
        )
        self.branch(self.dest_mask, optional, 0)
        assert self.best_parent is not None
        return self.best_parent

    def branch(self, included: int, optional: list[int], pos: int) -> None:
        self.tick()
        undecided = sum(1 << v for v in optional[pos:])
        h_opt = included | undecided
        c, s_mask = self.cover(h_opt)
        parent = self.realize(h_opt, s_mask)
        cost = self.cost_of(parent)
        if cost < self.best_cost - 1e-9:
            self.best_cost, self.best_parent = cost, parent
        lower = c + included.bit_count()
        if pos == len(optional) or lower >= self.best_cost - 1e-9:
            return
        v = optional[pos]
        self.branch(included | (1 << v), optional, pos + 1)
        self.branch(included, optional, pos + 1)


def exact_solve(instance: EddInstance, node_budget: int = DEFAULT_NODE_BUDGET) -> EddSolution:
    """Minimum-cost plan for ``instance``.

    Raises :class:`BudgetExceeded` once more than ``node_budget`` search
    nodes (branching nodes plus set-cover nodes) have been expanded.
    """
    search = _Search(instance, node_budget)
    return solution_from_parents(instance, search.run())


def brute_force_steiner(
    graph: Graph, terminals: Iterable[int], max_subsets: int = 1 << 20
) -> tuple[tuple[Edge, ...], int]:
    """Optimal Steiner tree by enumerating Steiner-point sets.

    A minimum tree needs at most ``|terminals| - 2`` Steiner points, each
    joined through the metric closure; every candidate set is priced by the
    MST of the closure on terminals plus those points.
    """
    terms = frozenset(terminals)
    if not terms:
        raise InstanceError("brute-force Steiner tree needs at least one terminal")
    others = [v for v in graph.nodes if v not in terms]
    max_extra = min(len(others), max(0, len(terms) - 2))
    n_subsets = sum(math.comb(len(others), k) for k in range(max_extra + 1))
    if n_subsets > max_subsets:
        raise InstanceError(
            f"brute-force Steiner search needs {n_subsets} subsets (limit {max_subsets})"
        )
    apsp = all_pairs_bfs(graph)
    best_cost, best_set = math.inf, ()
    for k in range(max_extra + 1):
        for extra in itertools.combinations(others, k):
            closure = metric_closure(graph, terms.union(extra), apsp)
            _, cost = mst(closure.terminals, closure.weights())
            if cost < best_cost:
                best_cost, best_set = cost, extra
    closure = metric_closure(graph, terms.union(best_set), apsp)
    edges, _ = mst(closure.terminals, closure.weights())
    tree = _expand_tree(graph, closure, terms, edges)
    return tree, len(tree)
