"""Small hand-drawn instances used as golden test fixtures."""

from __future__ import annotations

from .graph import EddInstance, Graph

PAPER10_EDGES = [
    (1, 4), (1, 10), (2, 3), (2, 4), (2, 8), (3, 5), (3, 9),
    (4, 9), (5, 6), (5, 9), (5, 10), (6, 8), (7, 8), (7, 10),
]
PAPER10_DESTINATIONS = frozenset({2, 3, 4, 5, 6, 8, 9})

# Nine-node hop-limit illustration; the figure shows node 8 although the
# accompanying node list omits it.  Destinations are the servers that
# receive data in the drawn plan.
FIG3_EDGES = [
    (1, 2), (1, 4), (1, 5), (2, 3), (3, 8), (4, 6),
    (4, 8), (5, 6), (6, 7), (7, 9), (8, 9),
]
FIG3_DESTINATIONS = frozenset({1, 2, 3, 4, 5, 6, 8})


def paper10(d_limit: int = 1, gamma: float = 20.0) -> EddInstance:
    """Ten-server scenario with seven destinations."""
    return EddInstance(Graph.from_edges(10, PAPER10_EDGES), PAPER10_DESTINATIONS, gamma, d_limit)


def fig3(d_limit: int = 2, gamma: float = 20.0) -> EddInstance:
    return EddInstance(Graph.from_edges(9, FIG3_EDGES), FIG3_DESTINATIONS, gamma, d_limit)


BUILTIN = {"paper10": paper10, "fig3": fig3}
