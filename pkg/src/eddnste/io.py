"""JSON instance and solution documents.

Instance document::

    {
      "n": 10,
      "edges": [[1, 4], [1, 10], ...],
      "destinations": [2, 3, 4],
      "gamma": 20,
      "d_limit": 1,
      "e2e_costs": [[1, 4, 2.5]],      # optional, per-link E2E cost
      "c2e_costs": {"3": 15.0}         # optional, per-server C2E cost
    }
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .graph import EddInstance, EddSolution, Graph, InstanceError


class DocumentError(InstanceError):
    """A document could not be parsed; the message names the location."""


def _field(doc: dict, name: str, source: str) -> Any:
    if name not in doc:
        raise DocumentError(f"{source}: missing field '{name}'")
    return doc[name]


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"{where}: expected a number, got {value!r}")
    return float(value)


def parse_instance(text: str, source: str = "<instance>") -> EddInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: top level must be an object")
    n = _as_int(_field(doc, "n", source), f"{source}: field 'n'")
    raw_edges = _field(doc, "edges", source)
    if not isinstance(raw_edges, list):
        raise DocumentError(f"{source}: field 'edges' must be a list")
    edges = []
    for i, e in enumerate(raw_edges):
        where = f"{source}: field 'edges[{i}]'"
        if not isinstance(e, list) or len(e) != 2:
            raise DocumentError(f"{where}: expected a [u, v] pair, got {e!r}")
        edges.append((_as_int(e[0], where), _as_int(e[1], where)))
    raw_dest = _field(doc, "destinations", source)
    if not isinstance(raw_dest, list):
        raise DocumentError(f"{source}: field 'destinations' must be a list")
    dests = [_as_int(r, f"{source}: field 'destinations[{i}]'") for i, r in enumerate(raw_dest)]
    gamma = _as_number(_field(doc, "gamma", source), f"{source}: field 'gamma'")
    d_limit = _as_int(_field(doc, "d_limit", source), f"{source}: field 'd_limit'")
    e2e = {}
    for i, item in enumerate(doc.get("e2e_costs", [])):
        where = f"{source}: field 'e2e_costs[{i}]'"
        if not isinstance(item, list) or len(item) != 3:
            raise DocumentError(f"{where}: expected [u, v, cost], got {item!r}")
        u, v = _as_int(item[0], where), _as_int(item[1], where)
        e2e[(min(u, v), max(u, v))] = _as_number(item[2], where)
    c2e = {}
    for key, cost in dict(doc.get("c2e_costs", {})).items():
        where = f"{source}: field 'c2e_costs[{key}]'"
        try:
            node = int(key)
        except ValueError:
            raise DocumentError(f"{where}: key must be a node id") from None
        c2e[node] = _as_number(cost, where)
    try:
        graph = Graph.from_edges(n, edges)
        return EddInstance(graph, frozenset(dests), gamma, d_limit, e2e, c2e)
    except DocumentError:
        raise
    except InstanceError as exc:
        raise DocumentError(f"{source}: {exc}") from exc


def load_instance(path: str | Path) -> EddInstance:
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), str(path))


def instance_to_dict(instance: EddInstance) -> dict:
    doc: dict[str, Any] = {
        "n": instance.graph.node_count,
        "edges": [list(e) for e in instance.graph.edges()],
        "destinations": sorted(instance.destinations),
        "gamma": instance.gamma,
        "d_limit": instance.d_limit,
    }
    if instance.e2e_costs:
        doc["e2e_costs"] = [[u, v, c] for (u, v), c in sorted(instance.e2e_costs.items())]
    if instance.c2e_costs:
        doc["c2e_costs"] = {str(v): c for v, c in sorted(instance.c2e_costs.items())}
    return doc


def dump_instance(instance: EddInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def dump_solution(solution: EddSolution) -> str:
    return json.dumps(solution.to_dict(), indent=2, sort_keys=True) + "\n"


def load_solution(path: str | Path) -> EddSolution:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: top level must be an object")
    try:
        return EddSolution.from_dict(doc)
    except InstanceError as exc:
        raise DocumentError(f"{path}: {exc}") from exc
