"""Instance generation, EUA ingestion and experiment sweeps."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .baselines import greedy_connectivity, random_strategy
from .exact import DEFAULT_NODE_BUDGET, BudgetExceeded, exact_solve
from .graph import EddInstance, EddSolution, Graph, InstanceError, validate_solution
from .nste import edd_nste

logger = logging.getLogger(__name__)

ALGORITHMS = ("exact", "nste", "greedy", "random")
CSV_COLUMNS = (
    "algo", "n", "r", "d_limit", "gamma", "rho", "delta",
    "seed", "cost", "runtime_ms", "status",
)
STATUS_OK = "ok"
STATUS_BUDGET = "budget-exceeded"
STATUS_SKIPPED = "skipped"
STATUS_ERROR = "error"


def solve(
    algo: str,
    instance: EddInstance,
    seed: int = 0,
    exact_budget: int = DEFAULT_NODE_BUDGET,
) -> EddSolution:
    """Run one algorithm by name."""
    if algo == "nste":
        return edd_nste(instance)
    if algo == "greedy":
        return greedy_connectivity(instance)
    if algo == "random":
        return random_strategy(instance, seed)
    if algo == "exact":
        return exact_solve(instance, exact_budget)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


# --------------------------------------------------------------------------
# EUA dataset


@dataclass(frozen=True)
class GeoPoint:
    site_id: str
    latitude: float
    longitude: float


class EuaFormatError(ValueError):
    pass


def _find_column(header: Sequence[str], names: Iterable[str]) -> int | None:
    lowered = [h.strip().lower() for h in header]
    for name in names:
        if name in lowered:
            return lowered.index(name)
    return None


def load_eua(path: str | Path) -> list[GeoPoint]:
    """Read edge-server sites from an EUA-style CSV.

    Needs latitude and longitude columns (case-insensitive; ``lat``/``lon``
    and ``lng`` also accepted).  Every malformed row is reported with its
    line number.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise EuaFormatError(f"{path}: empty file")
        lat_col = _find_column(header, ("latitude", "lat"))
        lon_col = _find_column(header, ("longitude", "lon", "lng"))
        id_col = _find_column(header, ("site_id", "id"))
        if lat_col is None or lon_col is None:
            raise EuaFormatError(f"{path}:1: header lacks latitude/longitude columns: {header}")
        points, errors = [], []
        for row in reader:
            line = reader.line_num
            if not any(cell.strip() for cell in row):
                continue
            try:
                lat = float(row[lat_col])
                lon = float(row[lon_col])
                if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                    raise ValueError("coordinates out of range")
            except (IndexError, ValueError) as exc:
                errors.append(f"line {line}: {exc}")
                continue
            site = row[id_col].strip() if id_col is not None and id_col < len(row) else str(len(points) + 1)
            points.append(GeoPoint(site, lat, lon))
    if errors:
        raise EuaFormatError(f"{path}: {len(errors)} malformed row(s): " + "; ".join(errors))
    logger.info("loaded %d EUA sites from %s", len(points), path)
    return points


# --------------------------------------------------------------------------
# Instance generation


def _edge_target(n: int, delta: float) -> int:
    return int(math.floor(delta * n + 1e-9))


def generate_instance(
    n: int,
    r_count: int,
    delta_target: float,
    gamma: float,
    d_limit: int,
    seed: int,
) -> EddInstance:
    """Random connected instance with ``floor(delta * n)`` edges.

    A random recursive spanning tree guarantees connectivity; the remaining
    edges are drawn uniformly from the missing pairs.  Destinations are a
    uniform sample without replacement.
    """
    if n < 1:
        raise InstanceError(f"n must be positive, got {n}")
    if not 1 <= r_count <= n:
        raise InstanceError(f"need 1 <= r_count <= n, got r_count={r_count}, n={n}")
    m = _edge_target(n, delta_target)
    if m < n - 1:
        raise InstanceError(f"edge density {delta_target} gives {m} edges, below the {n - 1} needed")
    if m > n * (n - 1) // 2:
        raise InstanceError(f"edge density {delta_target} needs {m} edges; a simple graph on {n} nodes has at most {n * (n - 1) // 2}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(np.arange(1, n + 1))
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(i))
        u, v = int(order[i]), int(order[j])
        edges.add((min(u, v), max(u, v)))
    missing = [e for e in itertools.combinations(range(1, n + 1), 2) if e not in edges]
    extra = m - len(edges)
    if extra:
        picks = rng.choice(len(missing), size=extra, replace=False)
        edges.update(missing[int(i)] for i in picks)
    dests = rng.choice(np.arange(1, n + 1), size=r_count, replace=False)
    graph = Graph.from_edges(n, sorted(edges))
    return EddInstance(graph, frozenset(int(r) for r in dests), gamma, d_limit)


def proximity_instance(
    points: Sequence[GeoPoint],
    r_count: int,
    k: int,
    gamma: float,
    d_limit: int,
    seed: int,
) -> EddInstance:
    """Instance on geo-located sites: k-nearest-neighbour links, then the
    closest pair between components is linked until the graph is connected.
    """
    n = len(points)
    if n < 1:
        raise InstanceError("no sites given")
    lat = np.radians([p.latitude for p in points])
    lon = np.radians([p.longitude for p in points])
    x = (lon[:, None] - lon[None, :]) * np.cos((lat[:, None] + lat[None, :]) / 2)
    y = lat[:, None] - lat[None, :]
    dist = np.hypot(x, y)
    np.fill_diagonal(dist, np.inf)
    edges = set()
    for i in range(n):
        for j in np.argsort(dist[i], kind="stable")[: min(k, n - 1)]:
            edges.add((min(i, int(j)) + 1, max(i, int(j)) + 1))
    comp = list(range(n))

    def find(a: int) -> int:
        while comp[a] != a:
            comp[a] = comp[comp[a]]
            a = comp[a]
        return a

    for u, v in edges:
        comp[find(u - 1)] = find(v - 1)
    while len({find(i) for i in range(n)}) > 1:
        roots = np.array([find(i) for i in range(n)])
        cross = np.where(roots[:, None] != roots[None, :], dist, np.inf)
        i, j = np.unravel_index(int(np.argmin(cross)), cross.shape)
        edges.add((min(i, j) + 1, max(i, j) + 1))
        comp[find(int(i))] = find(int(j))
    rng = np.random.default_rng(seed)
    dests = rng.choice(np.arange(1, n + 1), size=r_count, replace=False)
    return EddInstance(Graph.from_edges(n, sorted(edges)), frozenset(int(r) for r in dests), gamma, d_limit)


# --------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepConfig:
    """Grid of experiment settings.

    Destination counts come from ``r_values`` or, when it is empty, from
    ``round(rho * n)`` for each ``rho`` in ``rho_values``.
    """

    n_values: tuple[int, ...]
    d_limit_values: tuple[int, ...]
    r_values: tuple[int, ...] = ()
    rho_values: tuple[float, ...] = ()
    delta_values: tuple[float, ...] = (1.5,)
    gamma: float = 20.0
    algorithms: tuple[str, ...] = ALGORITHMS
    repetitions: int = 1
    base_seed: int = 0
    exact_budget: int = DEFAULT_NODE_BUDGET
    exact_max_n: int = 30
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("n_values", "d_limit_values", "r_values", "rho_values", "delta_values", "algorithms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.n_values or not self.d_limit_values:
            raise ValueError("n_values and d_limit_values must be nonempty")
        if bool(self.r_values) == bool(self.rho_values):
            raise ValueError("give exactly one of r_values and rho_values")
        for rho in self.rho_values:
            if not 0 < rho <= 1:
                raise ValueError(f"rho must lie in (0, 1], got {rho}")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")
        for n in self.n_values:
            for delta in self.delta_values:
                if _edge_target(n, delta) < n - 1:
                    raise ValueError(f"delta={delta} is below the connectivity floor for n={n}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> SweepConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**data)

    def cells(self) -> Iterator[dict[str, Any]]:
        """Every (grid point, repetition) in a fixed order."""
        counts = [("r", r) for r in self.r_values] or [("rho", rho) for rho in self.rho_values]
        index = 0
        for n, (kind, value), d_limit, delta in itertools.product(
            self.n_values, counts, self.d_limit_values, self.delta_values
        ):
            r = value if kind == "r" else max(1, round(value * n))
            for rep in range(self.repetitions):
                yield {
                    "index": index, "n": n, "r": r, "d_limit": d_limit,
                    "delta": delta, "rep": rep,
                    "seed": cell_seed(self.base_seed, index),
                }
                index += 1


def cell_seed(base_seed: int, index: int) -> int:
    """63-bit seed derived from the base seed and the cell index."""
    state = np.random.SeedSequence([base_seed, index]).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


@dataclass(frozen=True)
class SweepResult:
    algo: str
    n: int
    r: int
    d_limit: int
    gamma: float
    rho: float
    delta: float
    seed: int
    cost: float | None
    runtime_ms: float
    status: str

    def to_row(self) -> list[str]:
        return [
            self.algo, str(self.n), str(self.r), str(self.d_limit), repr(self.gamma),
            repr(self.rho), repr(self.delta), str(self.seed),
            "" if self.cost is None else repr(self.cost),
            repr(self.runtime_ms), self.status,
        ]

    @classmethod
    def from_row(cls, row: Mapping[str, str]) -> SweepResult:
        return cls(
            algo=row["algo"], n=int(row["n"]), r=int(row["r"]),
            d_limit=int(row["d_limit"]), gamma=float(row["gamma"]),
            rho=float(row["rho"]), delta=float(row["delta"]), seed=int(row["seed"]),
            cost=float(row["cost"]) if row["cost"] else None,
            runtime_ms=float(row["runtime_ms"]), status=row["status"],
        )


def emit_csv(rows: Iterable[SweepResult], header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.to_row())
    return buf.getvalue()


def parse_csv(text: str) -> list[SweepResult]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [SweepResult.from_row(row) for row in reader]


def run_cell(config: SweepConfig, cell: Mapping[str, Any]) -> list[SweepResult]:
    """Generate the cell's instance and run every configured algorithm on it."""
    n, r, d_limit, delta, seed = cell["n"], cell["r"], cell["d_limit"], cell["delta"], cell["seed"]

    def row(algo: str, cost: float | None, ms: float, status: str, rho: float, realized_delta: float) -> SweepResult:
        return SweepResult(algo, n, r, d_limit, float(config.gamma), rho, realized_delta, seed, cost, ms, status)

    try:
        instance = generate_instance(n, r, delta, config.gamma, d_limit, seed)
    except InstanceError as exc:
        logger.warning("cell %d: %s", cell["index"], exc)
        return [row(a, None, 0.0, STATUS_ERROR, r / n, delta) for a in config.algorithms]

    out = []
    for algo in config.algorithms:
        rho, realized = instance.rho, instance.delta
        if algo == "exact" and n > config.exact_max_n:
            out.append(row(algo, None, 0.0, STATUS_SKIPPED, rho, realized))
            continue
        start = time.perf_counter()
        try:
            solution = solve(algo, instance, seed, config.exact_budget)
        except BudgetExceeded:
            ms = (time.perf_counter() - start) * 1e3
            out.append(row(algo, None, ms, STATUS_BUDGET, rho, realized))
            continue
        except Exception as exc:  # recorded per cell; the sweep goes on
            logger.exception("cell %d, %s failed: %s", cell["index"], algo, exc)
            out.append(row(algo, None, 0.0, STATUS_ERROR, rho, realized))
            continue
        ms = (time.perf_counter() - start) * 1e3
        violations = validate_solution(instance, solution)
        if violations:
            logger.error("cell %d, %s produced an infeasible plan: %s", cell["index"], algo, violations[0])
            out.append(row(algo, None, ms, STATUS_ERROR, rho, realized))
        else:
            out.append(row(algo, solution.cost, ms, STATUS_OK, rho, realized))
    return out


def run_sweep(config: SweepConfig, csv_path: str | Path | None = None) -> list[SweepResult]:
    """Run every cell, appending rows to ``csv_path`` as cells finish.

    Rows are written in cell order regardless of ``config.workers``.
    """
    cells = list(config.cells())
    results: list[SweepResult] = []
    fh = None
    if csv_path is not None:
        path = Path(csv_path)
        fresh = not path.exists() or path.stat().st_size == 0
        fh = path.open("a", newline="", encoding="utf-8")
        if fresh:
            fh.write(emit_csv([], header=True))
            fh.flush()
    try:
        if config.workers > 1:
            pool = ProcessPoolExecutor(max_workers=config.workers)
            batches = pool.map(run_cell, itertools.repeat(config), cells)
        else:
            pool = None
            batches = (run_cell(config, c) for c in cells)
        try:
            for batch in batches:
                results.extend(batch)
                if fh is not None:
                    fh.write(emit_csv(batch, header=False))
                    fh.flush()
        finally:
            if pool is not None:
                pool.shutdown()
    finally:
        if fh is not None:
            fh.close()
    return results


def summarize(rows: Iterable[SweepResult]) -> list[dict[str, Any]]:
    """Mean cost per grid point and algorithm over ``ok`` rows."""
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        key = (row.n, row.r, row.d_limit, row.algo)
        groups.setdefault(key, [])
        if row.status == STATUS_OK and row.cost is not None:
            groups[key].append(row.cost)
    return [
        {
            "n": n, "r": r, "d_limit": d, "algo": algo, "runs": len(costs),
            "mean_cost": float(np.mean(costs)) if costs else None,
        }
        for (n, r, d, algo), costs in groups.items()
    ]
