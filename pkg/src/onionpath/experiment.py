"""End-to-end experiment harness over the strategy grid.

Builds a seeded population, warms the latency graph with the background
probe loop, computes each strategy's anonymity degree once up front,
then times simulated page transfers for every (strategy, page size,
circuit length) cell. Per-cell randomness is derived independently from
the plan seed, so cells can run in any order (or in parallel) with
identical results.
"""

from __future__ import annotations

import json
import io
import csv
import math
import statistics
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import simnet
from .latency import LatencyGraph, init_graph
from .metrics import AnonymityDegree, anonymity_degree, degree_bw, degree_geo, degree_grp
from .paths import EXACT_LENGTH_LIMIT, EXACT_VERTEX_LIMIT, AnalyticalGraph
from .seeding import spawn_rng, stable_seed
from .strategies import (
    RANDOM_FALLBACK,
    STRATEGY_NAMES,
    Node,
    pmf_random,
    select_bw,
    select_geo,
    select_grp,
    select_random,
)

__all__ = [
    "CLIENT_ID",
    "ExperimentPlan",
    "CellStats",
    "DegreeReport",
    "ExperimentResult",
    "DensityPoint",
    "run_experiment",
    "degree_report",
    "density_sweep",
    "emit_results",
]

CLIENT_ID = "client"

CSV_HEADER = "strategy,page_kb,delta,min_s,max_s,avg_s,std_s,degree,fallback_rate"


@dataclass(frozen=True)
class ExperimentPlan:
    strategies: tuple[str, ...] = STRATEGY_NAMES
    page_sizes_kb: tuple[float, ...] = (50.0, 150.0, 320.0)
    circuit_lengths: tuple[int, ...] = (3, 4, 5, 6)
    repetitions: int = 100
    # Rounds of the probe loop before any grp circuit is built; the
    # default pushes analytical-graph density beyond ~0.7.
    warmup_rounds: int = 2500
    seed: int = 0
    home_country: str = "US"
    delta_t: int = 5
    probes_per_round: int = 3
    path_cap: int = 300
    max_iter: int = 5
    lb_samples: int = 20000

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if any(length < 2 for length in self.circuit_lengths):
            raise ValueError("circuit lengths must be >= 2")
        unknown = set(self.strategies) - set(STRATEGY_NAMES)
        if unknown:
            raise ValueError(f"unknown strategies {sorted(unknown)}")

    def to_json_obj(self) -> dict:
        return {
            "strategies": list(self.strategies),
            "page_sizes_kb": list(self.page_sizes_kb),
            "circuit_lengths": list(self.circuit_lengths),
            "repetitions": self.repetitions,
            "warmup_rounds": self.warmup_rounds,
            "seed": self.seed,
            "home_country": self.home_country,
            "delta_t": self.delta_t,
            "probes_per_round": self.probes_per_round,
            "path_cap": self.path_cap,
            "max_iter": self.max_iter,
            "lb_samples": self.lb_samples,
        }


@dataclass(frozen=True)
class CellStats:
    """Transfer-time statistics of one grid cell."""

    strategy: str
    page_kb: float
    circuit_len: int
    n: int
    min_s: float
    max_s: float
    avg_s: float
    std_s: float
    degree: Optional[float]
    fallback_rate: Optional[float]
    error: Optional[str] = None
    samples: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.error is None and not (self.min_s <= self.avg_s <= self.max_s):
            raise ValueError("cell stats violate min <= avg <= max")

    def to_json_obj(self) -> dict:
        return {
            "strategy": self.strategy,
            "page_kb": self.page_kb,
            "delta": self.circuit_len,
            "min_s": self.min_s,
            "max_s": self.max_s,
            "avg_s": self.avg_s,
            "std_s": self.std_s,
            "degree": self.degree,
            "fallback_rate": self.fallback_rate,
        }


@dataclass(frozen=True)
class DegreeReport:
    """Per-strategy anonymity degrees, computed once before the run."""

    rnd: float
    geo: float
    bw: AnonymityDegree
    grp: dict[int, AnonymityDegree]
    home_country: str
    home_count: int

    def value_for(self, strategy: str, circuit_len: int) -> float:
        if strategy == "rnd":
            return self.rnd
        if strategy == "geo":
            return self.geo
        if strategy == "bw":
            return self.bw.value
        if strategy == "grp":
            return self.grp[circuit_len].value
        raise ValueError(f"unknown strategy {strategy!r}")

    def to_json_obj(self) -> dict:
        return {
            "rnd": self.rnd,
            "geo": self.geo,
            "bw": {"value": self.bw.value, "estimated": self.bw.estimated},
            "grp": {
                str(length): {"value": d.value, "estimated": d.estimated}
                for length, d in sorted(self.grp.items())
            },
            "home_country": self.home_country,
            "home_count": self.home_count,
        }


@dataclass(frozen=True)
class ExperimentResult:
    plan: ExperimentPlan
    degrees: DegreeReport
    cells: tuple[CellStats, ...]

    @property
    def failed_cells(self) -> list[CellStats]:
        return [c for c in self.cells if c.error is not None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for cell in self.cells:
            if cell.error is not None:
                continue
            writer.writerow(
                [
                    cell.strategy,
                    repr(cell.page_kb),
                    cell.circuit_len,
                    repr(cell.min_s),
                    repr(cell.max_s),
                    repr(cell.avg_s),
                    repr(cell.std_s),
                    repr(cell.degree) if cell.degree is not None else "",
                    repr(cell.fallback_rate) if cell.fallback_rate is not None else "",
                ]
            )
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        return {
            "plan": self.plan.to_json_obj(),
            "degrees": self.degrees.to_json_obj(),
            "cells": [c.to_json_obj() for c in self.cells if c.error is None],
            "errors": [
                {"strategy": c.strategy, "page_kb": c.page_kb, "delta": c.circuit_len,
                 "error": c.error}
                for c in self.cells
                if c.error is not None
            ],
        }


def _build_network(plan: ExperimentPlan, config: simnet.SimConfig):
    rng_pop = spawn_rng(plan.seed, "population")
    spec = config.population_spec(rng_pop)
    population = simnet.generate_population(spec, rng_pop)
    model = replace(config.latency, seed=stable_seed(plan.seed, "latency"))
    graph = init_graph([n.id for n in population] + [CLIENT_ID], CLIENT_ID, 0)
    oracle = simnet.make_probe_oracle(model, population, CLIENT_ID)
    warm_rng = spawn_rng(plan.seed, "warmup")
    now = 0
    for _ in range(plan.warmup_rounds):
        now += plan.delta_t
        graph.measurement_round(oracle, plan.probes_per_round, now, warm_rng)
    return population, model, graph


def degree_report(
    plan: ExperimentPlan, population: Sequence[Node], graph: LatencyGraph
) -> DegreeReport:
    """Anonymity degree of each planned strategy on this network."""
    n = len(population)
    rnd = anonymity_degree(pmf_random(population), n).value
    home = sum(1 for node in population if node.country == plan.home_country)
    geo = degree_geo(home, n)
    bw = degree_bw([node.bandwidth for node in population])
    grp: dict[int, AnonymityDegree] = {}
    if "grp" in plan.strategies:
        analytical = graph.analytical_graph()
        for length in plan.circuit_lengths:
            grp[length] = degree_grp(
                analytical,
                length - 1,
                samples=plan.lb_samples,
                rng=spawn_rng(plan.seed, "lb", length),
            )
    return DegreeReport(
        rnd=rnd, geo=geo, bw=bw, grp=grp,
        home_country=plan.home_country, home_count=home,
    )


def _build_circuit(strategy, plan, population, graph, circuit_len, rng):
    if strategy == "rnd":
        return select_random(population, CLIENT_ID, circuit_len, rng)
    if strategy == "geo":
        return select_geo(population, CLIENT_ID, circuit_len, plan.home_country, rng)
    if strategy == "bw":
        return select_bw(population, CLIENT_ID, circuit_len, rng)
    if strategy == "grp":
        return select_grp(graph, CLIENT_ID, circuit_len, plan.path_cap, plan.max_iter, rng)
    raise ValueError(f"unknown strategy {strategy!r}")


def _run_cell(
    plan: ExperimentPlan,
    population: Sequence[Node],
    model: simnet.LatencyModel,
    graph: LatencyGraph,
    transfer: simnet.TransferModel,
    degrees: DegreeReport,
    strategy: str,
    page_kb: float,
    circuit_len: int,
) -> CellStats:
    rng = spawn_rng(plan.seed, "cell", strategy, page_kb, circuit_len)
    by_id = {n.id: n for n in population}
    by_id[CLIENT_ID] = simnet.client_node(CLIENT_ID)
    cell_model = replace(transfer, page_size=page_kb)
    samples: list[float] = []
    fallbacks = 0
    try:
        degree = degrees.value_for(strategy, circuit_len)
        for _ in range(plan.repetitions):
            circuit = _build_circuit(strategy, plan, population, graph, circuit_len, rng)
            if circuit.provenance == RANDOM_FALLBACK:
                fallbacks += 1
            latencies = [
                simnet.draw_link_latency(model, by_id[a], by_id[b], rng)
                for a, b in circuit.links
            ]
            bandwidths = [by_id[r].bandwidth for r in circuit.relays]
            samples.append(simnet.transfer_time(cell_model, circuit, latencies, bandwidths))
    except ValueError as exc:
        return CellStats(
            strategy=strategy, page_kb=page_kb, circuit_len=circuit_len,
            n=0, min_s=math.nan, max_s=math.nan, avg_s=math.nan, std_s=math.nan,
            degree=None, fallback_rate=None, error=str(exc),
        )
    return CellStats(
        strategy=strategy,
        page_kb=page_kb,
        circuit_len=circuit_len,
        n=len(samples),
        min_s=min(samples),
        max_s=max(samples),
        avg_s=math.fsum(samples) / len(samples),
        std_s=statistics.pstdev(samples),
        degree=degree,
        fallback_rate=fallbacks / len(samples) if strategy == "grp" else None,
        samples=tuple(samples),
    )


def run_experiment(plan: ExperimentPlan, config: Optional[simnet.SimConfig] = None) -> ExperimentResult:
    """Run the full grid; cell errors are recorded, not raised."""
    if config is None:
        config = simnet.default_config()
    population, model, graph = _build_network(plan, config)
    degrees = degree_report(plan, population, graph)
    cells = [
        _run_cell(plan, population, model, graph, config.transfer, degrees,
                  strategy, page_kb, circuit_len)
        for strategy in plan.strategies
        for page_kb in plan.page_sizes_kb
        for circuit_len in plan.circuit_lengths
    ]
    return ExperimentResult(plan=plan, degrees=degrees, cells=tuple(cells))


@dataclass(frozen=True)
class DensityPoint:
    density: float
    mean: Optional[float]
    std: float
    values: tuple[float, ...]
    failures: int

    @property
    def stderr(self) -> float:
        if not self.values:
            return math.inf
        return self.std / math.sqrt(len(self.values))


def density_sweep(
    vertex_count: int,
    path_len: int,
    densities: Sequence[float],
    trials: int,
    rng,
) -> list[DensityPoint]:
    """Mean latency-graph anonymity degree of random graphs per density.

    Each point samples ``trials`` graphs with the given fraction of all
    possible edges. Degrees are computed exactly, so the vertex count
    must stay within the exact-enumeration limits. Trials whose graph
    has no path of the requested length count as failures; a point where
    every trial fails gets mean None (a gap in the curve).
    """
    if vertex_count > EXACT_VERTEX_LIMIT or path_len > EXACT_LENGTH_LIMIT:
        raise ValueError(
            f"instance too large: sweep needs <= {EXACT_VERTEX_LIMIT} vertices "
            f"and length <= {EXACT_LENGTH_LIMIT}"
        )
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ids = sorted(f"v{i:02d}" for i in range(vertex_count))
    all_pairs = [
        (ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))
    ]
    points = []
    for density in densities:
        if not 0.0 <= density <= 1.0:
            raise ValueError(f"density {density!r} outside [0, 1]")
        edge_count = round(density * len(all_pairs))
        values = []
        failures = 0
        for _ in range(trials):
            edges = frozenset(rng.sample(all_pairs, edge_count))
            graph = AnalyticalGraph(frozenset(ids), edges, {e: 1.0 for e in edges})
            try:
                values.append(degree_grp(graph, path_len).value)
            except ValueError:
                failures += 1
        points.append(
            DensityPoint(
                density=density,
                mean=math.fsum(values) / len(values) if values else None,
                std=statistics.pstdev(values) if values else math.nan,
                values=tuple(values),
                failures=failures,
            )
        )
    return points


def emit_results(result: ExperimentResult, format: str, path) -> None:
    """Write the result as CSV or JSON; identical results give identical bytes."""
    if format == "csv":
        payload = result.to_csv()
    elif format == "json":
        payload = json.dumps(result.to_json_obj(), indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown format {format!r}; expected csv or json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)
