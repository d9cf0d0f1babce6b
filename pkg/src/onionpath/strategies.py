"""Circuit construction strategies behind one common interface.

Four selectors are provided: uniformly random, restricted to the
client's country, bandwidth-proportional, and latency-graph driven
(lowest-latency path of the requested length found in the measured
graph, with a uniform fallback when the graph is too sparse to supply
one). Each strategy also exposes its analytical single-node selection
distribution for the metrics layer.
"""

from __future__ import annotations

import json
import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .latency import LatencyGraph
from .metrics import Pmf
from .paths import (
    AnalyticalGraph,
    betweenness_estimate,
    betweenness_table,
    kpaths,
    within_exact_limits,
)

__all__ = [
    "STRATEGY_NAMES",
    "Node",
    "Circuit",
    "select_random",
    "select_geo",
    "select_bw",
    "select_grp",
    "pmf_random",
    "pmf_geo",
    "pmf_bw",
    "pmf_grp",
    "strategy_pmf",
]

STRATEGY_NAMES = ("rnd", "geo", "bw", "grp")

GRAPH_PATH = "graph-path"
RANDOM_FALLBACK = "random-fallback"


@dataclass(frozen=True)
class Node:
    """Overlay relay: identity, country code, advertised bandwidth (KB/s)."""

    id: str
    country: str
    bandwidth: float

    def __post_init__(self) -> None:
        if not self.country:
            raise ValueError(f"node {self.id!r} has empty country")
        if not self.bandwidth > 0:
            raise ValueError(f"node {self.id!r} has non-positive bandwidth")


@dataclass(frozen=True)
class Circuit:
    """Ordered relay sequence for one client connection.

    ``relays[0]`` is the entry, ``relays[-1]`` the exit; ``links`` chains
    the client through every relay, so circuit length equals both the
    relay count and the link count.
    """

    client: str
    relays: tuple[str, ...]
    links: tuple[tuple[str, str], ...]
    provenance: Optional[str] = None

    def __post_init__(self) -> None:
        if len(set(self.relays)) != len(self.relays):
            raise ValueError("repeated relay in circuit")
        if self.client in self.relays:
            raise ValueError("client cannot relay its own circuit")
        expected = _links_for(self.client, self.relays)
        if self.links != expected:
            raise ValueError(f"links {self.links!r} do not chain the relays")

    @property
    def length(self) -> int:
        return len(self.relays)

    @classmethod
    def from_relays(
        cls, client: str, relays: Sequence[str], provenance: Optional[str] = None
    ) -> "Circuit":
        relays = tuple(relays)
        return cls(client, relays, _links_for(client, relays), provenance)

    def to_json(self) -> str:
        return json.dumps(
            {"client": self.client, "relays": list(self.relays), "provenance": self.provenance}
        )


def _links_for(client: str, relays: Sequence[str]) -> tuple[tuple[str, str], ...]:
    hops = [client, *relays]
    return tuple(zip(hops, hops[1:]))


def _check_pool(nodes: Sequence[Node], client: str, circuit_len: int) -> None:
    if circuit_len < 1:
        raise ValueError("circuit length must be >= 1")
    if any(node.id == client for node in nodes):
        raise ValueError("client must not appear in the relay pool")
    if len(nodes) < circuit_len:
        raise ValueError(
            f"insufficient nodes: {len(nodes)} available, {circuit_len} needed"
        )


def _draw_without_replacement(ids: Sequence[str], count: int, rng) -> list[str]:
    pool = sorted(ids)
    picked = []
    for _ in range(count):
        picked.append(pool.pop(rng.randrange(len(pool))))
    return picked


def select_random(nodes: Sequence[Node], client: str, circuit_len: int, rng) -> Circuit:
    """Uniform selection without replacement over the whole pool."""
    _check_pool(nodes, client, circuit_len)
    relays = _draw_without_replacement([n.id for n in nodes], circuit_len, rng)
    return Circuit.from_relays(client, relays)


def select_geo(
    nodes: Sequence[Node], client: str, circuit_len: int, home_country: str, rng
) -> Circuit:
    """Uniform selection restricted to relays in ``home_country``."""
    _check_pool(nodes, client, circuit_len)
    local = [n.id for n in nodes if n.country == home_country]
    if len(local) < circuit_len:
        raise ValueError(
            f"country too small: {len(local)} nodes in {home_country!r}, "
            f"{circuit_len} needed"
        )
    relays = _draw_without_replacement(local, circuit_len, rng)
    return Circuit.from_relays(client, relays)


def select_bw(nodes: Sequence[Node], client: str, circuit_len: int, rng) -> Circuit:
    """Bandwidth-proportional selection without replacement.

    Hops are drawn by inverse CDF over the bandwidth shares (nodes
    sorted by ascending bandwidth, ties broken by id); a draw landing on
    an already-chosen node is rejected and redrawn, which always
    terminates because some unchosen node keeps positive mass.
    """
    _check_pool(nodes, client, circuit_len)
    ordered = sorted(nodes, key=lambda n: (n.bandwidth, n.id))
    total = math.fsum(n.bandwidth for n in ordered)
    cumulative = []
    acc = 0.0
    for node in ordered:
        acc += node.bandwidth / total
        cumulative.append(acc)

    chosen: list[str] = []
    taken = set()
    while len(chosen) < circuit_len:
        idx = bisect.bisect_right(cumulative, rng.random())
        idx = min(idx, len(ordered) - 1)
        node_id = ordered[idx].id
        if node_id in taken:
            continue
        taken.add(node_id)
        chosen.append(node_id)
    return Circuit.from_relays(client, chosen)


def select_grp(
    graph: LatencyGraph,
    client: str,
    circuit_len: int,
    k: int,
    max_iter: int,
    rng,
) -> Circuit:
    """Lowest-latency path selection over the measured graph.

    Up to ``max_iter`` times: draw an exit uniformly (repeats across
    attempts allowed), search for at most ``k`` simple paths of
    ``circuit_len`` edges from the client to it, and on success return
    the found path with the smallest summed edge latency (first found
    wins ties). If every attempt fails, fall back to a uniformly random
    circuit, flagged accordingly.
    """
    if client not in graph.vertices:
        raise ValueError(f"client {client!r} not in graph")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    others = sorted(graph.vertices - {client})
    if len(others) < circuit_len:
        raise ValueError(
            f"insufficient vertices: {len(others)} candidates, {circuit_len} needed"
        )
    view = graph.path_view()
    for _ in range(max_iter):
        exit_node = others[rng.randrange(len(others))]
        found = kpaths(view, client, exit_node, circuit_len, k, rng)
        if found:
            best = min(found, key=lambda p: view.path_weight(p.vertices))
            return Circuit.from_relays(client, best.vertices[1:], GRAPH_PATH)
    relays = _draw_without_replacement(others, circuit_len, rng)
    return Circuit.from_relays(client, relays, RANDOM_FALLBACK)


def pmf_random(nodes: Sequence[Node]) -> Pmf:
    return Pmf.uniform(n.id for n in nodes)


def pmf_geo(nodes: Sequence[Node], home_country: str) -> Pmf:
    local = [n for n in nodes if n.country == home_country]
    if not local:
        raise ValueError(f"empty country {home_country!r}")
    share = 1.0 / len(local)
    return Pmf({n.id: share if n.country == home_country else 0.0 for n in nodes})


def pmf_bw(nodes: Sequence[Node]) -> Pmf:
    total = math.fsum(n.bandwidth for n in nodes)
    return Pmf({n.id: n.bandwidth / total for n in nodes})


def pmf_grp(
    graph: AnalyticalGraph,
    path_len: int,
    *,
    samples: int = 20000,
    rng=None,
) -> Pmf:
    if within_exact_limits(graph, path_len):
        table = betweenness_table(graph, path_len)
    else:
        if rng is None:
            raise ValueError("graph beyond exact limits: pass rng for the estimator")
        table = betweenness_estimate(graph, path_len, samples, rng)
    return Pmf(table.lb)


def strategy_pmf(
    strategy: str,
    *,
    nodes: Optional[Sequence[Node]] = None,
    home_country: Optional[str] = None,
    graph: Optional[AnalyticalGraph] = None,
    path_len: Optional[int] = None,
    samples: int = 20000,
    rng=None,
) -> Pmf:
    """Analytical single-node selection distribution of a strategy by name."""
    if strategy == "rnd":
        return pmf_random(_required(nodes, "nodes"))
    if strategy == "geo":
        return pmf_geo(_required(nodes, "nodes"), _required(home_country, "home_country"))
    if strategy == "bw":
        return pmf_bw(_required(nodes, "nodes"))
    if strategy == "grp":
        return pmf_grp(
            _required(graph, "graph"),
            _required(path_len, "path_len"),
            samples=samples,
            rng=rng,
        )
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGY_NAMES}")


def _required(value, name):
    if value is None:
        raise ValueError(f"strategy requires {name}")
    return value
