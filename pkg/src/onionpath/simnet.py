"""Synthetic overlay network: population, probe oracle, transfer model.

Stands in for a real testbed. Node counts per country follow a shipped
default distribution; bandwidths are k-means centroids of a sample
(synthetic log-normal by default, replaceable with real measurements
via the config file), assigned to nodes at random and independently of
country. Pairwise latency is a base (intra- vs inter-country) plus a
stable per-pair offset plus exponential jitter, with a per-probe outage
probability; transfer time is summed link latency scaled by a handshake
factor, per-hop processing, and page size over the slowest relay.

Everything is seeded: the per-pair offset and the probe jitter streams
are derived from (seed, pair, time), so probe order never changes
results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Mapping, Optional, Sequence

from .latency import ProbeOracle, edge_key
from .seeding import spawn_rng, stable_unit
from .strategies import Circuit, Node

__all__ = [
    "PopulationSpec",
    "LatencyModel",
    "TransferModel",
    "SimConfig",
    "kmeans",
    "generate_population",
    "client_node",
    "pair_offset",
    "expected_latency",
    "probe",
    "make_probe_oracle",
    "draw_link_latency",
    "transfer_time",
    "load_config",
    "default_config",
]


@dataclass(frozen=True)
class PopulationSpec:
    """Country layout and the bandwidth sample to cluster."""

    country_counts: Mapping[str, int]
    total: int
    bandwidth_sample: tuple[float, ...]
    cluster_count: int

    def __post_init__(self) -> None:
        if self.total < 1:
            raise ValueError("total must be >= 1")
        if any(c < 0 for c in self.country_counts.values()):
            raise ValueError("negative country count")
        if sum(self.country_counts.values()) != self.total:
            raise ValueError(
                f"country counts sum to {sum(self.country_counts.values())}, "
                f"expected total {self.total}"
            )
        if any(b <= 0 for b in self.bandwidth_sample):
            raise ValueError("bandwidth sample must be positive")
        if not 1 <= self.cluster_count <= len(self.bandwidth_sample):
            raise ValueError("cluster_count must be within the sample size")


@dataclass(frozen=True)
class LatencyModel:
    """Pairwise latency distribution parameters, all milliseconds."""

    intra_country_base: float = 40.0
    inter_country_base: float = 200.0
    jitter_scale: float = 50.0
    down_probability: float = 0.05
    pair_offset_scale: float = 40.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.intra_country_base < 0 or self.inter_country_base < self.intra_country_base:
            raise ValueError("bases must satisfy 0 <= intra <= inter")
        if self.jitter_scale < 0 or self.pair_offset_scale < 0:
            raise ValueError("scales must be >= 0")
        if not 0.0 <= self.down_probability <= 1.0:
            raise ValueError("down_probability outside [0, 1]")


@dataclass(frozen=True)
class TransferModel:
    """Linear page-transfer cost model."""

    handshake_per_link: float = 5.0
    processing_per_node: float = 10.0
    page_size: float = 320.0

    def __post_init__(self) -> None:
        if self.handshake_per_link < 0 or self.processing_per_node < 0 or self.page_size < 0:
            raise ValueError("transfer parameters must be >= 0")


def kmeans(values: Sequence[float], cluster_count: int, max_rounds: int = 100, rng=None) -> list[float]:
    """Lloyd's iteration on 1-D data; returns centroids sorted ascending.

    Seeding samples distinct values (padding with repeats only when the
    sample has fewer distinct values than clusters). Assignment ties go
    to the lower centroid index; empty clusters keep their centroid.
    Stops at an assignment fixpoint or after ``max_rounds``.
    """
    vals = list(values)
    if not 1 <= cluster_count <= len(vals):
        raise ValueError(f"cluster_count {cluster_count} outside 1..{len(vals)}")
    uniq = sorted(set(vals))
    if cluster_count <= len(uniq):
        centroids = sorted(rng.sample(uniq, cluster_count))
    else:
        centroids = list(uniq)
        while len(centroids) < cluster_count:
            centroids.append(uniq[rng.randrange(len(uniq))])
        centroids.sort()

    assignment: list[int] = []
    for _ in range(max_rounds):
        new_assignment = [
            min(range(len(centroids)), key=lambda i: (abs(v - centroids[i]), i))
            for v in vals
        ]
        if new_assignment == assignment:
            break
        assignment = new_assignment
        for i in range(len(centroids)):
            members = [v for v, a in zip(vals, assignment) if a == i]
            if members:
                centroids[i] = math.fsum(members) / len(members)
    return sorted(centroids)


def generate_population(spec: PopulationSpec, rng) -> list[Node]:
    """Nodes matching the country counts, bandwidths drawn from centroids.

    Each node gets the centroid of a uniformly random cluster; country
    and bandwidth are independent.
    """
    centroids = kmeans(spec.bandwidth_sample, spec.cluster_count, rng=rng)
    nodes: list[Node] = []
    for country in sorted(spec.country_counts):
        for i in range(spec.country_counts[country]):
            bandwidth = centroids[rng.randrange(len(centroids))]
            nodes.append(Node(id=f"{country}-{i:03d}", country=country, bandwidth=bandwidth))
    return nodes


def client_node(client_id: str) -> Node:
    """Pseudo-node for the client vertex; its links always use the inter base."""
    return Node(id=client_id, country="__client__", bandwidth=1.0)


def _base(model: LatencyModel, a: Node, b: Node) -> float:
    return model.intra_country_base if a.country == b.country else model.inter_country_base


def _distance_factor(model: LatencyModel, a: Node, b: Node) -> float:
    # Noise grows with the number of network elements on the route;
    # base latency is the proxy, so intra-country pairs are both faster
    # and steadier. Inter-country pairs keep the full configured scales.
    if model.inter_country_base <= 0:
        return 1.0
    return _base(model, a, b) / model.inter_country_base


def pair_offset(model: LatencyModel, a: Node, b: Node) -> float:
    """Stable per-pair latency offset, up to pair_offset_scale for far pairs."""
    unit = stable_unit("pair-offset", model.seed, edge_key(a.id, b.id))
    return unit * model.pair_offset_scale * _distance_factor(model, a, b)


def expected_latency(model: LatencyModel, a: Node, b: Node) -> float:
    """Mean latency of the pair excluding jitter."""
    return _base(model, a, b) + pair_offset(model, a, b)


def probe(model: LatencyModel, a: Node, b: Node, t: float, rng) -> Optional[float]:
    """One latency measurement, or None when the pair is down.

    Symmetric in (a, b) apart from the jitter draw; with jitter disabled
    the result is fully deterministic.
    """
    if a.id == b.id:
        raise ValueError("cannot probe a node against itself")
    if model.down_probability > 0 and rng.random() < model.down_probability:
        return None
    return expected_latency(model, a, b) + _jitter(model, a, b, rng)


def _jitter(model: LatencyModel, a: Node, b: Node, rng) -> float:
    scale = model.jitter_scale * _distance_factor(model, a, b)
    if scale <= 0:
        return 0.0
    return rng.expovariate(1.0 / scale)


def make_probe_oracle(model: LatencyModel, population: Sequence[Node], client: str) -> ProbeOracle:
    """Probe callable for the measurement loop over this population.

    The client vertex participates like any relay; its latencies use the
    inter-country base (the client is assumed outside every relay's
    network). Each call derives its randomness from (seed, pair, time).
    """
    by_id = {n.id: n for n in population}
    pseudo = client_node(client)

    def lookup(vertex: str) -> Node:
        if vertex == client:
            return pseudo
        return by_id[vertex]

    def oracle(edge, t):
        a, b = edge
        rng = spawn_rng("probe", model.seed, edge_key(a, b), t)
        return probe(model, lookup(a), lookup(b), t, rng)

    return oracle


def draw_link_latency(model: LatencyModel, a: Node, b: Node, rng) -> float:
    """Realised latency of an established link (no outage branch)."""
    return expected_latency(model, a, b) + _jitter(model, a, b, rng)


def transfer_time(
    model: TransferModel,
    circuit: Circuit,
    link_latencies: Sequence[float],
    bandwidths: Sequence[float],
) -> float:
    """Seconds to move one page through the circuit.

    Summed link latency scaled by the handshake factor, plus per-node
    processing, plus page size over the slowest relay bandwidth.
    """
    if len(link_latencies) != circuit.length:
        raise ValueError(
            f"{len(link_latencies)} latencies for a length-{circuit.length} circuit"
        )
    if len(bandwidths) != circuit.length:
        raise ValueError(
            f"{len(bandwidths)} bandwidths for a length-{circuit.length} circuit"
        )
    if any(bw <= 0 for bw in bandwidths):
        raise ValueError("bandwidths must be positive")
    handshake = math.fsum(link_latencies) * model.handshake_per_link / 1000.0
    processing = circuit.length * model.processing_per_node / 1000.0
    return handshake + processing + model.page_size / min(bandwidths)


@dataclass(frozen=True)
class SimConfig:
    """Parsed configuration: population layout plus both models.

    ``bandwidth_sample`` may be None, in which case a log-normal sample
    of ``bandwidth_sample_size`` values is synthesised from the run seed
    when the population spec is built.
    """

    country_counts: Mapping[str, int]
    total: int
    cluster_count: int
    bandwidth_sample: Optional[tuple[float, ...]]
    bandwidth_sample_size: int
    latency: LatencyModel
    transfer: TransferModel

    def population_spec(self, rng) -> PopulationSpec:
        sample = self.bandwidth_sample
        if sample is None:
            # Log-normal spread with a floor: relays advertise at least a
            # minimum provisioned rate, which keeps worst-case page terms
            # bounded.
            sample = tuple(
                max(rng.lognormvariate(math.log(400.0), 0.6), 150.0)
                for _ in range(self.bandwidth_sample_size)
            )
        return PopulationSpec(
            country_counts=dict(self.country_counts),
            total=self.total,
            bandwidth_sample=sample,
            cluster_count=self.cluster_count,
        )


def _config_from_dict(doc: dict) -> SimConfig:
    pop = doc["population"]
    lat = doc.get("latency", {})
    tr = doc.get("transfer", {})
    sample = pop.get("bandwidth_sample")
    return SimConfig(
        country_counts=dict(pop["countries"]),
        total=int(pop["total"]),
        cluster_count=int(pop.get("cluster_count", pop["total"])),
        bandwidth_sample=tuple(sample) if sample else None,
        bandwidth_sample_size=int(pop.get("bandwidth_sample_size", 300)),
        latency=LatencyModel(
            intra_country_base=float(lat.get("intra_ms", 40.0)),
            inter_country_base=float(lat.get("inter_ms", 200.0)),
            jitter_scale=float(lat.get("jitter_ms", 30.0)),
            down_probability=float(lat.get("down_prob", 0.05)),
            pair_offset_scale=float(lat.get("offset_ms", 40.0)),
        ),
        transfer=TransferModel(
            handshake_per_link=float(tr.get("handshake_per_link", 5.0)),
            processing_per_node=float(tr.get("processing_ms", 10.0)),
            page_size=float(tr.get("page_kb", 320.0)),
        ),
    )


def load_config(path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return _config_from_dict(json.load(fh))


def default_config() -> SimConfig:
    """Shipped default: 100 nodes distributed over 19 country buckets."""
    text = resources.files("onionpath.data").joinpath("table1.json").read_text("utf-8")
    return _config_from_dict(json.loads(text))
