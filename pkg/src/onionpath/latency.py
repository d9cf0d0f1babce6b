"""Dynamic latency graph maintained by a background probe loop.

The graph is undirected over the relay population plus the client
vertex. Each probed pair carries a label ``(latency_ms, measured_at)``;
an unreachable pair keeps its last known latency but drops out of the
edge set until a later probe succeeds. Repeated measurements of one
edge are blended with a moving average whose weight on the old value
shrinks with its staleness, so long-unprobed edges respond quickly to
fresh data.

In simulation, timestamps are a logical clock (integer ticks); any
monotone millisecond clock works in live use.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .paths import AnalyticalGraph

__all__ = [
    "EdgeLabel",
    "LatencyGraph",
    "ProbeOracle",
    "edge_key",
    "init_graph",
    "smoothing_factor",
]

Timestamp = float
Edge = tuple[str, str]

# (edge, time) -> latency in ms, or None when the pair is unreachable.
ProbeOracle = Callable[[Edge, Timestamp], Optional[float]]


def edge_key(a: str, b: str) -> Edge:
    """Canonical unordered pair; rejects self-edges."""
    if a == b:
        raise ValueError(f"self-edge {a!r}")
    return (a, b) if a < b else (b, a)


def smoothing_factor(t0: Timestamp, t_prev: Timestamp, t_now: Timestamp) -> float:
    """Weight kept by the previous latency estimate.

    The weight is the previous measurement's age fraction of the run,
    (t_prev - t0) / (t_now - t0): a measurement taken long ago (t_prev
    close to t0) keeps almost nothing, a recent one keeps almost all.
    """
    if not t0 <= t_prev <= t_now:
        raise ValueError(f"timestamps out of order: {t0!r}, {t_prev!r}, {t_now!r}")
    if t_now == t0:
        raise ValueError("zero elapsed time since start")
    return (t_prev - t0) / (t_now - t0)


@dataclass(frozen=True)
class EdgeLabel:
    """Last latency estimate for a pair; ``latency`` None means never measured."""

    latency: Optional[float]
    measured_at: Timestamp


class LatencyGraph:
    """Mutable latency graph with one-writer/many-reader locking.

    All mutation goes through :meth:`update_label` (directly or via
    :meth:`measurement_round`) under an internal lock; readers take
    consistent copies via :meth:`snapshot`, :meth:`analytical_graph` or
    :meth:`path_view`. Single-threaded stepping needs no extra care.
    """

    def __init__(self, vertices: Iterable[str], client: str, t0: Timestamp):
        verts = frozenset(vertices)
        if client not in verts:
            raise ValueError(f"client {client!r} not among vertices")
        if len(verts) < 2:
            raise ValueError("need at least 2 vertices to form an edge")
        self.vertices = verts
        self.client = client
        self.start_time = t0
        self.edges: set[Edge] = set()
        self.labels: dict[Edge, EdgeLabel] = {}
        self._sorted_vertices = sorted(verts)
        self._lock = threading.RLock()

    def label(self, a: str, b: str) -> EdgeLabel:
        """Label of the pair, defaulting to unmeasured-at-start."""
        key = edge_key(a, b)
        self._check_known(key)
        with self._lock:
            return self.labels.get(key, EdgeLabel(None, self.start_time))

    def _check_known(self, key: Edge) -> None:
        for v in key:
            if v not in self.vertices:
                raise ValueError(f"unknown vertex {v!r}")

    def update_label(self, edge: Edge, new_latency: Optional[float], t_now: Timestamp) -> None:
        """Apply one probe result to the pair ``edge`` at time ``t_now``.

        Unreachable: the edge leaves the edge set, its last label is
        retained. First measurement: the reading is stored as-is.
        Otherwise the reading is blended with the previous estimate,
        weighted by that estimate's recency.
        """
        key = edge_key(*edge)
        self._check_known(key)
        with self._lock:
            prev = self.labels.get(key, EdgeLabel(None, self.start_time))
            if t_now < prev.measured_at:
                raise ValueError(
                    f"time regression: {t_now!r} before {prev.measured_at!r} on {key!r}"
                )
            if new_latency is None:
                self.edges.discard(key)
                return
            if new_latency < 0:
                raise ValueError(f"negative latency {new_latency!r}")
            if prev.latency is None:
                self.labels[key] = EdgeLabel(new_latency, t_now)
            else:
                weight = smoothing_factor(self.start_time, prev.measured_at, t_now)
                blended = weight * prev.latency + (1.0 - weight) * new_latency
                self.labels[key] = EdgeLabel(blended, t_now)
            self.edges.add(key)

    def measurement_round(
        self,
        oracle: ProbeOracle,
        probes_per_round: int,
        t_now: Timestamp,
        rng,
    ) -> None:
        """Probe ``probes_per_round`` uniformly random pairs at ``t_now``.

        Pairs are drawn with replacement over the complete graph on the
        vertex set (client included); a repeated draw just updates the
        same edge again.
        """
        if probes_per_round < 1:
            raise ValueError("probes_per_round must be >= 1")
        for _ in range(probes_per_round):
            a, b = rng.sample(self._sorted_vertices, 2)
            key = edge_key(a, b)
            self.update_label(key, oracle(key, t_now), t_now)

    def snapshot(self) -> "LatencyGraph":
        """Independent copy safe to read while probing continues."""
        with self._lock:
            copy = LatencyGraph(self.vertices, self.client, self.start_time)
            copy.edges = set(self.edges)
            copy.labels = dict(self.labels)
            return copy

    def _weighted_view(self, vertices: frozenset[str], edges: Iterable[Edge]) -> AnalyticalGraph:
        kept = frozenset(edges)
        return AnalyticalGraph(
            vertices=vertices,
            edges=kept,
            edge_weight={e: self.labels[e].latency for e in kept},
        )

    def path_view(self) -> AnalyticalGraph:
        """Weighted snapshot over all vertices, for circuit path search."""
        with self._lock:
            return self._weighted_view(self.vertices, self.edges)

    def analytical_graph(self) -> AnalyticalGraph:
        """Snapshot with the client vertex and its incident edges removed.

        This is the adversary-visible object the anonymity degree of the
        latency-graph strategy is computed on.
        """
        with self._lock:
            rest = self.vertices - {self.client}
            kept = [e for e in self.edges if self.client not in e]
            return self._weighted_view(frozenset(rest), kept)

    def to_json(self) -> str:
        """Serialise the full state.

        ``edges`` holds the current edge set; ``history`` holds labels
        retained for pairs currently out of the edge set, so a
        round-trip is lossless.
        """
        with self._lock:
            def entry(key: Edge) -> dict:
                lab = self.labels[key]
                return {
                    "a": key[0],
                    "b": key[1],
                    "latency_ms": lab.latency,
                    "measured_at": lab.measured_at,
                }

            doc = {
                "vertices": self._sorted_vertices,
                "edges": [entry(k) for k in sorted(self.edges)],
                "history": [
                    entry(k) for k in sorted(self.labels) if k not in self.edges
                ],
                "client": self.client,
                "t0": self.start_time,
            }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LatencyGraph":
        doc = json.loads(text)
        graph = cls(doc["vertices"], doc["client"], doc["t0"])
        for entry in doc["edges"]:
            key = edge_key(entry["a"], entry["b"])
            graph.labels[key] = EdgeLabel(entry["latency_ms"], entry["measured_at"])
            graph.edges.add(key)
        for entry in doc.get("history", []):
            key = edge_key(entry["a"], entry["b"])
            graph.labels[key] = EdgeLabel(entry["latency_ms"], entry["measured_at"])
        return graph


def init_graph(vertices: Iterable[str], client: str, t0: Timestamp) -> LatencyGraph:
    """Fresh graph: no edges, every pair unmeasured as of ``t0``."""
    return LatencyGraph(vertices, client, t0)
