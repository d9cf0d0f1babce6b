"""Fixed-length simple-path enumeration and path-betweenness tables.

The latency-graph strategy picks relays from short weighted paths, so
its selection distribution is governed by how often each vertex sits on
a simple path of a given edge length, counted over all ordered vertex
pairs. Endpoints count as "on" their own paths: entry and exit relays
are selected circuit members and must carry probability mass.

Exact enumeration is deliberately capped (default 20 vertices, 6
edges); beyond that the sampled estimator must be used explicitly.

Walk counts on complete graphs are also provided in closed form; walks
may revisit vertices, so for lengths >= 3 they overcount simple paths.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field
from typing import Iterator, Mapping

__all__ = [
    "EXACT_VERTEX_LIMIT",
    "EXACT_LENGTH_LIMIT",
    "AnalyticalGraph",
    "SimplePath",
    "BetweennessTable",
    "kpaths",
    "count_paths",
    "betweenness_table",
    "betweenness_estimate",
    "within_exact_limits",
    "walks_between",
    "walks_closed",
    "total_walks",
]

Edge = tuple[str, str]

EXACT_VERTEX_LIMIT = 20
EXACT_LENGTH_LIMIT = 6


@dataclass(frozen=True)
class AnalyticalGraph:
    """Immutable weighted undirected graph snapshot."""

    vertices: frozenset[str]
    edges: frozenset[Edge]
    edge_weight: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-edge {a!r}")
            if a > b:
                raise ValueError(f"edge {(a, b)!r} not in canonical order")
            if a not in self.vertices or b not in self.vertices:
                raise ValueError(f"edge {(a, b)!r} over unknown vertices")
        for edge, w in self.edge_weight.items():
            if edge not in self.edges:
                raise ValueError(f"weight for unknown edge {edge!r}")
            if not w >= 0:
                raise ValueError(f"weight {w!r} for {edge!r} not finite >= 0")

    @classmethod
    def complete(cls, vertices, weight: float = 1.0) -> "AnalyticalGraph":
        ids = sorted(set(vertices))
        edges = frozenset(
            (ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))
        )
        return cls(frozenset(ids), edges, {e: weight for e in edges})

    def adjacency(self) -> dict[str, list[str]]:
        """Sorted neighbour lists (deterministic iteration order); cached."""
        cached = self.__dict__.get("_adjacency")
        if cached is not None:
            return cached
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for nbrs in adj.values():
            nbrs.sort()
        object.__setattr__(self, "_adjacency", adj)
        return adj

    def neighbour_sets(self) -> dict[str, set[str]]:
        cached = self.__dict__.get("_neighbour_sets")
        if cached is not None:
            return cached
        sets = {v: set(nbrs) for v, nbrs in self.adjacency().items()}
        object.__setattr__(self, "_neighbour_sets", sets)
        return sets

    def density(self) -> float:
        n = len(self.vertices)
        if n < 2:
            return 0.0
        return 2.0 * len(self.edges) / (n * (n - 1))

    def path_weight(self, vertices) -> float:
        """Sum of edge weights along a vertex sequence."""
        total = 0.0
        for a, b in zip(vertices, vertices[1:]):
            key = (a, b) if a < b else (b, a)
            total += self.edge_weight[key]
        return total


@dataclass(frozen=True)
class SimplePath:
    """Simple path recorded as its vertex sequence."""

    vertices: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ValueError("path needs at least one edge")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError(f"repeated vertex in path {self.vertices!r}")

    @property
    def length_in_edges(self) -> int:
        return len(self.vertices) - 1


def within_exact_limits(graph: AnalyticalGraph, length: int) -> bool:
    return len(graph.vertices) <= EXACT_VERTEX_LIMIT and length <= EXACT_LENGTH_LIMIT


def kpaths(
    graph: AnalyticalGraph,
    source: str,
    target: str,
    length: int,
    k: int,
    rng,
) -> list[SimplePath]:
    """Collect up to ``k`` simple paths of exactly ``length`` edges.

    Depth-first search with neighbour lists shuffled by ``rng`` at every
    expansion: which paths are found first (and therefore kept when more
    than ``k`` exist) is random but reproducible per seed. The target is
    never entered early, so it cannot appear as an intermediate hop.
    Returns an empty list when no such path exists.
    """
    if source == target:
        raise ValueError("source and target must differ")
    for v in (source, target):
        if v not in graph.vertices:
            raise ValueError(f"unknown vertex {v!r}")
    if length < 1:
        raise ValueError("length must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")

    adj = graph.adjacency()
    neighbour_sets = graph.neighbour_sets()
    found: list[SimplePath] = []
    path = [source]
    visited = {source}

    def walk() -> None:
        edges_used = len(path) - 1
        if edges_used == length - 1:
            # Only the target can complete the path; expanding the other
            # neighbours would dead-end one level down.
            if target not in visited and target in neighbour_sets[path[-1]]:
                found.append(SimplePath((*path, target)))
            return
        candidates = [v for v in adj[path[-1]] if v not in visited]
        rng.shuffle(candidates)
        for vertex in candidates:
            if vertex == target:
                continue
            path.append(vertex)
            visited.add(vertex)
            walk()
            visited.remove(vertex)
            path.pop()
            if len(found) >= k:
                return

    walk()
    return found


def _paths_from(adj: dict[str, list[str]], source: str, length: int) -> Iterator[tuple[str, ...]]:
    """Yield every simple path of exactly ``length`` edges starting at ``source``."""
    path = [source]
    visited = {source}

    def walk() -> Iterator[tuple[str, ...]]:
        if len(path) == length:
            for vertex in adj[path[-1]]:
                if vertex not in visited:
                    yield (*path, vertex)
            return
        for vertex in adj[path[-1]]:
            if vertex in visited:
                continue
            path.append(vertex)
            visited.add(vertex)
            yield from walk()
            visited.remove(vertex)
            path.pop()

    yield from walk()


def _require_exact(graph: AnalyticalGraph, length: int) -> None:
    if not within_exact_limits(graph, length):
        raise ValueError(
            f"instance too large for exact enumeration "
            f"({len(graph.vertices)} vertices, length {length}); "
            f"use the sampled estimator"
        )


def count_paths(graph: AnalyticalGraph, source: str, target: str, length: int) -> int:
    """Exact number of simple paths of ``length`` edges from source to target."""
    if source == target:
        raise ValueError("source and target must differ")
    _require_exact(graph, length)
    adj = graph.adjacency()
    return sum(1 for p in _paths_from(adj, source, length) if p[-1] == target)


@dataclass(frozen=True)
class BetweennessTable:
    """Per-vertex path-traversal counts and their normalised probabilities.

    ``lb`` sums to 1 over the vertices whenever any path of the target
    length exists; it is the selection distribution fed to the anonymity
    degree. ``kp_b`` normalises by the path count instead, so a vertex
    on every path scores 1.0.
    """

    sigma: Mapping[str, int]
    kp_b: Mapping[str, float]
    lb: Mapping[str, float]
    total_paths: int
    estimated: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["node_id", "sigma", "kp_b", "lb", "estimated"])
        for node in sorted(self.sigma):
            writer.writerow(
                [node, self.sigma[node], repr(self.kp_b[node]), repr(self.lb[node]),
                 str(self.estimated).lower()]
            )
        return buf.getvalue()


def _table_from_counts(sigma: dict[str, int], total: int, estimated: bool) -> BetweennessTable:
    if total == 0:
        raise ValueError("LB undefined: no paths of the requested length")
    mass = sum(sigma.values())
    return BetweennessTable(
        sigma=dict(sigma),
        kp_b={v: s / total for v, s in sigma.items()},
        lb={v: s / mass for v, s in sigma.items()},
        total_paths=total,
        estimated=estimated,
    )


def betweenness_table(graph: AnalyticalGraph, length: int) -> BetweennessTable:
    """Exact traversal counts over all ordered vertex pairs.

    Every simple path of ``length`` edges is enumerated once per
    direction (ordered endpoints); each contributes to the count of all
    its vertices, endpoints included.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    _require_exact(graph, length)
    adj = graph.adjacency()
    sigma = {v: 0 for v in graph.vertices}
    total = 0
    for source in graph.vertices:
        for path in _paths_from(adj, source, length):
            total += 1
            for v in path:
                sigma[v] += 1
    return _table_from_counts(sigma, total, estimated=False)


def betweenness_estimate(
    graph: AnalyticalGraph,
    length: int,
    samples: int,
    rng,
) -> BetweennessTable:
    """Monte-Carlo stand-in for :func:`betweenness_table` on large graphs.

    Draws ordered vertex pairs uniformly and one randomised path per
    pair; sampled paths weight their vertices as in the exact table.
    No unbiasedness claim is made; the table is flagged estimated.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    verts = sorted(graph.vertices)
    if len(verts) < 2:
        raise ValueError("LB undefined: need at least 2 vertices")
    sigma = {v: 0 for v in verts}
    total = 0
    for _ in range(samples):
        source, target = rng.sample(verts, 2)
        drawn = kpaths(graph, source, target, length, k=1, rng=rng)
        if drawn:
            total += 1
            for v in drawn[0].vertices:
                sigma[v] += 1
    return _table_from_counts(sigma, total, estimated=True)


def walks_between(n: int, length: int) -> int:
    """Walks of ``length`` edges between two fixed distinct vertices of K_n."""
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    if length < 1:
        raise ValueError("length must be >= 1")
    return ((n - 1) ** length - (-1) ** length) // n


def walks_closed(n: int, length: int) -> int:
    """Closed walks of ``length`` edges from a vertex of K_n back to itself."""
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    if length < 1:
        raise ValueError("length must be >= 1")
    return ((n - 1) ** length + (n - 1) * (-1) ** length) // n


def total_walks(n: int, length: int) -> int:
    """Walks of ``length`` edges summed over all ordered distinct pairs of K_n."""
    return n * (n - 1) * walks_between(n, length)
