"""Independent oracles used to cross-check the library's own algorithms.

Nothing here shares code with the implementations under test: paths are
enumerated by filtering vertex permutations, walk counts come from
literal adjacency-matrix powers, and the two-cluster split is found by
exhausting every contiguous partition.
"""

from itertools import permutations
from math import fsum

import numpy as np


def edge_set(edges):
    return {tuple(sorted(e)) for e in edges}


def brute_force_paths(vertices, edges, source, target, length):
    """All simple paths of ``length`` edges from source to target.

    Every ordered arrangement of intermediate vertices is tried and kept
    when each consecutive pair is an edge.
    """
    present = edge_set(edges)
    others = [v for v in vertices if v not in (source, target)]
    paths = []
    for middle in permutations(others, length - 1):
        seq = (source, *middle, target)
        if all(tuple(sorted(pair)) in present for pair in zip(seq, seq[1:])):
            paths.append(seq)
    return paths


def brute_force_betweenness(vertices, edges, length):
    """(sigma, lb, total) with endpoints counted as traversed."""
    verts = sorted(vertices)
    sigma = {v: 0 for v in verts}
    total = 0
    for s in verts:
        for t in verts:
            if s == t:
                continue
            for path in brute_force_paths(verts, edges, s, t, length):
                total += 1
                for v in path:
                    sigma[v] += 1
    mass = sum(sigma.values())
    lb = {v: c / mass for v, c in sigma.items()} if mass else None
    return sigma, lb, total


def matrix_walks(n, length):
    """(offdiag, diag, total_over_ordered_pairs) from literal matrix powers."""
    adj = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
    power = np.linalg.matrix_power(adj, length)
    off = int(power[0, 1])
    total = int(power.sum() - np.trace(power))
    return off, int(power[0, 0]), total


def best_two_cluster_split(values):
    """Centroids of the SSE-optimal contiguous 2-partition of 1-D data."""
    ordered = sorted(values)

    def sse(chunk):
        mean = fsum(chunk) / len(chunk)
        return fsum((x - mean) ** 2 for x in chunk)

    best = None
    for cut in range(1, len(ordered)):
        left, right = ordered[:cut], ordered[cut:]
        cost = sse(left) + sse(right)
        if best is None or cost < best[0]:
            best = (cost, [fsum(left) / len(left), fsum(right) / len(right)])
    return sorted(best[1])


def chi_square_statistic(counts, expected):
    return fsum((c - e) ** 2 / e for c, e in zip(counts, expected))


def total_variation(empirical, analytic):
    keys = set(empirical) | set(analytic)
    return 0.5 * fsum(abs(empirical.get(k, 0.0) - analytic.get(k, 0.0)) for k in keys)


def random_graph(ids, density, rng):
    """Edge set sampled uniformly at the requested density."""
    ids = sorted(ids)
    pairs = [(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]
    count = round(density * len(pairs))
    return frozenset(rng.sample(pairs, count))
