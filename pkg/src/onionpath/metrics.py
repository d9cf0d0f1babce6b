"""Entropy-based anonymity metrics for circuit-selection strategies.

A selection strategy induces a probability mass function over the relay
population. The uncertainty of that distribution, normalised by the
uncertainty of a uniform choice, is the anonymity degree: 1.0 means an
observer learns nothing from knowing the strategy, 0.0 means the
selection is fully predictable. This module also bounds the success
probability of an adversary that controls a subset of relays and tries
to own both ends of a circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

__all__ = [
    "PMF_SUM_TOLERANCE",
    "Pmf",
    "AnonymityDegree",
    "AdversaryModel",
    "entropy",
    "anonymity_degree",
    "adversary_success",
    "degree_geo",
    "degree_bw",
    "degree_grp",
]

PMF_SUM_TOLERANCE = 1e-9

NodeId = str


class Pmf(Mapping[NodeId, float]):
    """Probability mass function over node identifiers.

    Inputs must sum to 1 within ``PMF_SUM_TOLERANCE``; anything worse is
    rejected (empirical frequencies carry float noise, genuinely broken
    inputs should fail loudly). Accepted inputs are renormalised so the
    stored masses sum to exactly the float 1-ish total they came with.
    Zero-probability entries are allowed: country-restricted strategies
    assign zero mass to out-of-country nodes.
    """

    __slots__ = ("_probs",)

    def __init__(self, probabilities: Mapping[NodeId, float]):
        if not probabilities:
            raise ValueError("empty pmf")
        total = math.fsum(probabilities.values())
        if abs(total - 1.0) > PMF_SUM_TOLERANCE:
            raise ValueError(f"pmf sums to {total!r}, not 1")
        probs: dict[NodeId, float] = {}
        for node, p in probabilities.items():
            if not 0.0 <= p <= 1.0 + PMF_SUM_TOLERANCE:
                raise ValueError(f"probability {p!r} for {node!r} outside [0, 1]")
            probs[node] = p / total
        self._probs = probs

    @classmethod
    def uniform(cls, nodes: Iterable[NodeId]) -> "Pmf":
        ids = list(nodes)
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        return cls({node: 1.0 / len(ids) for node in ids})

    @classmethod
    def from_counts(cls, counts: Mapping[NodeId, int]) -> "Pmf":
        total = sum(counts.values())
        if total <= 0:
            raise ValueError("counts sum to zero")
        return cls({node: c / total for node, c in counts.items()})

    def support(self) -> list[NodeId]:
        """Ids with nonzero mass."""
        return [node for node, p in self._probs.items() if p > 0.0]

    def __getitem__(self, node: NodeId) -> float:
        return self._probs[node]

    def __iter__(self) -> Iterator[NodeId]:
        return iter(self._probs)

    def __len__(self) -> int:
        return len(self._probs)

    def __repr__(self) -> str:
        return f"Pmf({self._probs!r})"


@dataclass(frozen=True)
class AnonymityDegree:
    """Normalised entropy of a selection distribution, in [0, 1]."""

    value: float
    entropy_bits: float
    max_entropy_bits: float
    population_size: int
    estimated: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"degree {self.value!r} outside [0, 1]")


@dataclass(frozen=True)
class AdversaryModel:
    """Selection probabilities of the relays an adversary controls."""

    controlled_probabilities: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        probs = tuple(self.controlled_probabilities)
        object.__setattr__(self, "controlled_probabilities", probs)
        for p in probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"controlled probability {p!r} outside [0, 1]")
        if math.fsum(probs) > 1.0 + PMF_SUM_TOLERANCE:
            raise ValueError("controlled probabilities exceed 1")

    @property
    def controlled_count(self) -> int:
        return len(self.controlled_probabilities)


def entropy(pmf: Pmf) -> float:
    """Shannon entropy of ``pmf`` in bits, with 0*log2(0) taken as 0.

    Uniform distributions are returned as the closed form log2(k) so
    degree ratios against a matching maximum come out exact.
    """
    masses = [p for p in pmf.values() if p > 0.0]
    if len(set(masses)) == 1:
        return math.log2(len(masses))
    return -math.fsum(p * math.log2(p) for p in masses)


def anonymity_degree(pmf: Pmf, population_size: int) -> AnonymityDegree:
    """Entropy of ``pmf`` normalised by the maximum over the population."""
    if population_size < 2:
        raise ValueError("degenerate network: need a population of at least 2")
    if len(pmf.support()) > population_size:
        raise ValueError("pmf support larger than population")
    bits = entropy(pmf)
    max_bits = math.log2(population_size)
    value = bits / max_bits
    if value > 1.0:
        if value > 1.0 + PMF_SUM_TOLERANCE:
            raise ValueError(f"entropy {bits!r} exceeds maximum {max_bits!r}")
        value = 1.0
    return AnonymityDegree(
        value=value,
        entropy_bits=bits,
        max_entropy_bits=max_bits,
        population_size=population_size,
    )


def adversary_success(model: AdversaryModel) -> float:
    """Probability that both circuit ends land on controlled relays.

    Entry and exit are selected independently, so the bound is the
    squared total mass of the controlled set; an empty set cannot
    succeed.
    """
    total = math.fsum(model.controlled_probabilities)
    return total * total


def degree_geo(country_count: int, population_size: int) -> float:
    """Anonymity degree of a selection restricted to one country.

    ``country_count`` nodes share the client's country out of
    ``population_size`` total; the degree is log2(m)/log2(n), reaching
    1.0 exactly when every node is in that country.
    """
    if country_count < 1:
        raise ValueError("empty country")
    if population_size < 2:
        raise ValueError("degenerate network: need a population of at least 2")
    if country_count > population_size:
        raise ValueError("country larger than population")
    return math.log2(country_count) / math.log2(population_size)


def degree_bw(bandwidths: Iterable[float]) -> AnonymityDegree:
    """Anonymity degree of bandwidth-proportional selection.

    Each node is weighted by its share of the total bandwidth; equal
    bandwidths collapse to the uniform distribution and give 1.0.
    """
    values = list(bandwidths)
    if len(values) < 2:
        raise ValueError("need at least 2 nodes")
    if any(b <= 0 for b in values):
        raise ValueError("bandwidths must be positive")
    total = math.fsum(values)
    pmf = Pmf({f"n{i}": b / total for i, b in enumerate(values)})
    return anonymity_degree(pmf, len(values))


def degree_grp(
    graph,
    path_len: int,
    *,
    samples: int = 20000,
    rng=None,
) -> AnonymityDegree:
    """Anonymity degree of latency-graph selection over ``graph``.

    The selection distribution is the betweenness probability of each
    vertex over simple paths of ``path_len`` edges (a circuit of length
    d maps to d-1 edges once the client vertex is stripped). Small
    graphs are enumerated exactly; larger ones fall back to the sampled
    estimator and the result is flagged ``estimated``.
    """
    from . import paths

    if paths.within_exact_limits(graph, path_len):
        table = paths.betweenness_table(graph, path_len)
    else:
        if rng is None:
            raise ValueError(
                "graph beyond exact enumeration limits: pass rng (and samples) "
                "for the estimated table"
            )
        table = paths.betweenness_estimate(graph, path_len, samples, rng)
    pmf = Pmf(table.lb)
    degree = anonymity_degree(pmf, len(graph.vertices))
    if table.estimated:
        return AnonymityDegree(
            value=degree.value,
            entropy_bits=degree.entropy_bits,
            max_entropy_bits=degree.max_entropy_bits,
            population_size=degree.population_size,
            estimated=True,
        )
    return degree
