"""Onion-routing circuit selection strategies and anonymity metrics.

A library plus CLI for comparing how circuit construction strategies
(random, geographical, bandwidth-weighted, latency-graph) trade off
anonymity against transfer latency on a seeded simulated network.
"""

from .metrics import (
    AdversaryModel,
    AnonymityDegree,
    Pmf,
    adversary_success,
    anonymity_degree,
    degree_bw,
    degree_geo,
    degree_grp,
    entropy,
)
from .latency import EdgeLabel, LatencyGraph, edge_key, init_graph, smoothing_factor
from .paths import (
    AnalyticalGraph,
    BetweennessTable,
    SimplePath,
    betweenness_estimate,
    betweenness_table,
    count_paths,
    kpaths,
    total_walks,
    walks_between,
    walks_closed,
)
from .strategies import (
    Circuit,
    Node,
    select_bw,
    select_geo,
    select_grp,
    select_random,
    strategy_pmf,
)
from .simnet import (
    LatencyModel,
    PopulationSpec,
    SimConfig,
    TransferModel,
    default_config,
    generate_population,
    kmeans,
    load_config,
    make_probe_oracle,
    probe,
    transfer_time,
)
from .experiment import (
    DegreeReport,
    DensityPoint,
    ExperimentPlan,
    ExperimentResult,
    degree_report,
    density_sweep,
    emit_results,
    run_experiment,
)

__version__ = "0.1.0"
