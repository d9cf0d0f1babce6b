"""Command-line front end.

Subcommands:
  run            full strategy/page-size/length grid, CSV or JSON out
  degrees        anonymity degree report only
  density-sweep  mean anonymity degree of random graphs per density
  probe-demo     watch the measurement loop fill the latency graph

The seed comes from --seed, falling back to the ONIONPATH_SEED
environment variable, then 0. Exit status is nonzero when any grid
cell fails; its diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import io
import csv
import json
import os
import sys
from pathlib import Path

from . import simnet
from .experiment import (
    CLIENT_ID,
    ExperimentPlan,
    degree_report,
    density_sweep,
    emit_results,
    run_experiment,
)
from .latency import init_graph
from .seeding import spawn_rng
from .strategies import STRATEGY_NAMES

SEED_ENV_VAR = "ONIONPATH_SEED"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="config JSON (default: bundled population)")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"run seed (default: ${SEED_ENV_VAR} or 0)")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: ./out)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _resolve_seed(value) -> int:
    if value is not None:
        return value
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _load_config(path):
    if path is None:
        return simnet.default_config()
    return simnet.load_config(path)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onionpath",
        description="Compare onion-routing circuit-selection strategies on a simulated network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full experiment grid")
    _add_common(run)
    run.add_argument("--strategies", default=",".join(STRATEGY_NAMES),
                     help="comma-separated subset of rnd,geo,bw,grp")
    run.add_argument("--page-sizes", default="50,150,320", metavar="KB",
                     help="comma-separated page sizes in KB")
    run.add_argument("--lengths", default="3,4,5,6",
                     help="comma-separated circuit lengths")
    run.add_argument("--repetitions", type=int, default=100)
    run.add_argument("--warmup", type=int, default=2500,
                     help="measurement rounds before circuits are built")
    run.add_argument("--home-country", default="US")
    run.add_argument("--plot", action="store_true",
                     help="also render figures next to the output")

    degrees = sub.add_parser("degrees", help="anonymity degrees per strategy")
    _add_common(degrees)
    degrees.add_argument("--lengths", default="3,4,5,6")
    degrees.add_argument("--warmup", type=int, default=2500)
    degrees.add_argument("--home-country", default="US")
    degrees.add_argument("--plot", action="store_true")

    sweep = sub.add_parser("density-sweep", help="anonymity degree vs graph density")
    _add_common(sweep)
    sweep.add_argument("--vertices", type=int, default=20)
    sweep.add_argument("--path-len", type=int, default=2,
                       help="path length in edges (circuit length minus one)")
    sweep.add_argument("--densities", default="0.2,0.4,0.6,0.8,1.0")
    sweep.add_argument("--trials", type=int, default=20)
    sweep.add_argument("--plot", action="store_true")

    demo = sub.add_parser("probe-demo", help="run the measurement loop and report progress")
    _add_common(demo)
    demo.add_argument("--rounds", type=int, default=500)
    demo.add_argument("--probes-per-round", type=int, default=3)
    demo.add_argument("--report-every", type=int, default=100)

    return parser


def _plan_from_args(args) -> ExperimentPlan:
    return ExperimentPlan(
        strategies=tuple(s.strip() for s in args.strategies.split(",") if s.strip()),
        page_sizes_kb=_parse_floats(args.page_sizes),
        circuit_lengths=_parse_ints(args.lengths),
        repetitions=args.repetitions,
        warmup_rounds=args.warmup,
        seed=_resolve_seed(args.seed),
        home_country=args.home_country,
    )


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    plan = _plan_from_args(args)
    result = run_experiment(plan, config)
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / f"results.{args.format}"
    emit_results(result, args.format, out_path)
    print(f"wrote {out_path}")
    if args.plot:
        from . import plotting

        for path in plotting.plot_transfer_results(result, args.out):
            print(f"wrote {path}")
    for cell in result.failed_cells:
        print(
            f"cell failed: strategy={cell.strategy} page_kb={cell.page_kb} "
            f"delta={cell.circuit_len}: {cell.error}",
            file=sys.stderr,
        )
    return 1 if result.failed_cells else 0


def _degrees_csv(report, lengths) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["strategy", "delta", "degree", "estimated"])
    writer.writerow(["rnd", "", repr(report.rnd), "false"])
    writer.writerow(["geo", "", repr(report.geo), "false"])
    writer.writerow(["bw", "", repr(report.bw.value), str(report.bw.estimated).lower()])
    for length in lengths:
        d = report.grp[length]
        writer.writerow(["grp", length, repr(d.value), str(d.estimated).lower()])
    return buf.getvalue()


def _cmd_degrees(args) -> int:
    config = _load_config(args.config)
    plan = ExperimentPlan(
        circuit_lengths=_parse_ints(args.lengths),
        warmup_rounds=args.warmup,
        seed=_resolve_seed(args.seed),
        home_country=args.home_country,
    )
    from .experiment import _build_network

    population, _, graph = _build_network(plan, config)
    report = degree_report(plan, population, graph)
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / f"degrees.{args.format}"
    if args.format == "csv":
        payload = _degrees_csv(report, plan.circuit_lengths)
    else:
        payload = json.dumps(report.to_json_obj(), indent=2, sort_keys=True) + "\n"
    out_path.write_text(payload, encoding="utf-8", newline="")
    print(f"wrote {out_path}")
    if args.plot:
        from . import plotting

        print(f"wrote {plotting.plot_degree_bars(report, plan.circuit_lengths, args.out / 'degrees.png')}")
    return 0


def _cmd_density_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    points = density_sweep(
        args.vertices,
        args.path_len,
        _parse_floats(args.densities),
        args.trials,
        spawn_rng(seed, "density-sweep"),
    )
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / f"density_sweep.{args.format}"
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["density", "mean_degree", "std", "trials_ok", "failures"])
        for p in points:
            writer.writerow(
                [repr(p.density), repr(p.mean) if p.mean is not None else "",
                 repr(p.std), len(p.values), p.failures]
            )
        payload = buf.getvalue()
    else:
        payload = json.dumps(
            [
                {"density": p.density, "mean_degree": p.mean, "std": p.std,
                 "trials_ok": len(p.values), "failures": p.failures}
                for p in points
            ],
            indent=2, sort_keys=True,
        ) + "\n"
    out_path.write_text(payload, encoding="utf-8", newline="")
    print(f"wrote {out_path}")
    if args.plot:
        from . import plotting

        print(f"wrote {plotting.plot_density_curve(points, args.out / 'density_sweep.png')}")
    return 0


def _cmd_probe_demo(args) -> int:
    config = _load_config(args.config)
    seed = _resolve_seed(args.seed)
    rng_pop = spawn_rng(seed, "population")
    population = simnet.generate_population(config.population_spec(rng_pop), rng_pop)
    from dataclasses import replace

    from .seeding import stable_seed

    model = replace(config.latency, seed=stable_seed(seed, "latency"))
    graph = init_graph([n.id for n in population] + [CLIENT_ID], CLIENT_ID, 0)
    oracle = simnet.make_probe_oracle(model, population, CLIENT_ID)
    rng = spawn_rng(seed, "warmup")
    now = 0
    for round_no in range(1, args.rounds + 1):
        now += 1
        graph.measurement_round(oracle, args.probes_per_round, now, rng)
        if round_no % args.report_every == 0 or round_no == args.rounds:
            analytical = graph.analytical_graph()
            latencies = list(analytical.edge_weight.values())
            mean = sum(latencies) / len(latencies) if latencies else float("nan")
            print(
                f"round {round_no}: edges={len(graph.edges)} "
                f"analytical_density={analytical.density():.3f} "
                f"mean_latency_ms={mean:.1f}"
            )
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / "latency_graph.json"
    out_path.write_text(graph.to_json(), encoding="utf-8")
    print(f"wrote {out_path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "degrees": _cmd_degrees,
        "density-sweep": _cmd_density_sweep,
        "probe-demo": _cmd_probe_demo,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
