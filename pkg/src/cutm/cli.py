"""Command-line surface: generate skyroads, simulate traffic, export plot data.

Every file written embeds the digests of its inputs and the configuration it
was produced with, so any output is reproducible from its header alone.
Exit codes: 0 success, 2 input error, 3 safety-verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import sim
from .config import RunConfig, load_config
from .errors import CutmError, DigestMismatchError, RangeError
from .ioutil import canonical_json, sha256_file
from .landscape import load_landscape, slice_all_floors
from .scenarios import DEMO_TIMETABLE, build_timed_scenario, random_scenario
from .skyroads import (
    build_edges,
    check_reachability,
    extract_streamlines,
    load_graph,
    prune_dead_ends,
    save_graph,
    segment_skyroads,
    streamlines_to_csv,
)
from .streamfield import dump_field_csv, solve_floor

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SAFETY = 3


def _setup_logging() -> None:
    level = os.environ.get("CUTM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _load_run_config(args) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "levels", None) is not None:
        config.n_s = args.levels
    if getattr(args, "delta_min", None) is not None:
        config.delta_min_m = args.delta_min
    if getattr(args, "seg_length", None) is not None:
        config.seg_length_m = args.seg_length
    if getattr(args, "nt", None) is not None:
        config.n_t = args.nt
    return config


def cmd_generate(args) -> int:
    config = _load_run_config(args)
    landscape = load_landscape(args.landscape)
    config = config.resolved(landscape)
    landscape_digest = sha256_file(args.landscape)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = [
        f"landscape_digest={landscape_digest}",
        f"config={canonical_json(config.to_dict())}",
    ]

    floors = slice_all_floors(landscape)
    report_floors = []
    all_roads = []
    for floor in floors:
        fld = solve_floor(floor, config.solver)
        dump_field_csv(fld, out / f"floor_{floor.floor_index}_psi.csv", header)
        stats: dict = {}
        roads = extract_streamlines(fld, floor, config.n_s, config.delta_min_m, stats=stats)
        streamlines_to_csv(roads, out / f"floor_{floor.floor_index}_streamlines.csv", header)
        all_roads.extend(roads)
        report_floors.append(
            {
                "floor": floor.floor_index,
                "solver_iterations": fld.iterations,
                "residual": fld.residual,
                "skyroads": len(roads),
                "dropped_levels": stats.get("dropped_levels", 0),
            }
        )
        log.info("floor %d: %d skyroads", floor.floor_index, len(roads))

    segments = segment_skyroads(all_roads, config.seg_length_m)
    meta = {"landscape_digest": landscape_digest, "config": config.to_dict()}
    graph = build_edges(segments, floors, config.r_v_m, meta=meta)
    if config.prune:
        graph = prune_dead_ends(graph)
    reach = check_reachability(graph)
    save_graph(graph, out / "graph.json")

    report = {
        "landscape_digest": landscape_digest,
        "config": config.to_dict(),
        "floors": report_floors,
        "segments": graph.n_nodes,
        "edges": graph.n_edges,
        "pruned_segments": graph.meta.get("pruned_segments", 0),
        "reachability": {
            "strongly_connected": reach.strongly_connected,
            "components": reach.component_count,
            "witness_pairs": reach.witness_pairs,
        },
    }
    (out / "generation_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"graph: {graph.n_nodes} segments, {graph.n_edges} edges -> {out / 'graph.json'}")
    print(f"reachability: {'strongly connected' if reach.strongly_connected else 'NOT strongly connected'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_run_config(args)
    graph = load_graph(args.graph)
    scenario = sim.load_scenario(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    trace = sim.run(
        graph,
        scenario,
        n_t=config.n_t,
        debug=args.debug,
        graph_digest=sha256_file(args.graph),
    )
    trace.header["scenario_digest"] = sha256_file(args.scenario)
    trace.header["config"] = config.to_dict()
    sim.write_trace(trace, out / "trace.jsonl")
    digests = (
        f"# graph_digest={trace.header['graph_digest']}\n"
        f"# scenario_digest={trace.header['scenario_digest']}\n"
    )
    (out / "summary.csv").write_text(digests + sim.summarize(trace))
    report = sim.verify_trace(trace, graph)
    (out / "verification.txt").write_text(digests + str(report) + "\n")
    print(str(report))
    return EXIT_OK if report.passed else EXIT_SAFETY


def _paths_by_floor(path_ids, graph):
    """Split a segment-id path into per-floor midpoint runs."""
    runs: dict[int, list[list[tuple[float, float]]]] = {}
    prev_floor = None
    for sid in path_ids:
        seg = graph.segments[sid]
        fl = seg.floor_index
        if fl != prev_floor:
            runs.setdefault(fl, []).append([])
            prev_floor = fl
        runs[fl][-1].append((float(seg.midpoint[0]), float(seg.midpoint[1])))
    return runs


def cmd_export_plots(args) -> int:
    graph = load_graph(args.graph)
    trace = sim.read_trace(args.trace)
    graph_digest = sha256_file(args.graph)
    recorded = trace.header.get("graph_digest", "")
    if recorded and recorded != graph_digest:
        raise DigestMismatchError(
            f"trace was produced from graph {recorded[:12]}..., given {graph_digest[:12]}..."
        )
    steps = [int(s) for s in args.steps.split(",")] if args.steps else [len(trace.steps) - 1]
    for s in steps:
        if not 0 <= s < len(trace.steps):
            raise RangeError(f"step {s} outside the recorded trace (0..{len(trace.steps) - 1})")
    floors = (
        [int(f) for f in args.floors.split(",")]
        if args.floors
        else sorted({seg.floor_index for seg in graph.segments.values()})
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = f"# graph_digest={graph_digest}\n"

    # allocation and arrival history from the event stream
    alloc_step: dict[str, int] = {}
    paths: dict[str, list[int]] = {}
    arrive_step: dict[str, int] = {}
    for row in trace.steps:
        for ev in row["events"]:
            if ev["type"] == "allocate":
                alloc_step[ev["uas"]] = row["k"]
                paths[ev["uas"]] = ev["path"]
            elif ev["type"] == "arrive":
                arrive_step[ev["uas"]] = row["k"]

    for s in steps:
        positions = trace.steps[s]["positions"]
        for floor in floors:
            path_lines = [header, "uas,kind,status,run,point,x,y\n"]
            pos_lines = [header, "uas,status,segment,x,y,z\n"]
            for uid in sorted(alloc_step):
                if alloc_step[uid] > s:
                    continue
                status = "arrived" if arrive_step.get(uid, len(trace.steps)) <= s else "enroute"
                path = paths[uid]
                if uid in positions:
                    progress = path.index(positions[uid])
                elif status == "arrived":
                    progress = len(path) - 1
                else:
                    progress = 0
                for kind, ids in (("allocated", path), ("traveled", path[: progress + 1])):
                    for run, pts in enumerate(_paths_by_floor(ids, graph).get(floor, [])):
                        for p, (x, y) in enumerate(pts):
                            path_lines.append(f"{uid},{kind},{status},{run},{p},{x!r},{y!r}\n")
                if uid in positions:
                    seg = graph.segments[positions[uid]]
                    if seg.floor_index == floor:
                        pos_lines.append(
                            f"{uid},{status},{seg.id},{seg.midpoint[0]!r},{seg.midpoint[1]!r},{seg.midpoint[2]!r}\n"
                        )
            (out / f"step_{s}_floor_{floor}_paths.csv").write_text("".join(path_lines))
            (out / f"step_{s}_floor_{floor}_positions.csv").write_text("".join(pos_lines))
    print(f"wrote plot data for steps {steps} and floors {floors} -> {out}")
    return EXIT_OK


def cmd_make_scenario(args) -> int:
    """Helper to produce scenario files (random, or replaying the demo timetable)."""
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.timetable:
        if not args.graph:
            raise CutmError("--timetable requires --graph")
        graph = load_graph(args.graph)
        config = _load_run_config(args)
        scenario = build_timed_scenario(
            graph, DEMO_TIMETABLE, seed=args.seed or 0, horizon=args.horizon, n_t=config.n_t
        )
    else:
        scenario = random_scenario(seed=args.seed or 0, horizon=args.horizon, n_uas=args.uas)
    sim.save_scenario(scenario, out)
    print(f"wrote scenario with {len(scenario.requests)} requests -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="solve stream fields and build the skyroad graph")
    gen.add_argument("--landscape", required=True, help="landscape JSON file")
    gen.add_argument("--out", default="out", help="output directory")
    gen.add_argument("--config", help="run-config JSON file")
    gen.add_argument("--levels", type=int, help="uniform streamline levels per floor")
    gen.add_argument("--delta-min", type=float, dest="delta_min", help="min corridor bandwidth (m)")
    gen.add_argument("--seg-length", type=float, dest="seg_length", help="segment length (m)")
    gen.set_defaults(func=cmd_generate)

    simu = sub.add_parser("simulate", help="run a scenario over a generated graph")
    simu.add_argument("--graph", required=True, help="graph JSON from generate")
    simu.add_argument("--scenario", required=True, help="scenario JSON file")
    simu.add_argument("--out", default="out", help="output directory")
    simu.add_argument("--config", help="run-config JSON file")
    simu.add_argument("--seed", type=int, help="override the scenario seed")
    simu.add_argument("--nt", type=int, help="airspace clearing period (steps)")
    simu.add_argument("--debug", action="store_true", help="check supervisor invariants every step")
    simu.set_defaults(func=cmd_simulate)

    plots = sub.add_parser("export-plots", help="dump per-floor plot data from a trace")
    plots.add_argument("--trace", required=True, help="trace file from simulate")
    plots.add_argument("--graph", required=True, help="graph JSON the trace was produced from")
    plots.add_argument("--steps", help="comma-separated step indices (default: last step)")
    plots.add_argument("--floors", help="comma-separated floor indices (default: all)")
    plots.add_argument("--out", default="plots", help="output directory")
    plots.set_defaults(func=cmd_export_plots)

    mk = sub.add_parser("make-scenario", help="write a scenario file")
    mk.add_argument("--out", required=True, help="scenario JSON path to write")
    mk.add_argument("--seed", type=int, default=0)
    mk.add_argument("--horizon", type=int, default=500)
    mk.add_argument("--uas", type=int, default=20, help="request count for random scenarios")
    mk.add_argument("--timetable", action="store_true", help="replay the bundled demo timetable")
    mk.add_argument("--graph", help="graph JSON (required with --timetable)")
    mk.add_argument("--nt", type=int, help="clearing period used when fitting the timetable")
    mk.set_defaults(func=cmd_make_scenario)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CutmError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
