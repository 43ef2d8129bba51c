#!/usr/bin/env python3
"""End-to-end demo: city generation, skyroad graph, timed 20-vehicle run.

Builds the 91x91, 8-floor demo city, solves every floor, extracts and links
the skyroads, fits a fixed-endpoint scenario to the bundled demo timetable,
runs the 500-step supervisory loop, and prints the timing table plus the
safety verdict. All artifacts land in the output directory.

Usage: python scripts/run_demo.py [--out out-demo] [--seed 7]
"""

import argparse
import json
import time
from pathlib import Path

from cutm import sim
from cutm.citygen import demo_city
from cutm.config import RunConfig
from cutm.landscape import slice_all_floors
from cutm.scenarios import DEMO_TIMETABLE, build_timed_scenario
from cutm.skyroads import build_edges, check_reachability, extract_streamlines, prune_dead_ends, save_graph, segment_skyroads
from cutm.streamfield import solve_floor


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-demo")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.time()
    landscape = demo_city(seed=args.seed)
    config = RunConfig().resolved(landscape)
    floors = slice_all_floors(landscape)
    roads = []
    for floor in floors:
        fld = solve_floor(floor, config.solver)
        floor_roads = extract_streamlines(fld, floor, config.n_s, config.delta_min_m)
        roads.extend(floor_roads)
        print(f"floor {floor.floor_index}: {len(floor_roads)} skyroads "
              f"(residual {fld.residual:.1e}, {fld.iterations} iterations)")
    segments = segment_skyroads(roads, config.seg_length_m)
    graph = prune_dead_ends(build_edges(segments, floors, config.r_v_m))
    reach = check_reachability(graph)
    save_graph(graph, out / "graph.json")
    print(f"graph: {graph.n_nodes} segments, {graph.n_edges} edges, "
          f"strongly connected: {reach.strongly_connected}")

    scenario = build_timed_scenario(graph, DEMO_TIMETABLE, seed=0, n_t=config.n_t)
    sim.save_scenario(scenario, out / "scenario.json")
    trace = sim.run(graph, scenario, n_t=config.n_t)
    sim.write_trace(trace, out / "trace.jsonl")
    (out / "summary.csv").write_text(sim.summarize(trace))
    report = sim.verify_trace(trace, graph)
    (out / "verification.txt").write_text(str(report) + "\n")

    print()
    print(sim.summarize(trace))
    print(report)
    print(f"total {time.time() - t0:.1f} s; artifacts in {out}/")
    (out / "run_meta.json").write_text(json.dumps({"seed": args.seed}, indent=1) + "\n")


if __name__ == "__main__":
    main()
