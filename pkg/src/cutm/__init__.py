"""Physics-informed fixed skyroads and continuous UAS traffic management.

Pipeline: load a landscape, solve the per-floor stream field, extract and
segment skyroads, build the directed segment graph, then run the
supervisory allocation loop over timed request scenarios.
"""

__version__ = "0.1.0"

from .config import RunConfig
from .landscape import FloorSlice, LandscapeSpec, ObstaclePrism, load_landscape, slice_all_floors, slice_floor
from .planner import LiveGraph, Path, PathQuery, astar, heuristic, transition_cost
from .sim import Scenario, ScenarioRequest, SimTrace, run, summarize, verify_trace
from .skyroads import (
    Segment,
    Skyroad,
    SkyroadGraph,
    assign_directions,
    build_edges,
    check_reachability,
    extract_streamlines,
    prune_dead_ends,
    segment_skyroads,
)
from .streamfield import SolverConfig, StreamField, external_boundary_values, obstacle_level, residual, solve_floor, solve_laplace
from .supervisor import RequestEvent, Reservation, Supervisor

__all__ = [
    "FloorSlice",
    "LandscapeSpec",
    "LiveGraph",
    "ObstaclePrism",
    "Path",
    "PathQuery",
    "RequestEvent",
    "Reservation",
    "RunConfig",
    "Scenario",
    "ScenarioRequest",
    "Segment",
    "SimTrace",
    "Skyroad",
    "SkyroadGraph",
    "SolverConfig",
    "StreamField",
    "Supervisor",
    "assign_directions",
    "astar",
    "build_edges",
    "check_reachability",
    "extract_streamlines",
    "external_boundary_values",
    "heuristic",
    "load_landscape",
    "obstacle_level",
    "prune_dead_ends",
    "residual",
    "run",
    "segment_skyroads",
    "slice_all_floors",
    "slice_floor",
    "solve_floor",
    "solve_laplace",
    "summarize",
    "transition_cost",
    "verify_trace",
]
