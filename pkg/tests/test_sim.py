"""Simulation driver: determinism, safety audit, summaries, scenario IO."""

import time

import pytest

from cutm import sim
from cutm.errors import ParseError, ScenarioError
from cutm.ioutil import sha256_file
from cutm.landscape import slice_floor
from cutm.scenarios import random_scenario
from cutm.sim import Scenario, ScenarioRequest, SimTrace, UasSummary
from cutm.skyroads import build_edges, extract_streamlines, prune_dead_ends, segment_skyroads
from cutm.streamfield import SolverConfig, solve_floor

from conftest import empty_landscape


@pytest.fixture(scope="module")
def small_graph():
    spec = empty_landscape(n_x=11, n_y=11, extent=10.0, n_z=2)
    floors = [slice_floor(spec, h) for h in (1, 2)]
    roads = []
    for floor in floors:
        fld = solve_floor(floor, SolverConfig(tolerance=1e-10))
        roads.extend(extract_streamlines(fld, floor, n_s=3, delta_min=1.0))
    return prune_dead_ends(build_edges(segment_skyroads(roads, 1.0), floors, r_v=1.5))


def fixed_scenario(graph, horizon=60):
    ids = sorted(graph.segments)
    return Scenario(
        seed=1,
        horizon=horizon,
        requests=[
            ScenarioRequest("u1", 2, ids[0], ids[-1]),
            ScenarioRequest("u2", 10, ids[4], ids[-3]),
        ],
        random_endpoints=False,
    )


# -- run ----------------------------------------------------------------------


def test_run_records_every_step(small_graph):
    scenario = fixed_scenario(small_graph)
    trace = sim.run(small_graph, scenario)
    assert len(trace.steps) == scenario.horizon
    assert [row["k"] for row in trace.steps] == list(range(scenario.horizon))


def test_unit_speed_motion(small_graph):
    scenario = fixed_scenario(small_graph)
    trace = sim.run(small_graph, scenario)
    path = trace.summaries["u1"].path
    t0 = trace.summaries["u1"].t_request
    for offset in range(len(path)):
        positions = trace.steps[t0 + offset]["positions"]
        assert positions["u1"] == path[offset]


def test_horizon_zero_empty_trace(small_graph):
    trace = sim.run(small_graph, Scenario(seed=0, horizon=0, requests=[]))
    assert trace.steps == [] and trace.summaries == {}


def test_determinism_byte_identical(small_graph, tmp_path):
    scenario = random_scenario(seed=99, horizon=80, n_uas=6)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    sim.write_trace(sim.run(small_graph, scenario), a)
    sim.write_trace(sim.run(small_graph, scenario), b)
    assert sha256_file(a) == sha256_file(b)


def test_different_seed_changes_random_trace(small_graph, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    sim.write_trace(sim.run(small_graph, random_scenario(seed=1, horizon=80, n_uas=6)), a)
    sim.write_trace(sim.run(small_graph, random_scenario(seed=2, horizon=80, n_uas=6)), b)
    assert sha256_file(a) != sha256_file(b)


def test_trace_roundtrip(small_graph, tmp_path):
    scenario = fixed_scenario(small_graph)
    trace = sim.run(small_graph, scenario)
    path = tmp_path / "t.jsonl"
    sim.write_trace(trace, path)
    loaded = sim.read_trace(path)
    assert loaded.steps == trace.steps
    assert set(loaded.summaries) == set(trace.summaries)
    assert loaded.summaries["u1"].path == trace.summaries["u1"].path


def test_summary_timing_arithmetic(small_graph):
    scenario = fixed_scenario(small_graph)
    trace = sim.run(small_graph, scenario)
    for s in trace.summaries.values():
        assert s.t_check == s.t_request + s.t_max
        if s.arrived:
            assert s.t_arrive == s.t_check


# -- random endpoints ---------------------------------------------------------------


def test_random_endpoints_all_allocated(small_graph):
    scenario = random_scenario(seed=5, horizon=120, n_uas=8)
    trace = sim.run(small_graph, scenario)
    assert len(trace.summaries) == 8
    report = sim.verify_trace(trace, small_graph)
    assert report.passed, report.failures


def test_random_scenario_rejects_fixed_endpoints():
    scenario = Scenario(
        seed=0,
        horizon=10,
        requests=[ScenarioRequest("u1", 1, 0, 5)],
        random_endpoints=True,
    )
    with pytest.raises(ScenarioError):
        scenario.validate()


def test_fixed_scenario_requires_endpoints():
    scenario = Scenario(seed=0, horizon=10, requests=[ScenarioRequest("u1", 1)])
    with pytest.raises(ScenarioError):
        scenario.validate()


def test_unknown_segment_rejected(small_graph):
    scenario = Scenario(
        seed=0, horizon=10, requests=[ScenarioRequest("u1", 1, 0, 10**9)]
    )
    with pytest.raises(ScenarioError):
        sim.run(small_graph, scenario)


def test_duplicate_ids_rejected():
    scenario = Scenario(
        seed=0,
        horizon=10,
        requests=[ScenarioRequest("u1", 1, 0, 1), ScenarioRequest("u1", 2, 0, 1)],
    )
    with pytest.raises(ScenarioError):
        scenario.validate()


def test_scenario_roundtrip(tmp_path, small_graph):
    scenario = fixed_scenario(small_graph)
    path = tmp_path / "s.json"
    sim.save_scenario(scenario, path)
    loaded = sim.load_scenario(path)
    assert loaded == scenario
    with pytest.raises(ParseError):
        sim.load_scenario(tmp_path / "nope.json")


# -- verification ------------------------------------------------------------------


def empty_trace() -> SimTrace:
    return SimTrace(header={}, steps=[], summaries={})


def test_verify_empty_trace_passes(small_graph):
    report = sim.verify_trace(empty_trace(), small_graph)
    assert report.passed and report.checked_steps == 0


def test_verify_flags_shared_segment(small_graph):
    trace = SimTrace(
        header={},
        steps=[{"k": 0, "positions": {"a": 3, "b": 3}, "events": [], "accessible": 0, "allocated": 0}],
        summaries={},
    )
    report = sim.verify_trace(trace, small_graph)
    assert not report.passed
    assert any("step 0" in f and "segment 3" in f for f in report.failures)


def test_verify_flags_off_graph_motion(small_graph):
    ids = sorted(small_graph.segments)
    far_apart = (ids[0], ids[-1])
    assert far_apart not in small_graph.edges
    trace = SimTrace(
        header={},
        steps=[
            {"k": 0, "positions": {"a": far_apart[0]}, "events": [], "accessible": 0, "allocated": 0},
            {"k": 1, "positions": {"a": far_apart[1]}, "events": [], "accessible": 0, "allocated": 0},
        ],
        summaries={},
    )
    report = sim.verify_trace(trace, small_graph)
    assert not report.passed
    assert any("off the edge set" in f for f in report.failures)


def test_verify_flags_backward_motion(small_graph):
    # find a successor edge and drive it backwards
    i, j = next(
        (i, j)
        for (i, j) in small_graph.edges
        if small_graph.segments[i].floor_index == small_graph.segments[j].floor_index
    )
    trace = SimTrace(
        header={},
        steps=[
            {"k": 0, "positions": {"a": j}, "events": [], "accessible": 0, "allocated": 0},
            {"k": 1, "positions": {"a": i}, "events": [], "accessible": 0, "allocated": 0},
        ],
        summaries={},
    )
    report = sim.verify_trace(trace, small_graph)
    assert not report.passed


def test_verify_flags_fcfs_violation(small_graph):
    trace = SimTrace(
        header={},
        steps=[
            {
                "k": 0,
                "positions": {},
                "accessible": 0,
                "allocated": 0,
                "events": [
                    {"type": "allocate", "k": 0, "uas": "late", "submit": 9, "path": [0], "t_max": 1, "t_check": 1},
                ],
            },
            {
                "k": 1,
                "positions": {},
                "accessible": 0,
                "allocated": 0,
                "events": [
                    {"type": "allocate", "k": 1, "uas": "early", "submit": 0, "path": [1], "t_max": 1, "t_check": 2},
                ],
            },
        ],
        summaries={},
    )
    report = sim.verify_trace(trace, small_graph)
    assert not report.passed
    assert any("FCFS" in f for f in report.failures)


def test_verify_flags_late_arrival(small_graph):
    trace = SimTrace(
        header={},
        steps=[],
        summaries={
            "u": UasSummary("u", 0, 0, 5, 5, True, t_arrive=9, path=[0])
        },
    )
    report = sim.verify_trace(trace, small_graph)
    assert not report.passed


# -- summaries -----------------------------------------------------------------------


def test_summarize_format(small_graph):
    scenario = fixed_scenario(small_graph)
    table = sim.summarize(sim.run(small_graph, scenario))
    lines = table.strip().splitlines()
    assert lines[0] == "uas,t_request,t_max,t_check,arrived"
    assert len(lines) == 3
    for line in lines[1:]:
        uas, t_req, t_max, t_check, arrived = line.split(",")
        assert int(t_check) == int(t_req) + int(t_max)
        assert arrived in ("true", "false")


def test_summarize_empty():
    table = sim.summarize(empty_trace())
    assert table == "uas,t_request,t_max,t_check,arrived\n"


# -- scalability smoke ------------------------------------------------------------------


def test_runtime_scales_no_worse_than_quadratic(demo_graph):
    timings = {}
    for n in (5, 10, 20, 40):
        scenario = random_scenario(seed=3, horizon=500, n_uas=n)
        t0 = time.perf_counter()
        trace = sim.run(demo_graph, scenario)
        timings[n] = time.perf_counter() - t0
        assert len(trace.summaries) == n
    ratio = timings[40] / max(timings[5], 1e-3)
    assert ratio < 4.0 * (40 / 5) ** 2
