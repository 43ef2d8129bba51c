"""Deterministic discrete-time simulation driver and trace verification.

One supervisor step per clock tick; vehicles move one segment per tick.
Traces are newline-delimited JSON with a digest-bearing header, so two runs
with identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ScenarioError
from .ioutil import canonical_json
from .planner import PathQuery, astar
from .skyroads import SkyroadGraph
from .supervisor import DEFAULT_CLEAR_PERIOD, RequestEvent, Supervisor

log = logging.getLogger(__name__)

ENDPOINT_RETRIES = 50


@dataclass
class ScenarioRequest:
    uas_id: str
    submit_time: int
    start: int | None = None
    goal: int | None = None


@dataclass
class Scenario:
    seed: int
    horizon: int
    requests: list[ScenarioRequest]
    random_endpoints: bool = False

    def validate(self, graph: SkyroadGraph | None = None) -> None:
        seen: set[str] = set()
        for req in self.requests:
            if req.uas_id in seen:
                raise ScenarioError(f"duplicate uas id '{req.uas_id}'")
            seen.add(req.uas_id)
            if not 0 <= req.submit_time < self.horizon:
                raise ScenarioError(
                    f"uas '{req.uas_id}': submit_time {req.submit_time} outside horizon {self.horizon}"
                )
            has_endpoints = req.start is not None and req.goal is not None
            if self.random_endpoints and has_endpoints:
                raise ScenarioError(
                    f"uas '{req.uas_id}': endpoints given but scenario draws them randomly"
                )
            if not self.random_endpoints and not has_endpoints:
                raise ScenarioError(f"uas '{req.uas_id}': missing start/goal")
            if graph is not None and has_endpoints:
                for seg in (req.start, req.goal):
                    if seg not in graph.segments:
                        raise ScenarioError(
                            f"uas '{req.uas_id}': segment {seg} not in the graph"
                        )


@dataclass
class UasSummary:
    uas_id: str
    submit_time: int
    t_request: int  # step the corridor was granted
    t_max: int
    t_check: int
    arrived: bool
    t_arrive: int | None
    path: list[int]


@dataclass
class SimTrace:
    header: dict
    steps: list[dict]
    summaries: dict[str, UasSummary] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.steps)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "seed": scenario.seed,
        "horizon": scenario.horizon,
        "random_endpoints": scenario.random_endpoints,
        "requests": [
            {
                "id": r.uas_id,
                "t": r.submit_time,
                **({"start": r.start} if r.start is not None else {}),
                **({"goal": r.goal} if r.goal is not None else {}),
            }
            for r in scenario.requests
        ],
    }


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        requests = [
            ScenarioRequest(
                uas_id=str(r["id"]),
                submit_time=int(r["t"]),
                start=r.get("start"),
                goal=r.get("goal"),
            )
            for r in doc["requests"]
        ]
        scenario = Scenario(
            seed=int(doc["seed"]),
            horizon=int(doc["horizon"]),
            requests=requests,
            random_endpoints=bool(doc.get("random_endpoints", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"scenario document malformed: {exc}") from exc
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), sort_keys=True) + "\n")


def _draw_endpoints(sup: Supervisor, rng: random.Random, uas_id: str) -> tuple[int, int]:
    """Uniform accessible endpoints; keeps the last pair if no draw has a live path."""
    pool = sorted(sup.accessible)
    if len(pool) < 1:
        raise ScenarioError(f"uas '{uas_id}': no accessible segments to draw from")
    live = sup.live_view()
    start = goal = pool[0]
    for _ in range(ENDPOINT_RETRIES):
        start = pool[rng.randrange(len(pool))]
        goal = pool[rng.randrange(len(pool))]
        if astar(live, PathQuery(start, goal)) is not None:
            return start, goal
    log.warning("uas '%s': no live path after %d draws; request will defer", uas_id, ENDPOINT_RETRIES)
    return start, goal


def run(
    graph: SkyroadGraph,
    scenario: Scenario,
    n_t: int = DEFAULT_CLEAR_PERIOD,
    debug: bool = False,
    graph_digest: str = "",
) -> SimTrace:
    """Drive the supervisor over the scenario horizon and record every step."""
    scenario.validate(graph)
    rng = random.Random(scenario.seed)
    sup = Supervisor.init(graph, n_t=n_t, debug=debug)

    by_step: dict[int, list[ScenarioRequest]] = {}
    for req in sorted(scenario.requests, key=lambda r: (r.submit_time, r.uas_id)):
        by_step.setdefault(req.submit_time, []).append(req)

    steps: list[dict] = []
    arrivals: dict[str, int] = {}
    for k in range(scenario.horizon):
        sup.begin_step()
        events: list[RequestEvent] = []
        for req in by_step.get(k, []):
            if scenario.random_endpoints:
                start, goal = _draw_endpoints(sup, rng, req.uas_id)
            else:
                start, goal = req.start, req.goal
            events.append(RequestEvent(req.uas_id, start, goal, submit_time=k))
        sup.process_requests(events)
        sup.advance()
        record = sup.close_step()
        for ev in record.events:
            if ev["type"] == "arrive":
                arrivals[ev["uas"]] = ev["k"]
        steps.append(
            {
                "k": record.k,
                "positions": record.positions,
                "accessible": record.accessible_count,
                "allocated": record.allocated_count,
                "events": record.events,
            }
        )

    summaries: dict[str, UasSummary] = {}
    for res in list(sup.reservations.values()) + sup.retired:
        summaries[res.uas_id] = UasSummary(
            uas_id=res.uas_id,
            submit_time=res.submit_time,
            t_request=res.t_request,
            t_max=res.t_max,
            t_check=res.t_due,
            arrived=res.arrived,
            t_arrive=arrivals.get(res.uas_id),
            path=list(res.path.segment_ids),
        )

    header = {
        "format": "cutm-trace-v1",
        "graph_digest": graph_digest,
        "scenario": scenario_to_dict(scenario),
        "n_t": n_t,
    }
    return SimTrace(header=header, steps=steps, summaries=summaries)


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    passed: bool
    checked_steps: int
    failures: list[str]

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"trace verification: {status} ({self.checked_steps} steps)"]
        lines.extend(f"  - {msg}" for msg in self.failures[:20])
        return "\n".join(lines)


def verify_trace(trace: SimTrace, graph: SkyroadGraph) -> VerificationReport:
    """Safety audit of a finished trace.

    Checks, with counterexamples: (a) no two vehicles share a segment at any
    step; (b) every move follows a graph edge; (c) same-floor moves advance
    the arc index by exactly one; (d) every arrival beats its due step;
    (e) grant order respects submission order (FCFS).
    """
    failures: list[str] = []
    last_position: dict[str, int] = {}
    for row in trace.steps:
        k = row["k"]
        positions: dict[str, int] = row["positions"]
        occupied: dict[int, str] = {}
        for uid, seg in sorted(positions.items()):
            if seg in occupied:
                failures.append(
                    f"step {k}: segment {seg} occupied by '{occupied[seg]}' and '{uid}'"
                )
            occupied[seg] = uid
        for uid, seg in sorted(positions.items()):
            prev = last_position.get(uid)
            if prev is not None and prev != seg:
                if (prev, seg) not in graph.edges:
                    failures.append(f"step {k}: '{uid}' moved {prev}->{seg} off the edge set")
                else:
                    a, b = graph.segments[prev], graph.segments[seg]
                    if a.floor_index == b.floor_index and b.arc_index != a.arc_index + 1:
                        failures.append(
                            f"step {k}: '{uid}' moved against skyroad direction ({prev}->{seg})"
                        )
            last_position[uid] = seg

    grants: list[tuple[int, int, int]] = []  # (k, order within step, submit)
    for row in trace.steps:
        for order, ev in enumerate(row["events"]):
            if ev["type"] == "allocate":
                grants.append((row["k"], order, ev["submit"]))
    submits = [submit for _, _, submit in sorted(grants)]
    if submits != sorted(submits):
        failures.append("allocation order violates submission order (FCFS)")

    for summary in trace.summaries.values():
        if summary.arrived and summary.t_arrive is not None and summary.t_arrive > summary.t_check:
            failures.append(
                f"'{summary.uas_id}' arrived at {summary.t_arrive} after its due step {summary.t_check}"
            )

    return VerificationReport(passed=not failures, checked_steps=len(trace.steps), failures=failures)


def summarize(trace: SimTrace) -> str:
    """Per-vehicle timing table as CSV, sorted by grant step."""
    lines = ["uas,t_request,t_max,t_check,arrived"]
    rows = sorted(trace.summaries.values(), key=lambda s: (s.t_request, s.uas_id))
    for s in rows:
        lines.append(f"{s.uas_id},{s.t_request},{s.t_max},{s.t_check},{str(s.arrived).lower()}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# trace files


def write_trace(trace: SimTrace, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json({"header": trace.header}) + "\n")
        for row in trace.steps:
            fh.write(canonical_json(row) + "\n")
        fh.write(
            canonical_json(
                {
                    "summaries": {
                        uid: {
                            "submit_time": s.submit_time,
                            "t_request": s.t_request,
                            "t_max": s.t_max,
                            "t_check": s.t_check,
                            "arrived": s.arrived,
                            "t_arrive": s.t_arrive,
                            "path": s.path,
                        }
                        for uid, s in sorted(trace.summaries.items())
                    }
                }
            )
            + "\n"
        )


def read_trace(path: str | Path) -> SimTrace:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read trace file {path}: {exc}") from exc
    if not lines:
        raise ParseError(f"trace file {path} is empty")
    try:
        header = json.loads(lines[0])["header"]
        steps = []
        summaries: dict[str, UasSummary] = {}
        for line in lines[1:]:
            doc = json.loads(line)
            if "summaries" in doc:
                for uid, rec in doc["summaries"].items():
                    summaries[uid] = UasSummary(
                        uas_id=uid,
                        submit_time=rec["submit_time"],
                        t_request=rec["t_request"],
                        t_max=rec["t_max"],
                        t_check=rec["t_check"],
                        arrived=rec["arrived"],
                        t_arrive=rec["t_arrive"],
                        path=rec["path"],
                    )
            else:
                steps.append(doc)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"trace file {path} malformed: {exc}") from exc
    return SimTrace(header=header, steps=steps, summaries=summaries)
