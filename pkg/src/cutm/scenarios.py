"""Scenario construction helpers.

`random_scenario` makes seeded fully-random request streams. The timed
builder is for reproducing a known timing table: given (submit step, travel
budget) pairs it walks a live supervisor forward and picks endpoint pairs
whose optimal live path needs exactly the requested number of transitions,
so the resulting fixed-endpoint scenario replays with the same per-vehicle
timing rows.
"""

from __future__ import annotations

import heapq
import logging
import random

from .errors import ScenarioError
from .planner import LiveGraph, PathQuery, astar, heuristic
from .sim import Scenario, ScenarioRequest
from .skyroads import SkyroadGraph
from .supervisor import DEFAULT_CLEAR_PERIOD, RequestEvent, Supervisor

log = logging.getLogger(__name__)

# demo timetable bundled with the repository: (submit step, travel budget)
DEMO_TIMETABLE: list[tuple[int, int]] = [
    (8, 37),
    (26, 49),
    (31, 101),
    (52, 75),
    (82, 68),
    (97, 17),
    (145, 51),
    (165, 111),
    (182, 135),
    (200, 86),
    (208, 47),
    (213, 103),
    (238, 138),
    (263, 75),
    (311, 81),
    (326, 44),
    (355, 48),
    (445, 1),
    (461, 57),
    (484, 38),
]
DEMO_HORIZON = 500


def random_scenario(seed: int, horizon: int, n_uas: int) -> Scenario:
    """n_uas requests at sorted random submit steps, endpoints drawn at run time."""
    rng = random.Random(seed)
    times = sorted(rng.randrange(horizon) for _ in range(n_uas))
    requests = [
        ScenarioRequest(uas_id=f"uas-{i + 1:02d}", submit_time=t) for i, t in enumerate(times)
    ]
    return Scenario(seed=seed, horizon=horizon, requests=requests, random_endpoints=True)


def _dijkstra_hops(live: LiveGraph, start: int) -> dict[int, int]:
    """Transition count of one optimal path per reachable node."""
    dist: dict[int, float] = {start: 0.0}
    hops: dict[int, int] = {start: 0}
    frontier: list[tuple[float, int]] = [(0.0, start)]
    while frontier:
        d, node = heapq.heappop(frontier)
        if d > dist.get(node, float("inf")):
            continue
        for nxt in live.neighbors(node):
            nd = d + heuristic(live.segment(node), live.segment(nxt))
            if nd < dist.get(nxt, float("inf")) - 1e-12:
                dist[nxt] = nd
                hops[nxt] = hops[node] + 1
                heapq.heappush(frontier, (nd, nxt))
    return hops


def _find_endpoints(sup: Supervisor, target_transitions: int, rng: random.Random, max_starts: int = 80) -> tuple[int, int]:
    """Endpoint pair whose optimal live path takes exactly the target transitions."""
    live = sup.live_view()
    pool = sorted(sup.accessible)
    if not pool:
        raise ScenarioError("no accessible segments to search from")
    for _ in range(max_starts):
        start = pool[rng.randrange(len(pool))]
        hops = _dijkstra_hops(live, start)
        goals = sorted(g for g, h in hops.items() if h == target_transitions)
        rng.shuffle(goals)
        for goal in goals[:12]:
            # the planner's own tie-breaking decides the real hop count
            path = astar(live, PathQuery(start, goal))
            if path is not None and path.hop_count - 1 == target_transitions:
                return start, goal
    raise ScenarioError(
        f"no endpoint pair with an optimal path of {target_transitions} transitions found"
    )


def build_timed_scenario(
    graph: SkyroadGraph,
    timetable: list[tuple[int, int]],
    seed: int = 0,
    horizon: int = DEMO_HORIZON,
    n_t: int = DEFAULT_CLEAR_PERIOD,
) -> Scenario:
    """Fixed-endpoint scenario whose replay reproduces the given timing table.

    The builder mirrors the simulation loop phase by phase so each endpoint
    search sees exactly the accessible set the replayed request will see.
    """
    order = sorted(range(len(timetable)), key=lambda i: (timetable[i][0], i))
    if any(timetable[i][0] >= horizon for i in order):
        raise ScenarioError("timetable submit step outside the horizon")
    rng = random.Random(seed)
    sup = Supervisor.init(graph, n_t=n_t)
    requests: list[ScenarioRequest] = []
    pending = list(order)
    for k in range(horizon):
        sup.begin_step()
        events: list[RequestEvent] = []
        while pending and timetable[pending[0]][0] == k:
            idx = pending.pop(0)
            submit, budget = timetable[idx]
            uas_id = f"uas-{idx + 1:02d}"
            start, goal = _find_endpoints(sup, budget, rng)
            requests.append(ScenarioRequest(uas_id=uas_id, submit_time=submit, start=start, goal=goal))
            events.append(RequestEvent(uas_id, start, goal, submit_time=k))
        sup.process_requests(events)
        sup.advance()
        record = sup.close_step()
        for ev in record.events:
            if ev["type"] == "defer":
                raise ScenarioError(
                    f"request '{ev['uas']}' deferred at step {k}; timetable not reproducible"
                )
        if not pending and not sup.reservations:
            break
    return Scenario(seed=seed, horizon=horizon, requests=requests, random_endpoints=False)
