"""A* search against Dijkstra and BFS oracles on randomized live graphs."""

import heapq
import random

import numpy as np
import pytest

from cutm.errors import EdgeNotLiveError, StartOrGoalAllocatedError
from cutm.planner import LiveGraph, PathQuery, astar, heuristic, transition_cost
from cutm.skyroads import Segment, SkyroadGraph


def make_graph(midpoints: dict[int, tuple], edges: set[tuple[int, int]]) -> SkyroadGraph:
    """Synthetic graph for search tests; skyroad legality is irrelevant here."""
    segments = {
        i: Segment(id=i, floor_index=1, skyroad_index=0, arc_index=i, midpoint=np.array(m, dtype=float), length=1.0)
        for i, m in midpoints.items()
    }
    succ: dict[int, tuple] = {i: () for i in segments}
    pred: dict[int, tuple] = {i: () for i in segments}
    tmp_s: dict[int, list] = {i: [] for i in segments}
    tmp_p: dict[int, list] = {i: [] for i in segments}
    for i, j in edges:
        tmp_s[i].append(j)
        tmp_p[j].append(i)
    succ = {i: tuple(sorted(v)) for i, v in tmp_s.items()}
    pred = {i: tuple(sorted(v)) for i, v in tmp_p.items()}
    return SkyroadGraph(segments=segments, edges=edges, succ=succ, pred=pred, r_v=0.0)


def live_of(graph: SkyroadGraph, accessible=None) -> LiveGraph:
    acc = set(graph.segments) if accessible is None else set(accessible)
    live_edges = {(i, j) for (i, j) in graph.edges if i in acc and j in acc}
    return LiveGraph(graph, acc, live_edges)


def random_live_graph(rng: random.Random, n_nodes: int) -> LiveGraph:
    midpoints = {
        i: (rng.uniform(0, 100), rng.uniform(0, 100), rng.choice([0.0, 12.5, 25.0]))
        for i in range(n_nodes)
    }
    edges = set()
    for i in range(n_nodes):
        for j in rng.sample(range(n_nodes), k=min(n_nodes, rng.randint(1, 4))):
            if i != j:
                edges.add((i, j))
    return live_of(make_graph(midpoints, edges))


def dijkstra_cost(live: LiveGraph, start: int, goal: int) -> float | None:
    """Textbook Dijkstra, independent of the A* implementation."""
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == goal:
            return d
        for nxt in live.graph.succ[node]:
            if (node, nxt) not in live.live_edges:
                continue
            seg_a, seg_b = live.segment(node), live.segment(nxt)
            step = float(np.linalg.norm(seg_a.midpoint - seg_b.midpoint))
            nd = d + step
            if nd < dist.get(nxt, float("inf")):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return None


def bfs_reachable(live: LiveGraph, start: int) -> set[int]:
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in live.neighbors(node):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


# -- heuristic and cost ------------------------------------------------------------


def test_heuristic_identity():
    g = make_graph({0: (1, 2, 3)}, set())
    seg = g.segments[0]
    assert heuristic(seg, seg) == 0.0


def test_heuristic_345():
    g = make_graph({0: (0, 0, 0), 1: (3, 4, 0)}, set())
    assert heuristic(g.segments[0], g.segments[1]) == pytest.approx(5.0)


def test_heuristic_floor_spacing():
    g = make_graph({0: (0, 0, 12.5), 1: (0, 0, 25.0)}, set())
    assert heuristic(g.segments[0], g.segments[1]) == pytest.approx(12.5)


def test_transition_cost_successor():
    g = make_graph({0: (0, 0, 0), 1: (10, 0, 0)}, {(0, 1)})
    live = live_of(g)
    assert transition_cost(live, 0, 1) == pytest.approx(10.0)


def test_transition_cost_vertical_and_symmetry():
    g = make_graph({0: (5, 5, 12.5), 1: (5, 5, 25.0)}, {(0, 1), (1, 0)})
    live = live_of(g)
    assert transition_cost(live, 0, 1) == pytest.approx(12.5)
    assert transition_cost(live, 0, 1) == transition_cost(live, 1, 0)


def test_transition_cost_requires_live_edge():
    g = make_graph({0: (0, 0, 0), 1: (1, 0, 0)}, {(0, 1)})
    live = live_of(g, accessible={0})
    with pytest.raises(EdgeNotLiveError):
        transition_cost(live, 0, 1)


# -- astar -------------------------------------------------------------------------


def test_degenerate_query():
    g = make_graph({0: (0, 0, 0)}, set())
    path = astar(live_of(g), PathQuery(0, 0))
    assert path.segment_ids == [0]
    assert path.total_cost == 0.0
    assert path.hop_count == 1


def test_endpoints_must_be_accessible():
    g = make_graph({0: (0, 0, 0), 1: (1, 0, 0)}, {(0, 1)})
    with pytest.raises(StartOrGoalAllocatedError):
        astar(live_of(g, accessible={0}), PathQuery(0, 1))


def test_astar_matches_dijkstra_on_random_graphs():
    rng = random.Random(2024)
    checked = 0
    for trial in range(100):
        live = random_live_graph(rng, rng.randint(10, 60))
        nodes = sorted(live.accessible)
        start, goal = rng.choice(nodes), rng.choice(nodes)
        expected = dijkstra_cost(live, start, goal)
        path = astar(live, PathQuery(start, goal))
        if expected is None:
            assert path is None
        else:
            assert path is not None
            assert path.total_cost == pytest.approx(expected, abs=1e-9)
            checked += 1
    assert checked > 30  # the graphs must not be degenerate


def test_nopath_matches_bfs_oracle():
    rng = random.Random(7)
    for trial in range(50):
        live = random_live_graph(rng, 25)
        nodes = sorted(live.accessible)
        start, goal = rng.choice(nodes), rng.choice(nodes)
        reachable = bfs_reachable(live, start)
        path = astar(live, PathQuery(start, goal))
        assert (path is not None) == (goal in reachable)


def test_path_edges_are_live():
    rng = random.Random(11)
    live = random_live_graph(rng, 40)
    nodes = sorted(live.accessible)
    for _ in range(20):
        start, goal = rng.choice(nodes), rng.choice(nodes)
        path = astar(live, PathQuery(start, goal))
        if path is None:
            continue
        assert path.segment_ids[0] == start and path.segment_ids[-1] == goal
        for a, b in zip(path.segment_ids[:-1], path.segment_ids[1:]):
            assert (a, b) in live.live_edges


def test_heuristic_is_admissible_along_returned_paths():
    rng = random.Random(5)
    live = random_live_graph(rng, 40)
    nodes = sorted(live.accessible)
    for _ in range(20):
        start, goal = rng.choice(nodes), rng.choice(nodes)
        path = astar(live, PathQuery(start, goal))
        if path is None:
            continue
        goal_seg = live.segment(goal)
        remaining = path.total_cost
        for a, b in zip(path.segment_ids[:-1], path.segment_ids[1:]):
            assert heuristic(live.segment(a), goal_seg) <= remaining + 1e-9
            remaining -= float(np.linalg.norm(live.segment(a).midpoint - live.segment(b).midpoint))


def test_restricting_nodes_never_cheapens_paths():
    rng = random.Random(9)
    for _ in range(20):
        live = random_live_graph(rng, 40)
        nodes = sorted(live.accessible)
        start, goal = rng.choice(nodes), rng.choice(nodes)
        full = astar(live, PathQuery(start, goal))
        removable = [n for n in nodes if n not in (start, goal)]
        removed = set(rng.sample(removable, k=10))
        restricted_live = live_of(live.graph, accessible=live.accessible - removed)
        restricted = astar(restricted_live, PathQuery(start, goal))
        if restricted is not None:
            assert full is not None
            assert restricted.total_cost >= full.total_cost - 1e-9


def test_deterministic_tie_breaking():
    # two equal-cost routes; the planner must pick the same one every time
    g = make_graph(
        {0: (0, 0, 0), 1: (1, 1, 0), 2: (1, -1, 0), 3: (2, 0, 0)},
        {(0, 1), (0, 2), (1, 3), (2, 3)},
    )
    paths = {tuple(astar(live_of(g), PathQuery(0, 3)).segment_ids) for _ in range(5)}
    assert len(paths) == 1
